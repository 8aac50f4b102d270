use std::process::ExitCode;

use clap::Parser;
use vocabsize::cli::{self, Cli};
use vocabsize::ErrorKind;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let kind = ErrorKind::Precondition;
            eprintln!("{}", cli::error_json(kind, e.render().to_string().trim_end()));
            return ExitCode::from(cli::exit_code(kind) as u8);
        }
    };
    match cli::run(cli) {
        Ok(done) if done.solver_failed => ExitCode::from(cli::exit_code(ErrorKind::Solver) as u8),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", cli::error_json(e.kind(), &e.to_string()));
            ExitCode::from(cli::exit_code(e.kind()) as u8)
        }
    }
}
