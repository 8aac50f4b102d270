//! Command-line front end: corpus → stats → sweep → fit → solve/search/reverse.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::corpus::{self, StatsReport, WordCounts};
use crate::error::{Error, ErrorKind, Result};
use crate::fitting::{self, ModelKind};
use crate::solver::{
    self, reverse_solve, round2, search_alpha, summarize, CostSpec, Normalization, ReverseSolution, SearchMode,
    SearchSummary, SolveOutcome, Weights,
};
use crate::sweep::{self, SweepSidecar};
use crate::tokenizer;

pub const SEED_ENV: &str = "VOCABSIZE_SEED";

#[derive(Debug, Parser)]
#[command(name = "vocabsize", version, about = "Estimate the sub-word vocabulary size for ASR from a text corpus")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus statistics as JSON.
    Stats(StatsArgs),
    /// Train a tokenizer and write it in the text model format.
    Train(TrainArgs),
    /// Δ(n) and Θ(n) over a range of vocabulary sizes, as CSV plus JSON sidecar.
    Sweep(SweepArgs),
    /// Fit both cost-term models to a sweep CSV.
    Fit(FitArgs),
    /// Solve for n* at given weights.
    Solve(SolveArgs),
    /// Random-restart search over simplex weights.
    Search(SearchArgs),
    /// Find weights that put n* at a target.
    Reverse(ReverseArgs),
    /// Run the whole pipeline on a corpus and summarize.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Quad,
    #[value(name = "quadexp", alias = "quad-exp", alias = "quad_exp")]
    QuadExp,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Quad => ModelKind::Quad,
            ModelArg::QuadExp => ModelKind::QuadExp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Root,
    MinAbs,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Root => SearchMode::Root,
            ModeArg::MinAbs => SearchMode::MinAbs,
        }
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Target vocabulary size.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_min: u64,
    #[arg(long)]
    pub n_max: u64,
    /// Spacing between sampled sizes (default: at most 256 samples).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "full")]
    pub step: Option<u64>,
    /// Sample every size in the range.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub output: PathBuf,
    /// Sidecar JSON path (default: the output path with a .json extension).
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Sweep CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Fit the normalized columns and record the corpus bounds.
    #[arg(long)]
    pub normalized: bool,
    /// Sweep sidecar JSON (default: the input path with a .json extension).
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Fits JSON.
    #[arg(long)]
    pub fits: PathBuf,
    /// Checked against the fits file when given.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Weights as `a1,a2,a3`.
    #[arg(long, value_parser = parse_weights, allow_hyphen_values = true)]
    pub alpha: Weights,
    /// Search interval for quadexp fits, as `low,high`.
    #[arg(long, value_parser = parse_pair, default_value = "1,500")]
    pub bracket: (f64, f64),
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub fits: PathBuf,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, default_value_t = 25_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500.0)]
    pub n_bound: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Root)]
    pub mode: ModeArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReverseArgs {
    #[arg(long)]
    pub fits: PathBuf,
    #[arg(long)]
    pub n_target: f64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub attempts: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Smallest swept size (default: the number of distinct characters).
    #[arg(long)]
    pub n_min: Option<u64>,
    #[arg(long, default_value_t = 5000)]
    pub n_max: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub step: Option<u64>,
    /// Fit raw Δ and Θ instead of their normalized forms.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, default_value_t = 25_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500.0)]
    pub n_bound: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Root)]
    pub mode: ModeArg,
    /// Weights for the quadratic closed-form fallback.
    #[arg(long, value_parser = parse_weights, allow_hyphen_values = true)]
    pub alpha: Option<Weights>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_floats(s: &str, count: usize) -> std::result::Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if values.len() != count {
        return Err(format!("expected {count} comma-separated numbers, got {}", values.len()));
    }
    Ok(values)
}

fn parse_weights(s: &str) -> std::result::Result<Weights, String> {
    let v = parse_floats(s, 3)?;
    let w = Weights::new(v[0], v[1], v[2]);
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let v = parse_floats(s, 2)?;
    Ok((v[0], v[1]))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    Ok(fs::read(path)?)
}

fn read_corpus(path: &Path) -> Result<String> {
    let bytes = read_bytes(path)?;
    Ok(corpus::decode(&bytes)?.to_owned())
}

fn read_fits(path: &Path, model: Option<ModelArg>) -> Result<CostSpec> {
    let spec: CostSpec = serde_json::from_reader(BufReader::new(fs::File::open(path)?))?;
    spec.validate()?;
    if let Some(m) = model {
        let want = ModelKind::from(m);
        if spec.model() != want {
            return Err(Error::InvalidArgument(format!(
                "--model {want} does not match the {} fits in {}",
                spec.model(),
                path.display()
            )));
        }
    }
    Ok(spec)
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Outcome of a subcommand that ran to completion but whose solver did not
/// converge; the artifact is still written.
#[derive(Debug, Default)]
pub struct Completion {
    pub solver_failed: bool,
}

#[derive(Debug, Serialize)]
struct SearchOutput<'a> {
    model: ModelKind,
    mode: SearchMode,
    seed: u64,
    n_bound: f64,
    outcomes: &'a [SolveOutcome],
    summary: SearchSummary,
}

#[derive(Debug, Serialize)]
struct ReverseOutput<'a> {
    n_target: f64,
    seed: u64,
    attempts: usize,
    solutions: &'a [ReverseSolution],
}

pub fn run(cli: Cli) -> Result<Completion> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<Completion> {
    match command {
        Command::Stats(args) => {
            let stats = corpus::compute_stats_bytes(&read_bytes(&args.input)?)?;
            write_json(&StatsReport::from(stats), args.output.as_deref())?;
        }
        Command::Train(args) => {
            let model = tokenizer::train(&read_corpus(&args.input)?, args.n)?;
            if model.exhausted() {
                eprintln!(
                    "warning: corpus supports only {} pieces (requested {})",
                    model.size(),
                    args.n
                );
            }
            match &args.output {
                Some(p) => model.write_to(io::BufWriter::new(fs::File::create(p)?))?,
                None => model.write_to(io::stdout().lock())?,
            }
        }
        Command::Sweep(args) => {
            if args.n_min > args.n_max {
                return Err(Error::InvalidArgument("--n-min exceeds --n-max".into()));
            }
            let (n_min, n_max) = (args.n_min as usize, args.n_max as usize);
            let step = match (args.full, args.step) {
                (true, _) => 1,
                (false, Some(s)) => s as usize,
                (false, None) => sweep::default_step(n_min, n_max),
            };
            let text = read_corpus(&args.input)?;
            let table = sweep::run_sweep(&text, n_min, n_max, step)?;
            for w in &table.warnings {
                eprintln!("warning: n = {}: {}", w.n, w.message);
            }
            table.write_csv(fs::File::create(&args.output)?)?;
            let sidecar = args.sidecar.unwrap_or_else(|| args.output.with_extension("json"));
            write_json(&table.sidecar(n_min, n_max, step), Some(&sidecar))?;
        }
        Command::Fit(args) => {
            let points = sweep::read_points_csv(fs::File::open(&args.input)?)?;
            let normalization = if args.normalized {
                let path = args.sidecar.unwrap_or_else(|| args.input.with_extension("json"));
                let sidecar: SweepSidecar = serde_json::from_reader(BufReader::new(fs::File::open(&path)?))?;
                Some(Normalization::for_normalized_fits(&sidecar.stats.stats))
            } else {
                None
            };
            let spec = fit_points(&points, args.model.into(), normalization)?;
            write_json(&spec, args.output.as_deref())?;
        }
        Command::Solve(args) => {
            let spec = read_fits(&args.fits, args.model)?;
            let outcome = solver::solve(&spec, &args.alpha, args.bracket)?;
            write_json(&outcome, args.output.as_deref())?;
            return Ok(Completion {
                solver_failed: !outcome.converged,
            });
        }
        Command::Search(args) => {
            let spec = read_fits(&args.fits, args.model)?;
            let mode = args.mode.into();
            let outcomes = search_alpha(&spec, args.restarts as usize, args.seed, args.n_bound, mode)?;
            let output = SearchOutput {
                model: spec.model(),
                mode,
                seed: args.seed,
                n_bound: args.n_bound,
                summary: summarize(&outcomes, args.restarts as usize),
                outcomes: &outcomes,
            };
            write_json(&output, args.output.as_deref())?;
        }
        Command::Reverse(args) => {
            let spec = read_fits(&args.fits, Some(ModelArg::Quad))?;
            let solutions = reverse_solve(&spec, args.n_target, args.seed, args.attempts)?;
            let output = ReverseOutput {
                n_target: args.n_target,
                seed: args.seed,
                attempts: args.attempts,
                solutions: &solutions,
            };
            write_json(&output, args.output.as_deref())?;
        }
        Command::Report(args) => {
            let report = build_report(&args)?;
            write_json(&report, args.output.as_deref())?;
            return Ok(Completion {
                solver_failed: report.recommended.is_none(),
            });
        }
    }
    Ok(Completion::default())
}

/// Fit Δ and Θ with the same model family. With `normalization`, the
/// normalized columns are used.
pub fn fit_points(
    points: &[sweep::SweepPoint],
    model: ModelKind,
    normalization: Option<Normalization>,
) -> Result<CostSpec> {
    let normalized = normalization.is_some();
    let delta: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.n as f64, if normalized { p.delta_norm } else { p.delta }))
        .collect();
    let theta: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.n as f64, if normalized { p.theta_norm } else { p.theta as f64 }))
        .collect();
    CostSpec::new(
        fitting::fit(&delta, model)?,
        fitting::fit(&theta, model)?,
        normalization,
    )
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub stats: StatsReport,
    pub sweep: SweepSidecar,
    pub fits: ReportFits,
    pub search: ReportSearch,
    pub recommended: Option<Recommendation>,
}

#[derive(Debug, Serialize)]
pub struct ReportFits {
    pub quad: CostSpec,
    pub quad_exp: CostSpec,
}

#[derive(Debug, Serialize)]
pub struct ReportSearch {
    pub restarts: u64,
    pub seed: u64,
    pub n_bound: f64,
    pub quad_exp_root: SearchSummary,
    pub quad_exp_min_abs: SearchSummary,
    pub quad: SearchSummary,
}

#[derive(Debug, Serialize)]
pub struct Recommendation {
    pub n_star: f64,
    pub n_star_rounded: f64,
    pub source: &'static str,
}

fn build_report(args: &ReportArgs) -> Result<Report> {
    let text = read_corpus(&args.input)?;
    let words = WordCounts::from_text(&text);
    let stats = words.stats()?;
    let n_min = args.n_min.map_or(stats.unique_chars as usize, |n| n as usize);
    let n_max = args.n_max as usize;
    if n_min > n_max {
        return Err(Error::InvalidArgument("--n-min exceeds --n-max".into()));
    }
    let step = args.step.map_or_else(|| sweep::default_step(n_min, n_max), |s| s as usize);
    let table = sweep::run_sweep_words(&words, n_min, n_max, step, &sweep::MaxMinRatio)?;
    let normalization = (!args.raw).then(|| Normalization::for_normalized_fits(&stats));

    let quad = fit_points(&table.points, ModelKind::Quad, normalization)?;
    let quad_exp = fit_points(&table.points, ModelKind::QuadExp, normalization)?;

    let restarts = args.restarts as usize;
    let run = |spec: &CostSpec, mode| -> Result<(Vec<SolveOutcome>, SearchSummary)> {
        let outcomes = search_alpha(spec, restarts, args.seed, args.n_bound, mode)?;
        let summary = summarize(&outcomes, restarts);
        Ok((outcomes, summary))
    };
    let (_, qe_root) = run(&quad_exp, SearchMode::Root)?;
    let (_, qe_min_abs) = run(&quad_exp, SearchMode::MinAbs)?;
    let (_, quad_summary) = run(&quad, SearchMode::Root)?;

    let chosen = match SearchMode::from(args.mode) {
        SearchMode::Root => &qe_root,
        SearchMode::MinAbs => &qe_min_abs,
    };
    let recommended = if let Some(mid) = chosen.band_midpoint() {
        Some((mid, "quad_exp_search"))
    } else if let Some(alpha) = &args.alpha {
        let outcome = solver::solve_quadratic(&quad, alpha)?;
        outcome.converged.then_some((outcome.n_star, "quad_closed_form"))
    } else {
        quad_summary.band_midpoint().map(|mid| (mid, "quad_search"))
    }
    .map(|(n_star, source)| Recommendation {
        n_star,
        n_star_rounded: round2(n_star),
        source,
    });

    Ok(Report {
        stats: stats.into(),
        sweep: table.sidecar(n_min, n_max, step),
        fits: ReportFits { quad, quad_exp },
        search: ReportSearch {
            restarts: args.restarts,
            seed: args.seed,
            n_bound: args.n_bound,
            quad_exp_root: qe_root,
            quad_exp_min_abs: qe_min_abs,
            quad: quad_summary,
        },
        recommended,
    })
}

/// Process exit code for a failure category.
pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Io => 3,
        ErrorKind::Parse => 4,
        ErrorKind::Precondition => 5,
        ErrorKind::Solver => 6,
    }
}

/// Machine-readable error line written to stderr.
pub fn error_json(kind: ErrorKind, message: &str) -> String {
    serde_json::json!({ "error": kind.as_str(), "message": message }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_parsing() {
        assert_eq!(parse_weights("0,0.39,0.61").unwrap(), Weights::new(0.0, 0.39, 0.61));
        assert_eq!(parse_weights("-10, 0.5, 0.5").unwrap(), Weights::new(-10.0, 0.5, 0.5));
        assert!(parse_weights("1,2").is_err());
        assert!(parse_weights("0,0,0").is_err());
        assert!(parse_weights("a,b,c").is_err());
    }

    #[test]
    fn model_aliases() {
        for name in ["quadexp", "quad-exp", "quad_exp"] {
            assert_eq!(ModelArg::from_str(name, false).unwrap(), ModelArg::QuadExp);
        }
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [ErrorKind::Io, ErrorKind::Parse, ErrorKind::Precondition, ErrorKind::Solver].map(exit_code);
        for (i, a) in codes.iter().enumerate() {
            assert_ne!(*a, 0);
            assert!(codes[i + 1..].iter().all(|b| b != a));
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
