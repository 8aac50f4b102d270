use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Parse,
    Precondition,
    Solver,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Io => "io",
            ErrorKind::Parse => "parse",
            ErrorKind::Precondition => "precondition",
            ErrorKind::Solver => "solver",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus contains no non-whitespace characters")]
    EmptyCorpus,
    #[error("corpus is not valid UTF-8 (first bad byte at offset {offset})")]
    InvalidEncoding { offset: usize },
    #[error("vocabulary size {requested} is below the number of distinct characters ({unique_chars})")]
    VocabTooSmall { requested: usize, unique_chars: usize },
    #[error("character {0:?} is not in the tokenizer alphabet")]
    OutOfAlphabet(char),
    #[error("token histogram has no realized tokens")]
    EmptyHistogram,
    #[error("need at least {needed} points with distinct n, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("model is undefined at n = {0} (requires n > 0)")]
    Domain(f64),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid bracket [{low}, {high}]")]
    InvalidBracket { low: f64, high: f64 },
    #[error("non-finite value {value} at n = {n}")]
    NonFinite { n: f64, value: f64 },
    #[error("fits disagree on model kind")]
    MixedModels,
    #[error("operation requires {0} fits")]
    WrongModel(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no solution after {0} attempts")]
    Exhausted(usize),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) => ErrorKind::Io,
            Error::InvalidEncoding { .. } | Error::Json(_) | Error::Csv(_) | Error::Malformed(_) => {
                ErrorKind::Parse
            }
            Error::Exhausted(_) | Error::NonFinite { .. } | Error::RankDeficient => ErrorKind::Solver,
            _ => ErrorKind::Precondition,
        }
    }
}
