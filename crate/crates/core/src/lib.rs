//! Estimate the sub-word vocabulary size for end-to-end speech recognition
//! from a text corpus.
//!
//! The pipeline: [`corpus`] statistics, a BPE [`tokenizer`], a [`sweep`] of the
//! token-imbalance Δ(n) and token-count Θ(n) curves over vocabulary sizes,
//! smooth [`fitting`] of both curves, and a [`solver`] for the minimizer of the
//! weighted cost `a1·n + a2·Δ(n) + a3·Θ(n)`.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod fitting;
pub mod solver;
pub mod sweep;
pub mod tokenizer;

pub use corpus::{compute_stats, CorpusStats, StatsReport};
pub use error::{Error, ErrorKind, Result};
pub use fitting::{fit, FitResult, ModelKind};
pub use solver::{
    reverse_solve, search_alpha, solve_quadexp, solve_quadratic, CostSpec, Normalization, SearchMode,
    SolveOutcome, SolveStatus, Weights,
};
pub use sweep::{run_sweep, SweepPoint, SweepTable};
pub use tokenizer::{train, TokenHistogram, TokenizerModel};
