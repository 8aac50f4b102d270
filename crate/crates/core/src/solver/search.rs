//! Random-restart search over the weight simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{round2, solve, CostSpec, SolveOutcome, SolveStatus, Weights};
use crate::error::Result;

/// Share of accepted outcomes the modal band must contain.
pub const BAND_COVERAGE: f64 = 0.9;

/// Which outcomes a search accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Only true stationary minima.
    Root,
    /// Stationary minima, plus interior minimizers of `|f|` when the
    /// stationary equation has no root below the bound.
    MinAbs,
}

impl SearchMode {
    pub fn accepts(self, outcome: &SolveOutcome) -> bool {
        let positive_curvature = outcome.second_derivative > 0.0;
        match self {
            SearchMode::Root => outcome.converged,
            SearchMode::MinAbs => {
                outcome.converged || (outcome.status == SolveStatus::MinAbsInterior && positive_curvature)
            }
        }
    }
}

/// Weights for restart `index`: three uniform draws on `[0, 1)` scaled onto
/// the simplex. Each restart has its own ChaCha stream, so results do not
/// depend on evaluation order.
pub fn draw_simplex_weights(seed: u64, index: u64) -> Weights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let r: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        if let Ok(w) = Weights::from_simplex(r) {
            return w;
        }
    }
}

/// Solve for `restarts` random simplex weights and keep the accepted outcomes
/// with `n_star < n_bound`, in restart order.
pub fn search_alpha(
    spec: &CostSpec,
    restarts: usize,
    seed: u64,
    n_bound: f64,
    mode: SearchMode,
) -> Result<Vec<SolveOutcome>> {
    let results: Vec<Result<Option<SolveOutcome>>> = (0..restarts as u64)
        .into_par_iter()
        .map(|i| {
            let w = draw_simplex_weights(seed, i);
            let outcome = solve(spec, &w, (1.0, n_bound))?;
            Ok((mode.accepts(&outcome) && outcome.n_star < n_bound).then_some(outcome))
        })
        .collect();
    let mut accepted = Vec::new();
    for r in results {
        if let Some(outcome) = r? {
            accepted.push(outcome);
        }
    }
    Ok(accepted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub restarts: usize,
    pub accepted: usize,
    /// Smallest interval holding at least 90% of the accepted `n_star`.
    pub modal_band: Option<[f64; 2]>,
    pub fraction_in_band: f64,
    /// Sorted distinct `n_star`, rounded to two decimals.
    pub distinct_n_values: Vec<f64>,
}

impl SearchSummary {
    pub fn band_width(&self) -> Option<f64> {
        self.modal_band.map(|[lo, hi]| hi - lo)
    }

    pub fn band_midpoint(&self) -> Option<f64> {
        self.modal_band.map(|[lo, hi]| 0.5 * (lo + hi))
    }
}

pub fn summarize(outcomes: &[SolveOutcome], restarts: usize) -> SearchSummary {
    let mut values: Vec<f64> = outcomes.iter().map(|o| o.n_star).collect();
    values.sort_by(f64::total_cmp);
    let mut distinct: Vec<f64> = values.iter().map(|&v| round2(v)).collect();
    distinct.dedup();

    let (modal_band, fraction_in_band) = match modal_band(&values) {
        Some([lo, hi]) => {
            let inside = values.iter().filter(|&&v| v >= lo && v <= hi).count();
            (Some([lo, hi]), inside as f64 / values.len() as f64)
        }
        None => (None, 0.0),
    };
    SearchSummary {
        restarts,
        accepted: values.len(),
        modal_band,
        fraction_in_band,
        distinct_n_values: distinct,
    }
}

fn modal_band(sorted: &[f64]) -> Option<[f64; 2]> {
    if sorted.is_empty() {
        return None;
    }
    let m = ((BAND_COVERAGE * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    (0..=sorted.len() - m)
        .map(|i| [sorted[i], sorted[i + m - 1]])
        .min_by(|a, b| (a[1] - a[0]).total_cmp(&(b[1] - b[0])))
}
