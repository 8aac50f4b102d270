//! Recover weights that place the quadratic optimum at a target `n`.
//!
//! The closed form `n(α) = -N(α) / D(α)` is a ratio of linear forms in α, so
//! it is invariant under positive scaling of α. Only the ratios
//! `α1/α3, α2/α3` carry information, which is why they are reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CostSpec, Weights};
use crate::error::{Error, Result};
use crate::fitting::ModelKind;

/// Relative tolerance on `|n(α) - target|` for a successful attempt.
pub const REVERSE_RTOL: f64 = 1e-6;
const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseSolution {
    pub initial: Weights,
    pub weights: Weights,
    pub achieved_n: f64,
    /// `(α1/α3, α2/α3, 1)`; absent when `α3 = 0`.
    pub ratios: Option<[f64; 3]>,
}

struct LinearFractional {
    // N(α) = p·α, D(α) = q·α
    p: [f64; 3],
    q: [f64; 3],
}

impl LinearFractional {
    fn new(spec: &CostSpec) -> Self {
        let e1 = Weights::new(1.0, 0.0, 0.0);
        let e2 = Weights::new(0.0, 1.0, 0.0);
        let e3 = Weights::new(0.0, 0.0, 1.0);
        let parts = [spec.quadratic_parts(&e1), spec.quadratic_parts(&e2), spec.quadratic_parts(&e3)];
        LinearFractional {
            p: parts.map(|(num, _)| num),
            q: parts.map(|(_, den)| den),
        }
    }

    fn num(&self, a: &[f64; 3]) -> f64 {
        dot(&self.p, a)
    }

    fn den(&self, a: &[f64; 3]) -> f64 {
        dot(&self.q, a)
    }

    fn n(&self, a: &[f64; 3]) -> f64 {
        -self.num(a) / self.den(a)
    }

    fn gradient(&self, a: &[f64; 3]) -> [f64; 3] {
        let (num, den) = (self.num(a), self.den(a));
        std::array::from_fn(|i| -(self.p[i] * den - num * self.q[i]) / (den * den))
    }

    fn feasible(&self, a: &[f64; 3]) -> bool {
        self.den(a) > 0.0 && self.num(a) < 0.0
    }
}

fn dot(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// Minimize `(n(α) - target)²` by Gauss-Newton with backtracking, keeping
/// the curvature condition `D(α) > 0` along the way. Returns `None` when the
/// start is infeasible or the iteration stalls.
fn descend(model: &LinearFractional, start: [f64; 3], target: f64) -> Option<[f64; 3]> {
    if model.den(&start) <= 0.0 {
        return None;
    }
    let mut a = start;
    for _ in 0..MAX_ITERATIONS {
        let r = model.n(&a) - target;
        if r.abs() <= 1e-12 * target {
            break;
        }
        let g = model.gradient(&a);
        let gg = dot(&g, &g);
        if gg <= 0.0 || !gg.is_finite() {
            return None;
        }
        let step: [f64; 3] = std::array::from_fn(|i| -r * g[i] / gg);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-12 {
            let cand: [f64; 3] = std::array::from_fn(|i| a[i] + t * step[i]);
            if model.den(&cand) > 0.0 && (model.n(&cand) - target).abs() < r.abs() {
                a = cand;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let ok = model.feasible(&a) && (model.n(&a) - target).abs() <= REVERSE_RTOL * target;
    ok.then_some(a)
}

/// Run `max_attempts` seeded local solves from random starts in `[0, 1)³` and
/// return every success. Weights are unconstrained in sign.
pub fn reverse_solve(spec: &CostSpec, n_target: f64, seed: u64, max_attempts: usize) -> Result<Vec<ReverseSolution>> {
    if spec.model() != ModelKind::Quad {
        return Err(Error::WrongModel("quad"));
    }
    if !(n_target > 0.0 && n_target.is_finite()) {
        return Err(Error::InvalidArgument(format!("target n must be positive, got {n_target}")));
    }
    let model = LinearFractional::new(spec);
    let mut solutions = Vec::new();
    for attempt in 0..max_attempts as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let start: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let Some(a) = descend(&model, start, n_target) else {
            continue;
        };
        let weights = Weights::new(a[0], a[1], a[2]);
        solutions.push(ReverseSolution {
            initial: Weights::new(start[0], start[1], start[2]),
            weights,
            achieved_n: model.n(&a),
            ratios: ratios(&weights),
        });
    }
    if solutions.is_empty() {
        return Err(Error::Exhausted(max_attempts));
    }
    Ok(solutions)
}

pub(crate) fn ratios(w: &Weights) -> Option<[f64; 3]> {
    (w.a3 != 0.0).then(|| [w.a1 / w.a3, w.a2 / w.a3, 1.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::FitResult;
    use crate::solver::solve_quadratic;

    fn quad(c: [f64; 3]) -> FitResult {
        FitResult::with_coeffs(ModelKind::Quad, c.to_vec()).unwrap()
    }

    #[test]
    fn gradient_matches_differences() {
        let spec = CostSpec::new(quad([6.89e-5, 0.24, 21.23]), quad([0.101, -716.87, 2.47e6]), None).unwrap();
        let model = LinearFractional::new(&spec);
        let a = [0.3, 0.2, 0.5];
        let g = model.gradient(&a);
        for i in 0..3 {
            let h = 1e-6;
            let mut up = a;
            let mut down = a;
            up[i] += h;
            down[i] -= h;
            let fd = (model.n(&up) - model.n(&down)) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0), "{i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn recovers_target_on_squares() {
        let spec = CostSpec::new(quad([1.0, 0.0, 0.0]), quad([1.0, 0.0, 0.0]), None).unwrap();
        let sols = reverse_solve(&spec, 5.0, 1, 10).unwrap();
        for s in &sols {
            assert!((s.achieved_n - 5.0).abs() <= 5e-6);
            assert!(s.weights.a1 < 0.0);
            let check = solve_quadratic(&spec, &s.weights).unwrap();
            assert!(check.converged);
            assert!((check.n_star - 5.0).abs() <= 5e-6);
        }
    }

    #[test]
    fn wrong_inputs() {
        let spec = CostSpec::new(quad([1.0, 0.0, 0.0]), quad([1.0, 0.0, 0.0]), None).unwrap();
        assert!(reverse_solve(&spec, -1.0, 1, 10).is_err());
        // concave everywhere: no feasible weights in the positive orthant start
        let concave = CostSpec::new(quad([-1.0, 0.0, 0.0]), quad([-1.0, 0.0, 0.0]), None).unwrap();
        assert!(matches!(reverse_solve(&concave, 5.0, 1, 5), Err(Error::Exhausted(5))));
    }

    #[test]
    fn ratios_skip_zero_third_weight() {
        assert_eq!(ratios(&Weights::new(1.0, 2.0, 0.0)), None);
        assert_eq!(ratios(&Weights::new(2.0, -4.0, 2.0)), Some([1.0, -2.0, 1.0]));
    }
}
