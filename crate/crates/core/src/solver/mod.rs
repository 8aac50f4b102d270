//! Stationary points of the weighted cost
//! `C(n) = a1·T1(n) + a2·T2(n) + a3·T3(n)`, where `T1 = n`, `T2` is the fitted
//! token-imbalance model and `T3` the fitted token-count model.
//!
//! In normalized mode `T1 = (n - c_u) / (w_u - c_u)` and the two fitted terms
//! are divided by their corpus bounds (see [`Normalization`]).

mod reverse;
pub mod roots;
mod search;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusStats;
use crate::error::{Error, Result};
use crate::fitting::{FitResult, ModelKind};

pub use reverse::{reverse_solve, ReverseSolution};
pub use search::{draw_simplex_weights, search_alpha, summarize, SearchMode, SearchSummary};

use roots::{newton_bisect, RootOptions};

/// Relative stationarity tolerance for the bracketed solve.
pub const STATIONARY_RTOL: f64 = 1e-6;

/// Grid resolution used to locate sign changes inside a bracket.
const SCAN_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl Weights {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Weights { a1, a2, a3 }
    }

    /// Scale `r` onto the probability simplex.
    pub fn from_simplex(r: [f64; 3]) -> Result<Self> {
        let sum: f64 = r.iter().sum();
        if r.iter().any(|&x| x < 0.0 || !x.is_finite()) || sum <= 0.0 {
            return Err(Error::InvalidWeights(format!("{r:?} cannot be normalized onto the simplex")));
        }
        Ok(Weights::new(r[0] / sum, r[1] / sum, r[2] / sum))
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Weights::new(self.a1 * lambda, self.a2 * lambda, self.a3 * lambda)
    }

    pub fn is_simplex(&self) -> bool {
        let w = self.as_array();
        w.iter().all(|&x| (0.0..=1.0).contains(&x)) && (w.iter().sum::<f64>() - 1.0).abs() <= 1e-9
    }

    /// Unconstrained weights must be finite and not all zero.
    pub fn validate(&self) -> Result<()> {
        let w = self.as_array();
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidWeights(format!("{w:?} has non-finite entries")));
        }
        if w.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Ok(())
    }
}

/// Corpus bounds used to rescale the cost terms onto `[0, 1]`.
///
/// `delta_scale` and `theta_scale` divide the fitted models; they are 1 when
/// the fits were made on already-normalized series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub unique_chars: f64,
    pub unique_words: f64,
    pub delta_scale: f64,
    pub theta_scale: f64,
}

impl Normalization {
    /// Bounds for fits of the raw Δ and Θ series.
    pub fn from_stats(stats: &CorpusStats) -> Self {
        Normalization {
            unique_chars: stats.unique_chars as f64,
            unique_words: stats.unique_words as f64,
            delta_scale: stats.top_char_freq as f64,
            theta_scale: stats.chars as f64,
        }
    }

    /// Bounds for fits of the normalized Δ and Θ series.
    pub fn for_normalized_fits(stats: &CorpusStats) -> Self {
        Normalization {
            delta_scale: 1.0,
            theta_scale: 1.0,
            ..Self::from_stats(stats)
        }
    }

    fn span(&self) -> f64 {
        self.unique_words - self.unique_chars
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.unique_chars, self.unique_words, self.delta_scale, self.theta_scale]
            .iter()
            .all(|x| x.is_finite())
            && self.span() != 0.0
            && self.delta_scale > 0.0
            && self.theta_scale > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Malformed(format!("invalid normalization {self:?}")))
        }
    }
}

/// The fitted Δ and Θ models plus optional normalization: everything needed
/// to evaluate the cost. This is also the schema of the fits JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub delta: FitResult,
    pub theta: FitResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
}

/// Value, first and second derivative of one cost term.
type Term = (f64, f64, f64);

impl CostSpec {
    pub fn new(delta: FitResult, theta: FitResult, normalization: Option<Normalization>) -> Result<Self> {
        let spec = CostSpec {
            delta,
            theta,
            normalization,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.delta.validate()?;
        self.theta.validate()?;
        if self.delta.model != self.theta.model {
            return Err(Error::MixedModels);
        }
        if let Some(norm) = &self.normalization {
            norm.validate()?;
        }
        Ok(())
    }

    pub fn model(&self) -> ModelKind {
        self.delta.model
    }

    pub fn normalized(&self) -> bool {
        self.normalization.is_some()
    }

    fn t1_slope(&self) -> f64 {
        self.normalization.map_or(1.0, |n| 1.0 / n.span())
    }

    fn scales(&self) -> (f64, f64) {
        self.normalization.map_or((1.0, 1.0), |n| (n.delta_scale, n.theta_scale))
    }

    fn terms(&self, n: f64) -> Result<[Term; 3]> {
        let t1 = match self.normalization {
            Some(norm) => ((n - norm.unique_chars) / norm.span(), 1.0 / norm.span(), 0.0),
            None => (n, 1.0, 0.0),
        };
        let (ds, ts) = self.scales();
        let fitted = |fit: &FitResult, scale: f64| -> Result<Term> {
            let v = fit.evaluate(n)?;
            let (d1, d2) = fit.derivatives(n)?;
            Ok((v / scale, d1 / scale, d2 / scale))
        };
        Ok([t1, fitted(&self.delta, ds)?, fitted(&self.theta, ts)?])
    }

    pub fn cost(&self, w: &Weights, n: f64) -> Result<f64> {
        let terms = self.terms(n)?;
        Ok(weighted(w, &terms, |t| t.0))
    }

    /// First and second derivative of the cost at `n`.
    pub fn cost_derivatives(&self, w: &Weights, n: f64) -> Result<(f64, f64)> {
        let terms = self.terms(n)?;
        Ok((weighted(w, &terms, |t| t.1), weighted(w, &terms, |t| t.2)))
    }

    /// Coefficients of the first-order condition after normalization:
    /// `C'(n) = p1 + p2(n) + p3(n)` with the fitted terms reduced to their
    /// `(quadratic, linear, exponential)` coefficients.
    fn effective(&self) -> (f64, (f64, f64, f64), (f64, f64, f64)) {
        let (ds, ts) = self.scales();
        let d = self.delta.shape_coeffs();
        let t = self.theta.shape_coeffs();
        (
            self.t1_slope(),
            (d.0 / ds, d.1 / ds, d.2 / ds),
            (t.0 / ts, t.1 / ts, t.2 / ts),
        )
    }

    /// Numerator and denominator of the closed-form quadratic solution
    /// `n = -num / den`.
    pub fn quadratic_parts(&self, w: &Weights) -> (f64, f64) {
        let (slope, d, t) = self.effective();
        let num = w.a1 * slope + w.a2 * d.1 + w.a3 * t.1;
        let den = 2.0 * (w.a2 * d.0 + w.a3 * t.0);
        (num, den)
    }

    /// The first-order condition multiplied through by `n²`.
    pub fn stationary_equation(&self, w: &Weights) -> StationaryEquation {
        let (slope, d, t) = self.effective();
        StationaryEquation {
            cubic: w.a2 * d.0 + w.a3 * t.0,
            quadratic: w.a1 * slope + w.a2 * d.1 + w.a3 * t.1,
            exponential: w.a2 * d.2 + w.a3 * t.2,
        }
    }
}

fn weighted(w: &Weights, terms: &[Term; 3], pick: impl Fn(&Term) -> f64) -> f64 {
    w.a1 * pick(&terms[0]) + w.a2 * pick(&terms[1]) + w.a3 * pick(&terms[2])
}

/// `f(n) = 2n³·cubic + n²·quadratic − e^(1/n)·exponential`, which vanishes
/// exactly where the cost's first derivative does (for `n > 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryEquation {
    pub cubic: f64,
    pub quadratic: f64,
    pub exponential: f64,
}

impl StationaryEquation {
    pub fn value(&self, n: f64) -> f64 {
        2.0 * n * n * n * self.cubic + n * n * self.quadratic - (1.0 / n).exp() * self.exponential
    }

    pub fn derivative(&self, n: f64) -> f64 {
        6.0 * n * n * self.cubic + 2.0 * n * self.quadratic + (1.0 / n).exp() * self.exponential / (n * n)
    }

    pub fn second_derivative(&self, n: f64) -> f64 {
        let n4 = n * n * n * n;
        12.0 * n * self.cubic + 2.0 * self.quadratic - (1.0 / n).exp() * self.exponential * (2.0 * n + 1.0) / n4
    }

    /// Magnitude of the largest of the three terms at `n`.
    pub fn scale(&self, n: f64) -> f64 {
        let terms = [
            2.0 * n * n * n * self.cubic,
            n * n * self.quadratic,
            (1.0 / n).exp() * self.exponential,
        ];
        terms.iter().fold(0.0f64, |acc, t| acc.max(t.abs()))
    }

    /// `|f(n)|` relative to [`scale`](Self::scale).
    pub fn relative_residual(&self, n: f64) -> f64 {
        let scale = self.scale(n);
        if scale == 0.0 {
            0.0
        } else {
            self.value(n).abs() / scale
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// A stationary point with strictly positive curvature.
    Converged,
    /// Stationary, but the second derivative is not positive.
    NotMinimum,
    /// The closed form gives `n <= 0`.
    NonPositive,
    /// The quadratic coefficient vanishes: the cost is affine in `n`.
    AffineCost,
    /// No sign change in the bracket; `n_star` is an interior minimizer of
    /// `|f|`.
    MinAbsInterior,
    /// No sign change and `|f|` is smallest at a bracket end.
    BoundaryMinimum,
    /// A solution exists but lies at or beyond the search bound.
    OutOfBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub n_star: f64,
    pub weights: Weights,
    pub second_derivative: f64,
    pub converged: bool,
    /// `|C'(n_star)|`.
    pub residual: f64,
    pub status: SolveStatus,
}

/// Closed-form stationary point for quadratic fits.
pub fn solve_quadratic(spec: &CostSpec, w: &Weights) -> Result<SolveOutcome> {
    if spec.model() != ModelKind::Quad {
        return Err(Error::WrongModel("quad"));
    }
    w.validate()?;
    let (num, den) = spec.quadratic_parts(w);
    let (_, d, t) = spec.effective();
    let magnitude = 2.0 * ((w.a2 * d.0).abs() + (w.a3 * t.0).abs());
    if magnitude == 0.0 || den.abs() <= 1e-12 * magnitude {
        return Ok(SolveOutcome {
            n_star: f64::NAN,
            weights: *w,
            second_derivative: den,
            converged: false,
            residual: num.abs(),
            status: SolveStatus::AffineCost,
        });
    }
    let n_star = -num / den;
    let residual = (num + den * n_star).abs();
    let status = if den <= 0.0 {
        SolveStatus::NotMinimum
    } else if num >= 0.0 {
        SolveStatus::NonPositive
    } else {
        SolveStatus::Converged
    };
    Ok(SolveOutcome {
        n_star,
        weights: *w,
        second_derivative: den,
        converged: status == SolveStatus::Converged,
        residual,
        status,
    })
}

/// Stationary point of the cost for quadratic-plus-exponential fits inside
/// `[low, high]`.
///
/// The bracket is scanned on a geometric grid for sign changes of the
/// stationary equation; each is refined by safeguarded Newton. Among the
/// refined roots with positive curvature the lowest-cost one is returned.
/// Without any sign change the interior minimizer of `|f|` is returned,
/// flagged as not converged.
pub fn solve_quadexp(spec: &CostSpec, w: &Weights, bracket: (f64, f64)) -> Result<SolveOutcome> {
    if spec.model() != ModelKind::QuadExp {
        return Err(Error::WrongModel("quad_exp"));
    }
    w.validate()?;
    let (low, high) = bracket;
    if !(low >= 1.0 && high > low && high.is_finite()) {
        return Err(Error::InvalidBracket { low, high });
    }
    let eq = spec.stationary_equation(w);
    let ratio = (high / low).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| if i == SCAN_POINTS - 1 { high } else { low * ratio.powi(i as i32) })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&n| eq.value(n)).collect();
    if let Some((n, v)) = grid.iter().zip(&values).find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { n: *n, value: *v });
    }

    let mut roots = Vec::new();
    for i in 0..SCAN_POINTS - 1 {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            roots.push(grid[i]);
        } else if a.signum() != b.signum() && b != 0.0 {
            let root = newton_bisect(
                |n| (eq.value(n), eq.derivative(n)),
                grid[i],
                grid[i + 1],
                RootOptions::default(),
            )?;
            roots.push(root);
        }
    }
    if values[SCAN_POINTS - 1] == 0.0 {
        roots.push(high);
    }

    if !roots.is_empty() {
        let mut best: Option<(f64, SolveOutcome)> = None;
        for &n in &roots {
            let outcome = stationary_outcome(spec, w, &eq, n)?;
            let cost = spec.cost(w, n)?;
            let better = match &best {
                None => true,
                Some((best_cost, b)) => (outcome.converged, -cost) > (b.converged, -best_cost),
            };
            if better {
                best = Some((cost, outcome));
            }
        }
        return Ok(best.map(|b| b.1).expect("at least one root"));
    }

    // no sign change: minimize |f| over the bracket
    let idx = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (n_star, status) = if idx == 0 || idx == SCAN_POINTS - 1 {
        (grid[idx], SolveStatus::BoundaryMinimum)
    } else {
        // |f| has an interior minimum where f' = 0
        let (a, b) = (grid[idx - 1], grid[idx + 1]);
        let n = newton_bisect(|n| (eq.derivative(n), eq.second_derivative(n)), a, b, RootOptions::default())
            .unwrap_or(grid[idx]);
        (n, SolveStatus::MinAbsInterior)
    };
    let (d1, d2) = spec.cost_derivatives(w, n_star)?;
    Ok(SolveOutcome {
        n_star,
        weights: *w,
        second_derivative: d2,
        converged: false,
        residual: d1.abs(),
        status,
    })
}

fn stationary_outcome(spec: &CostSpec, w: &Weights, eq: &StationaryEquation, n: f64) -> Result<SolveOutcome> {
    let (d1, d2) = spec.cost_derivatives(w, n)?;
    if !d1.is_finite() || !d2.is_finite() {
        return Err(Error::NonFinite { n, value: d1 });
    }
    let stationary = eq.relative_residual(n) <= STATIONARY_RTOL;
    let status = if stationary && d2 > 0.0 {
        SolveStatus::Converged
    } else {
        SolveStatus::NotMinimum
    };
    Ok(SolveOutcome {
        n_star: n,
        weights: *w,
        second_derivative: d2,
        converged: status == SolveStatus::Converged,
        residual: d1.abs(),
        status,
    })
}

/// Dispatch on the model kind. Quadratic fits ignore the bracket.
pub fn solve(spec: &CostSpec, w: &Weights, bracket: (f64, f64)) -> Result<SolveOutcome> {
    match spec.model() {
        ModelKind::Quad => solve_quadratic(spec, w),
        ModelKind::QuadExp => solve_quadexp(spec, w, bracket),
    }
}

/// Round to two decimals, the precision used for reporting `n*`.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quad(c: [f64; 3]) -> FitResult {
        FitResult::with_coeffs(ModelKind::Quad, c.to_vec()).unwrap()
    }

    fn quadexp(c: [f64; 4]) -> FitResult {
        FitResult::with_coeffs(ModelKind::QuadExp, c.to_vec()).unwrap()
    }

    fn zero_quad() -> FitResult {
        quad([0.0, 0.0, 0.0])
    }

    #[test]
    fn cost_examples() {
        let spec = CostSpec::new(quad([1.0, 0.0, 0.0]), quad([0.101, -716.87, 2.47e6]), None).unwrap();
        assert_eq!(spec.cost(&Weights::new(1.0, 0.0, 0.0), 42.0).unwrap(), 42.0);
        assert_eq!(spec.cost(&Weights::new(0.0, 1.0, 0.0), 3.0).unwrap(), 9.0);
        assert_relative_eq!(
            spec.cost(&Weights::new(0.0, 0.0, 1.0), 1000.0).unwrap(),
            1_854_130.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn normalized_cost_rescales_terms() {
        let norm = Normalization {
            unique_chars: 10.0,
            unique_words: 110.0,
            delta_scale: 4.0,
            theta_scale: 8.0,
        };
        let spec = CostSpec::new(quad([0.0, 0.0, 4.0]), quad([0.0, 0.0, 8.0]), Some(norm)).unwrap();
        assert_relative_eq!(spec.cost(&Weights::new(1.0, 0.0, 0.0), 60.0).unwrap(), 0.5);
        assert_relative_eq!(spec.cost(&Weights::new(0.0, 1.0, 1.0), 60.0).unwrap(), 2.0);
    }

    #[test]
    fn parabola_vertex() {
        let spec = CostSpec::new(quad([1.0, -10.0, 30.0]), zero_quad(), None).unwrap();
        let out = solve_quadratic(&spec, &Weights::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(out.n_star, 5.0);
        assert_eq!(out.second_derivative, 2.0);
        assert!(out.converged);
        assert_eq!(out.residual, 0.0);
    }

    #[test]
    fn concave_model_is_not_a_minimum() {
        let spec = CostSpec::new(quad([-1.0, 0.0, 0.0]), zero_quad(), None).unwrap();
        let out = solve_quadratic(&spec, &Weights::new(0.0, 1.0, 0.0)).unwrap();
        assert!(!out.converged);
        assert_eq!(out.status, SolveStatus::NotMinimum);
        assert_eq!(out.second_derivative, -2.0);
    }

    #[test]
    fn affine_cost_is_flagged() {
        let spec = CostSpec::new(quad([0.0, 1.0, 0.0]), quad([0.0, -3.0, 0.0]), None).unwrap();
        let out = solve_quadratic(&spec, &Weights::new(0.2, 0.4, 0.4)).unwrap();
        assert_eq!(out.status, SolveStatus::AffineCost);
        // cancelling quadratic terms
        let spec = CostSpec::new(quad([1.0, 0.0, 0.0]), quad([-1.0, 0.0, 0.0]), None).unwrap();
        let out = solve_quadratic(&spec, &Weights::new(0.0, 0.5, 0.5)).unwrap();
        assert_eq!(out.status, SolveStatus::AffineCost);
    }

    #[test]
    fn negative_vertex_is_non_positive() {
        let spec = CostSpec::new(quad([1.0, 10.0, 0.0]), zero_quad(), None).unwrap();
        let out = solve_quadratic(&spec, &Weights::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(out.status, SolveStatus::NonPositive);
        assert_eq!(out.n_star, -5.0);
    }

    #[test]
    fn unconstrained_weights_closed_form() {
        let spec = CostSpec::new(quad([1.0, 0.0, 0.0]), quad([1.0, 0.0, 0.0]), None).unwrap();
        let out = solve_quadratic(&spec, &Weights::new(-10.0, 0.5, 0.5)).unwrap();
        assert_eq!(out.n_star, 5.0);
        assert!(out.converged);
    }

    #[test]
    fn quadexp_without_exponential_terms_is_a_parabola() {
        let spec = CostSpec::new(quadexp([0.0; 4]), quadexp([1.0, -20.0, 0.0, 0.0]), None).unwrap();
        let out = solve_quadexp(&spec, &Weights::new(0.0, 0.0, 1.0), (1.0, 500.0)).unwrap();
        assert!(out.converged, "{out:?}");
        assert!((out.n_star - 10.0).abs() < 1e-10);
        assert_eq!(out.status, SolveStatus::Converged);
    }

    #[test]
    fn quadexp_picks_the_minimum_not_the_maximum() {
        // C'(n) = (n - 10)(n - 40) / n² style: roots at a max and a min
        // cost = n + Θ with Θ' = 2·c3·n + c2 - c1·e^(1/n)/n²
        let spec = CostSpec::new(quadexp([0.0; 4]), quadexp([0.01, -3.0, 100.0, 0.0]), None).unwrap();
        let w = Weights::new(1.0, 0.0, 1.0);
        let out = solve_quadexp(&spec, &w, (1.0, 1000.0)).unwrap();
        assert!(out.converged);
        assert!(out.second_derivative > 0.0);
        let (d1, _) = spec.cost_derivatives(&w, out.n_star).unwrap();
        assert!(d1.abs() < 1e-8);
    }

    #[test]
    fn quadexp_fallback_without_sign_change() {
        // Θ' < 0 on the whole bracket and |f| has an interior minimum
        let spec = CostSpec::new(quadexp([0.0; 4]), quadexp([0.038, -312.0, 1.12e8, -1.11e8]), None).unwrap();
        let out = solve_quadexp(&spec, &Weights::new(0.0, 0.0, 1.0), (1.0, 500.0)).unwrap();
        assert!(!out.converged);
        assert_eq!(out.status, SolveStatus::MinAbsInterior);
        let eq = spec.stationary_equation(&Weights::new(0.0, 0.0, 1.0));
        assert!(eq.derivative(out.n_star).abs() <= 1e-6 * eq.scale(out.n_star));
    }

    #[test]
    fn quadexp_monotone_fallback_hits_boundary() {
        let spec = CostSpec::new(quadexp([0.0; 4]), quadexp([0.0, 1.0, 0.0, 0.0]), None).unwrap();
        let out = solve_quadexp(&spec, &Weights::new(0.0, 0.0, 1.0), (1.0, 500.0)).unwrap();
        assert_eq!(out.status, SolveStatus::BoundaryMinimum);
        assert_eq!(out.n_star, 1.0);
    }

    #[test]
    fn bracket_and_model_checks() {
        let qe = CostSpec::new(quadexp([0.0; 4]), quadexp([1.0, -20.0, 0.0, 0.0]), None).unwrap();
        let w = Weights::new(0.0, 0.0, 1.0);
        assert!(matches!(solve_quadexp(&qe, &w, (0.5, 10.0)), Err(Error::InvalidBracket { .. })));
        assert!(matches!(solve_quadexp(&qe, &w, (10.0, 10.0)), Err(Error::InvalidBracket { .. })));
        assert!(matches!(solve_quadratic(&qe, &w), Err(Error::WrongModel(_))));
        let q = CostSpec::new(quad([1.0, 0.0, 0.0]), zero_quad(), None).unwrap();
        assert!(matches!(solve_quadexp(&q, &w, (1.0, 10.0)), Err(Error::WrongModel(_))));
        assert!(matches!(
            CostSpec::new(quad([1.0, 0.0, 0.0]), quadexp([0.0; 4]), None),
            Err(Error::MixedModels)
        ));
        assert!(solve_quadratic(&q, &Weights::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn simplex_normalization() {
        let w = Weights::from_simplex([1.0, 1.0, 2.0]).unwrap();
        assert_eq!(w.as_array(), [0.25, 0.25, 0.5]);
        assert!(w.is_simplex());
        assert!(Weights::from_simplex([0.0, 0.0, 0.0]).is_err());
        assert!(Weights::from_simplex([-1.0, 1.0, 1.0]).is_err());
        assert!(!Weights::new(-10.0, 0.5, 0.5).is_simplex());
    }

    #[test]
    fn stationary_equation_derivatives_match_differences() {
        let eq = StationaryEquation {
            cubic: 0.03,
            quadratic: -2.0,
            exponential: 500.0,
        };
        for n in [2.0, 17.0, 300.0] {
            let h = 1e-4 * n;
            let d1 = (eq.value(n + h) - eq.value(n - h)) / (2.0 * h);
            let d2 = (eq.derivative(n + h) - eq.derivative(n - h)) / (2.0 * h);
            assert_relative_eq!(d1, eq.derivative(n), max_relative = 1e-6);
            assert_relative_eq!(d2, eq.second_derivative(n), max_relative = 1e-6);
        }
    }
}
