//! Least-squares fits of the two smooth model families:
//!
//! * `Quad`: `a2·n² + a1·n + a0`
//! * `QuadExp`: `b3·n² + b2·n + b1·e^(1/n) + b0`
//!
//! Both are linear in their coefficients. The design matrix has its columns
//! scaled to unit norm and is solved by Householder QR, since `n²` and `n`
//! differ by orders of magnitude over typical vocabulary ranges and
//! `e^(1/n)` is nearly parallel to the constant column for large `n`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Quad,
    QuadExp,
}

impl ModelKind {
    pub fn arity(self) -> usize {
        match self {
            ModelKind::Quad => 3,
            ModelKind::QuadExp => 4,
        }
    }

    fn basis(self, n: f64) -> [f64; 4] {
        match self {
            ModelKind::Quad => [n * n, n, 1.0, 0.0],
            ModelKind::QuadExp => [n * n, n, (1.0 / n).exp(), 1.0],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Quad => "quad",
            ModelKind::QuadExp => "quad_exp",
        })
    }
}

/// A fitted model: coefficients from the highest power down, as listed in
/// the module docs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelKind,
    pub coeffs: Vec<f64>,
    /// Absent when the coefficients were supplied rather than fitted.
    #[serde(default)]
    pub r_squared: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[f64; 2]>,
}

impl FitResult {
    /// A fit with known coefficients, e.g. read from a fits file.
    pub fn with_coeffs(model: ModelKind, coeffs: Vec<f64>) -> Result<Self> {
        let fit = FitResult {
            model,
            coeffs,
            r_squared: None,
            n_range: None,
        };
        fit.validate()?;
        Ok(fit)
    }

    pub fn validate(&self) -> Result<()> {
        if self.coeffs.len() != self.model.arity() {
            return Err(Error::Malformed(format!(
                "{} model needs {} coefficients, got {}",
                self.model,
                self.model.arity(),
                self.coeffs.len()
            )));
        }
        if let Some(c) = self.coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Malformed(format!("non-finite coefficient {c}")));
        }
        Ok(())
    }

    fn check_domain(&self, n: f64) -> Result<()> {
        if self.model == ModelKind::QuadExp && n.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain(n));
        }
        Ok(())
    }

    pub fn evaluate(&self, n: f64) -> Result<f64> {
        self.check_domain(n)?;
        let c = &self.coeffs;
        Ok(match self.model {
            ModelKind::Quad => (c[0] * n + c[1]) * n + c[2],
            ModelKind::QuadExp => (c[0] * n + c[1]) * n + c[2] * (1.0 / n).exp() + c[3],
        })
    }

    /// First and second derivatives in `n`.
    pub fn derivatives(&self, n: f64) -> Result<(f64, f64)> {
        self.check_domain(n)?;
        let c = &self.coeffs;
        Ok(match self.model {
            ModelKind::Quad => (2.0 * c[0] * n + c[1], 2.0 * c[0]),
            ModelKind::QuadExp => {
                let e = (1.0 / n).exp();
                let n2 = n * n;
                (
                    2.0 * c[0] * n + c[1] - c[2] * e / n2,
                    2.0 * c[0] + c[2] * e * (2.0 * n + 1.0) / (n2 * n2),
                )
            }
        })
    }

    /// Coefficients of the polynomial and exponential parts as
    /// `(quadratic, linear, exponential)`; the exponential one is zero for `Quad`.
    pub fn shape_coeffs(&self) -> (f64, f64, f64) {
        match self.model {
            ModelKind::Quad => (self.coeffs[0], self.coeffs[1], 0.0),
            ModelKind::QuadExp => (self.coeffs[0], self.coeffs[1], self.coeffs[2]),
        }
    }
}

/// Least-squares fit of `model` to `(n, y)` points.
pub fn fit(points: &[(f64, f64)], model: ModelKind) -> Result<FitResult> {
    let k = model.arity();
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < k {
        return Err(Error::InsufficientPoints {
            needed: k,
            got: distinct.len(),
        });
    }
    for &(n, y) in points {
        if !n.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite { n, value: y });
        }
        if model == ModelKind::QuadExp && n <= 0.0 {
            return Err(Error::Domain(n));
        }
    }

    let m = points.len();
    let mut design = DMatrix::from_fn(m, k, |i, j| model.basis(points[i].0)[j]);
    let mut scales = vec![0.0; k];
    for (j, scale) in scales.iter_mut().enumerate() {
        let norm = design.column(j).norm();
        if norm == 0.0 {
            return Err(Error::RankDeficient);
        }
        design.column_mut(j).scale_mut(1.0 / norm);
        *scale = norm;
    }
    let y = DVector::from_iterator(m, points.iter().map(|p| p.1));

    let qr = design.qr();
    let r = qr.r();
    let max_diag = r.diagonal().iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    if r.diagonal().iter().any(|d| d.abs() <= 1e-12 * max_diag) {
        return Err(Error::RankDeficient);
    }
    let qty = qr.q().transpose() * &y;
    let scaled = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;
    let coeffs: Vec<f64> = scaled.iter().zip(&scales).map(|(c, s)| c / s).collect();

    let mut fitted = FitResult {
        model,
        coeffs,
        r_squared: None,
        n_range: Some([distinct[0], distinct[distinct.len() - 1]]),
    };
    fitted.r_squared = Some(r_squared(&fitted, points)?);
    Ok(fitted)
}

/// `1 - SS_res / SS_tot`. A constant target is reported as 1 when the fit
/// reproduces it and 0 otherwise.
pub fn r_squared(fit: &FitResult, points: &[(f64, f64)]) -> Result<f64> {
    let mean = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(n, y) in points {
        let r = y - fit.evaluate(n)?;
        ss_res += r * r;
        ss_tot += (y - mean) * (y - mean);
    }
    if ss_tot == 0.0 {
        let scale = mean.abs().max(f64::MIN_POSITIVE);
        return Ok(if ss_res.sqrt() <= 1e-12 * scale * (points.len() as f64).sqrt() { 1.0 } else { 0.0 });
    }
    Ok(1.0 - ss_res / ss_tot)
}
