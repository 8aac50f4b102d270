//! Safeguarded Newton iteration on a sign-changing bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once the bracket is narrower than `xtol * max(1, |x|)`.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            xtol: 1e-14,
            max_iter: 200,
        }
    }
}

/// Find a root of `f` in `[lo, hi]`, where `f` returns `(value, derivative)`
/// and `f(lo)`, `f(hi)` differ in sign (or one is zero).
///
/// Newton steps are taken from the current iterate; a step that leaves the
/// bracket, or fails to halve it, is replaced by bisection.
pub fn newton_bisect<F>(f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidBracket { low: lo, high: hi });
    }
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    for (x, fx) in [(lo, flo), (hi, fhi)] {
        if !fx.is_finite() {
            return Err(Error::NonFinite { n: x, value: fx });
        }
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidBracket { low: lo, high: hi });
    }

    // keep f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut prev_width = (hi - lo).abs();
    for _ in 0..opts.max_iter {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(Error::NonFinite { n: x, value: fx });
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        let (a, b) = if neg < pos { (neg, pos) } else { (pos, neg) };
        let width = b - a;
        if width <= opts.xtol * x.abs().max(1.0) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        x = if dfx.is_finite() && dfx != 0.0 && newton > a && newton < b && (newton - x).abs() < 0.5 * prev_width
        {
            newton
        } else {
            0.5 * (a + b)
        };
        prev_width = width;
    }
    Ok(x)
}
