#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vocabsize::{CostSpec, Weights};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn fixture(name: &str) -> CostSpec {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Zipf-distributed words over `a..=z` plus a handful of accented letters,
/// one sentence per line, until the text reaches `bytes` bytes.
pub fn synthetic_corpus(bytes: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet: Vec<char> = ('a'..='z').chain(['é', 'ö', '\'']).collect();
    let lexicon: Vec<String> = (0..5000)
        .map(|_| {
            let len = rng.random_range(1..=9);
            (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
        })
        .collect();
    // cumulative Zipf(1) weights
    let mut cdf = Vec::with_capacity(lexicon.len());
    let mut acc = 0.0;
    for rank in 1..=lexicon.len() {
        acc += 1.0 / rank as f64;
        cdf.push(acc);
    }
    let mut out = String::with_capacity(bytes + 128);
    while out.len() < bytes {
        let words = rng.random_range(3..=18);
        for i in 0..words {
            let u = rng.random::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c < u).min(lexicon.len() - 1);
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&lexicon[idx]);
        }
        out.push('\n');
    }
    out
}

/// Integer argmin of `f` over `[lo, hi]` by exhaustive evaluation.
pub fn grid_argmin(lo: i64, hi: i64, f: impl Fn(f64) -> f64) -> f64 {
    let mut best = (f64::INFINITY, lo as f64);
    for n in lo..=hi {
        let v = f(n as f64);
        if v < best.0 {
            best = (v, n as f64);
        }
    }
    best.1
}

/// Central differences `(f', f'')` with step `h`.
pub fn central_differences(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let (up, mid, down) = (f(x + h), f(x), f(x - h));
    ((up - down) / (2.0 * h), (up - 2.0 * mid + down) / (h * h))
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `2·(a2·δ2 + a3·θ2)` and `a1 + a2·δ1 + a3·θ1` for raw quadratic fits,
/// written out from the coefficients directly.
pub fn quad_conditions(spec: &CostSpec, w: &Weights) -> (f64, f64) {
    let d = &spec.delta.coeffs;
    let t = &spec.theta.coeffs;
    (2.0 * (w.a2 * d[0] + w.a3 * t[0]), w.a1 + w.a2 * d[1] + w.a3 * t[1])
}

/// Second-order condition for the quadratic-plus-exponential cost in its
/// reference form `Σ αk (2·c3 + 3·c1·e^(1/n)/n⁴)`. It agrees with the true
/// `C''` only at `n = 1`, so the suites check both.
pub fn reference_quadexp_condition(spec: &CostSpec, w: &Weights, n: f64) -> f64 {
    let d = &spec.delta.coeffs;
    let t = &spec.theta.coeffs;
    let e = (1.0 / n).exp() / n.powi(4);
    w.a2 * (2.0 * d[0] + 3.0 * d[2] * e) + w.a3 * (2.0 * t[0] + 3.0 * t[2] * e)
}
