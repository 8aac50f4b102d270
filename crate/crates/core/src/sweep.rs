//! Cost-term curves Δ(n) and Θ(n) over a range of vocabulary sizes.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStats, StatsReport, WordCounts};
use crate::error::{Error, Result};
use crate::tokenizer::{BpeTrainer, TokenHistogram};

/// Most tokenizer states a default sweep samples.
pub const DEFAULT_MAX_POINTS: usize = 256;

/// A token-imbalance statistic computed from a histogram.
pub trait DeltaMeasure: Sync {
    fn measure(&self, hist: &TokenHistogram) -> Result<f64>;
}

/// Δ = (largest realized count) / (smallest realized count). Pieces that never
/// occur are ignored.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxMinRatio;

impl DeltaMeasure for MaxMinRatio {
    fn measure(&self, hist: &TokenHistogram) -> Result<f64> {
        delta_of(hist)
    }
}

pub fn delta_of(hist: &TokenHistogram) -> Result<f64> {
    match (hist.max_count(), hist.min_realized()) {
        (Some(max), Some(min)) => Ok(max as f64 / min as f64),
        _ => Err(Error::EmptyHistogram),
    }
}

/// Θ: total tokens emitted.
pub fn theta_of(hist: &TokenHistogram) -> Result<u64> {
    match hist.total() {
        0 => Err(Error::EmptyHistogram),
        total => Ok(total),
    }
}

/// One row of the sweep CSV. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: u64,
    pub delta: f64,
    pub theta: u64,
    pub n_norm: f64,
    pub delta_norm: f64,
    pub theta_norm: f64,
}

impl SweepPoint {
    pub fn new(n: u64, delta: f64, theta: u64, stats: &CorpusStats) -> Self {
        SweepPoint {
            n,
            delta,
            theta,
            n_norm: normalize_n(n as f64, stats),
            delta_norm: delta / stats.top_char_freq as f64,
            theta_norm: theta as f64 / stats.chars as f64,
        }
    }
}

/// (n - c_u) / (w_u - c_u); zero when the span is empty.
pub fn normalize_n(n: f64, stats: &CorpusStats) -> f64 {
    let span = stats.unique_words as f64 - stats.unique_chars as f64;
    if span == 0.0 {
        0.0
    } else {
        (n - stats.unique_chars as f64) / span
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepWarning {
    pub n: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub points: Vec<SweepPoint>,
    pub stats: CorpusStats,
    pub warnings: Vec<SweepWarning>,
}

/// JSON sidecar written next to the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSidecar {
    pub stats: StatsReport,
    pub n_min: u64,
    pub n_max: u64,
    pub step: u64,
    pub warnings: Vec<SweepWarning>,
}

/// Step that keeps a sweep over `[n_min, n_max]` within
/// [`DEFAULT_MAX_POINTS`] samples.
pub fn default_step(n_min: usize, n_max: usize) -> usize {
    let span = n_max.saturating_sub(n_min);
    span.div_ceil(DEFAULT_MAX_POINTS - 1).max(1)
}

/// The sampled sizes: `n_min, n_min + step, ...`, always ending at `n_max`.
pub fn sample_sizes(n_min: usize, n_max: usize, step: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = (n_min..=n_max).step_by(step).collect();
    if sizes.last() != Some(&n_max) {
        sizes.push(n_max);
    }
    sizes
}

pub fn run_sweep(text: &str, n_min: usize, n_max: usize, step: usize) -> Result<SweepTable> {
    run_sweep_words(&WordCounts::from_text(text), n_min, n_max, step, &MaxMinRatio)
}

/// Sweep with a custom Δ measure.
///
/// Merges are nested across vocabulary sizes (the model for `n1 < n2` is a
/// prefix of the model for `n2`), so a single incremental training pass
/// visits exactly the models that independent trainings at each sampled `n`
/// would produce.
pub fn run_sweep_words(
    words: &WordCounts,
    n_min: usize,
    n_max: usize,
    step: usize,
    measure: &dyn DeltaMeasure,
) -> Result<SweepTable> {
    if step == 0 {
        return Err(Error::InvalidArgument("step must be at least 1".into()));
    }
    if n_min > n_max {
        return Err(Error::InvalidArgument(format!("n_min {n_min} exceeds n_max {n_max}")));
    }
    let stats = words.stats()?;
    let mut trainer = BpeTrainer::new(words)?;
    if n_min < trainer.base_len() {
        return Err(Error::VocabTooSmall {
            requested: n_min,
            unique_chars: trainer.base_len(),
        });
    }

    let mut points: Vec<SweepPoint> = Vec::new();
    let mut warnings = Vec::new();
    for n in sample_sizes(n_min, n_max, step) {
        if !trainer.advance_to(n) {
            let reached = trainer.vocab_size() as u64;
            warnings.push(SweepWarning {
                n: n as u64,
                message: format!("vocabulary exhausted at {reached} pieces; larger sizes skipped"),
            });
            if points.last().is_none_or(|p| p.n < reached) {
                points.push(point_at(&trainer, reached, &stats, measure)?);
            }
            break;
        }
        points.push(point_at(&trainer, n as u64, &stats, measure)?);
    }
    Ok(SweepTable { points, stats, warnings })
}

fn point_at(trainer: &BpeTrainer, n: u64, stats: &CorpusStats, measure: &dyn DeltaMeasure) -> Result<SweepPoint> {
    let hist = trainer.histogram();
    Ok(SweepPoint::new(n, measure.measure(&hist)?, theta_of(&hist)?, stats))
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_points_csv(&self.points, out)
    }

    pub fn sidecar(&self, n_min: usize, n_max: usize, step: usize) -> SweepSidecar {
        SweepSidecar {
            stats: self.stats.into(),
            n_min: n_min as u64,
            n_max: n_max as u64,
            step: step as u64,
            warnings: self.warnings.clone(),
        }
    }

    /// `(n, delta)` or `(n, delta_norm)` pairs, ready for fitting.
    pub fn delta_series(&self, normalized: bool) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (p.n as f64, if normalized { p.delta_norm } else { p.delta }))
            .collect()
    }

    pub fn theta_series(&self, normalized: bool) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (p.n as f64, if normalized { p.theta_norm } else { p.theta as f64 }))
            .collect()
    }
}

pub fn write_points_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for p in points {
        writer.serialize(p)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<SweepPoint>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    let expected = ["n", "delta", "theta", "n_norm", "delta_norm", "theta_norm"];
    if headers.iter().ne(expected) {
        return Err(Error::Malformed(format!("unexpected sweep header {headers:?}")));
    }
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(counts: &[u64]) -> TokenHistogram {
        TokenHistogram { counts: counts.to_vec() }
    }

    #[test]
    fn delta_is_max_over_min() {
        assert_eq!(delta_of(&hist(&[10, 2])).unwrap(), 5.0);
        assert_eq!(delta_of(&hist(&[7])).unwrap(), 1.0);
        assert_eq!(delta_of(&hist(&[4, 4])).unwrap(), 1.0);
    }

    #[test]
    fn unrealized_tokens_are_ignored() {
        assert_eq!(delta_of(&hist(&[0, 6, 3, 0])).unwrap(), 2.0);
    }

    #[test]
    fn empty_histograms_error() {
        assert!(matches!(delta_of(&hist(&[])), Err(Error::EmptyHistogram)));
        assert!(matches!(delta_of(&hist(&[0, 0])), Err(Error::EmptyHistogram)));
        assert!(matches!(theta_of(&hist(&[0])), Err(Error::EmptyHistogram)));
    }

    #[test]
    fn theta_sums_counts() {
        assert_eq!(theta_of(&hist(&[4])).unwrap(), 4);
        assert_eq!(theta_of(&hist(&[0, 2])).unwrap(), 2);
    }

    #[test]
    fn abab_sweep() {
        let table = run_sweep("abab abab", 2, 3, 1).unwrap();
        assert_eq!(table.points.len(), 2);
        let first = table.points[0];
        assert_eq!((first.n, first.delta, first.theta), (2, 1.0, 8));
        assert_eq!(first.theta_norm, 1.0);
        let second = table.points[1];
        assert_eq!((second.n, second.delta, second.theta), (3, 1.0, 4));
        assert_eq!(second.theta_norm, 0.5);
    }

    #[test]
    fn single_point_at_alphabet_size() {
        let table = run_sweep("hello world\nhello there\n", 8, 8, 1).unwrap();
        assert_eq!(table.points.len(), 1);
        assert_eq!(table.points[0].theta, table.stats.chars);
        assert_eq!(table.points[0].theta_norm, 1.0);
        assert_eq!(table.points[0].n_norm, 0.0);
    }

    #[test]
    fn exhaustion_is_a_warning_not_an_error() {
        let table = run_sweep("ab ab", 2, 10, 1).unwrap();
        assert_eq!(table.points.iter().map(|p| p.n).collect::<Vec<_>>(), [2, 3]);
        assert_eq!(table.warnings.len(), 1);
        assert_eq!(table.warnings[0].n, 4);
    }

    #[test]
    fn sampling_covers_both_ends() {
        assert_eq!(sample_sizes(28, 40, 5), [28, 33, 38, 40]);
        assert_eq!(sample_sizes(5, 5, 1), [5]);
        assert!(sample_sizes(28, 5000, default_step(28, 5000)).len() <= DEFAULT_MAX_POINTS);
        assert_eq!(default_step(10, 12), 1);
    }

    #[test]
    fn bad_ranges_are_rejected() {
        assert!(run_sweep("abc", 3, 2, 1).is_err());
        assert!(run_sweep("abc", 3, 4, 0).is_err());
        assert!(matches!(run_sweep("abc", 2, 4, 1), Err(Error::VocabTooSmall { .. })));
    }

    #[test]
    fn csv_header_and_round_trip() {
        let table = run_sweep("abab abab", 2, 3, 1).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,delta,theta,n_norm,delta_norm,theta_norm\n"));
        assert_eq!(read_points_csv(buf.as_slice()).unwrap(), table.points);
    }

    #[test]
    fn wrong_csv_header_is_rejected() {
        let err = read_points_csv("n,theta\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
    }
}
