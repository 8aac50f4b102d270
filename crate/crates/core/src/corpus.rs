//! Corpus ingestion and the scalar statistics that bound the cost terms.
//!
//! Text is lowercased and split on runs of Unicode whitespace. Blank lines are
//! not sentences. The primary character count `chars` covers word characters
//! only; the with-whitespace variants in [`StatsReport`] count each sentence as
//! its words joined by single spaces.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the counting convention used for [`CorpusStats::chars`].
pub const CHAR_CONVENTION: &str = "lowercased word characters, whitespace excluded";

/// The six corpus statistics: sentence, word and character counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sentences: u64,
    pub words: u64,
    pub unique_words: u64,
    pub chars: u64,
    pub unique_chars: u64,
    pub top_char_freq: u64,
}

/// [`CorpusStats`] plus the alternative whitespace-inclusive counts, as written
/// by the `stats` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    #[serde(flatten)]
    pub stats: CorpusStats,
    pub char_convention: String,
    pub chars_with_whitespace: u64,
    pub unique_chars_with_whitespace: u64,
    pub top_char_freq_with_whitespace: u64,
}

impl From<CorpusStats> for StatsReport {
    fn from(stats: CorpusStats) -> Self {
        // each sentence contributes (words - 1) separating spaces
        let spaces = stats.words - stats.sentences;
        StatsReport {
            stats,
            char_convention: CHAR_CONVENTION.to_string(),
            chars_with_whitespace: stats.chars + spaces,
            unique_chars_with_whitespace: stats.unique_chars + u64::from(spaces > 0),
            top_char_freq_with_whitespace: stats.top_char_freq.max(spaces),
        }
    }
}

/// Lowercased word-frequency table of a corpus, in lexicographic word order.
#[derive(Debug, Clone, Default)]
pub struct WordCounts {
    pub sentences: u64,
    pub words: BTreeMap<String, u64>,
}

impl WordCounts {
    pub fn from_text(text: &str) -> Self {
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut sentences = 0;
        for line in text.lines() {
            let lowered = line.to_lowercase();
            let mut any = false;
            for word in lowered.split_whitespace() {
                any = true;
                *counts.entry(word.to_string()).or_default() += 1;
            }
            if any {
                sentences += 1;
            }
        }
        WordCounts {
            sentences,
            words: counts.into_iter().collect(),
        }
    }

    pub fn total_words(&self) -> u64 {
        self.words.values().sum()
    }

    /// Character frequencies, weighted by word frequency.
    pub fn char_counts(&self) -> BTreeMap<char, u64> {
        let mut chars = BTreeMap::new();
        for (word, &freq) in &self.words {
            for ch in word.chars() {
                *chars.entry(ch).or_default() += freq;
            }
        }
        chars
    }

    pub fn stats(&self) -> Result<CorpusStats> {
        let chars = self.char_counts();
        if chars.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(CorpusStats {
            sentences: self.sentences,
            words: self.total_words(),
            unique_words: self.words.len() as u64,
            chars: chars.values().sum(),
            unique_chars: chars.len() as u64,
            top_char_freq: chars.values().copied().max().unwrap_or(0),
        })
    }
}

/// Decode raw bytes as UTF-8, reporting the offset of the first invalid byte.
pub fn decode(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::InvalidEncoding {
        offset: e.valid_up_to(),
    })
}

pub fn compute_stats(text: &str) -> Result<CorpusStats> {
    WordCounts::from_text(text).stats()
}

pub fn compute_stats_bytes(bytes: &[u8]) -> Result<CorpusStats> {
    compute_stats(decode(bytes)?)
}
