//! Greedy pair-merge (BPE) tokenizer with an exact target vocabulary size.
//!
//! Words are segmented independently and no boundary marker is added, so a
//! model of size `c_u` (one piece per distinct character) emits exactly one
//! token per corpus character. Merge selection takes the most frequent
//! adjacent pair, breaking ties by the lexicographically smallest
//! `(left, right)` piece pair.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::corpus::WordCounts;
use crate::error::{Error, Result};

type Pair = (u32, u32);

/// An ordered sub-word vocabulary plus the merge rules that produced it.
///
/// The token id of a piece is its index in [`pieces`](Self::pieces). The
/// leading pieces are the single-character base alphabet, sorted by code
/// point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerModel {
    pieces: Vec<String>,
    merges: Vec<Merge>,
    base_len: usize,
    requested: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Merge {
    pub left: u32,
    pub right: u32,
    pub result: u32,
}

impl TokenizerModel {
    pub fn size(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[String] {
        &self.pieces
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Number of single-character base pieces.
    pub fn base_len(&self) -> usize {
        self.base_len
    }

    /// The vocabulary size that was asked for at training time.
    pub fn requested_size(&self) -> usize {
        self.requested
    }

    /// True when the corpus ran out of pairs before reaching the requested size.
    pub fn exhausted(&self) -> bool {
        self.pieces.len() < self.requested
    }

    pub fn merge_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.merges
            .iter()
            .map(|m| (self.pieces[m.left as usize].as_str(), self.pieces[m.right as usize].as_str()))
    }

    /// Longest piece, in characters.
    pub fn longest_piece(&self) -> usize {
        self.pieces.iter().map(|p| p.chars().count()).max().unwrap_or(0)
    }

    /// Serialize as text: a header line `bpe-vocab <n> <merges>`, one piece per
    /// line, then one `left right` merge per line.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "bpe-vocab {} {}", self.pieces.len(), self.merges.len())?;
        for piece in &self.pieces {
            writeln!(out, "{piece}")?;
        }
        for (left, right) in self.merge_pairs() {
            writeln!(out, "{left} {right}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Malformed("empty model file".into()))??;
        let mut fields = header.split(' ');
        let (n, m) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some("bpe-vocab"), Some(n), Some(m), None) => (
                n.parse::<usize>().map_err(|_| Error::Malformed(format!("bad size in {header:?}")))?,
                m.parse::<usize>().map_err(|_| Error::Malformed(format!("bad merge count in {header:?}")))?,
            ),
            _ => return Err(Error::Malformed(format!("bad header {header:?}"))),
        };
        let mut pieces = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        for _ in 0..n {
            let piece = lines.next().ok_or_else(|| Error::Malformed("truncated piece list".into()))??;
            if piece.is_empty() || piece.chars().any(char::is_whitespace) {
                return Err(Error::Malformed(format!("invalid piece {piece:?}")));
            }
            if index.insert(piece.clone(), pieces.len() as u32).is_some() {
                return Err(Error::Malformed(format!("duplicate piece {piece:?}")));
            }
            pieces.push(piece);
        }
        let base_len = pieces.iter().take_while(|p| p.chars().count() == 1).count();
        let mut merges = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines.next().ok_or_else(|| Error::Malformed("truncated merge list".into()))??;
            let (l, r) = line
                .split_once(' ')
                .ok_or_else(|| Error::Malformed(format!("bad merge line {line:?}")))?;
            let lookup = |s: &str| {
                index
                    .get(s)
                    .copied()
                    .ok_or_else(|| Error::Malformed(format!("merge refers to unknown piece {s:?}")))
            };
            let left = lookup(l)?;
            let right = lookup(r)?;
            let result = lookup(&format!("{l}{r}"))?;
            merges.push(Merge { left, right, result });
        }
        Ok(TokenizerModel {
            pieces,
            merges,
            base_len,
            requested: n,
        })
    }

    /// Segment every word of `text` and count the emitted tokens.
    pub fn segment(&self, text: &str) -> Result<TokenHistogram> {
        self.segment_words(&WordCounts::from_text(text))
    }

    pub fn segment_words(&self, words: &WordCounts) -> Result<TokenHistogram> {
        let segmenter = Segmenter::new(self);
        let mut counts = vec![0u64; self.pieces.len()];
        for (word, &freq) in &words.words {
            for id in segmenter.segment_word(word)? {
                counts[id as usize] += freq;
            }
        }
        Ok(TokenHistogram { counts })
    }

    /// Segment a single word into piece ids.
    pub fn encode_word(&self, word: &str) -> Result<Vec<u32>> {
        Segmenter::new(self).segment_word(word)
    }
}

struct Segmenter<'a> {
    model: &'a TokenizerModel,
    alphabet: HashMap<char, u32>,
    ranks: HashMap<Pair, (usize, u32)>,
}

impl<'a> Segmenter<'a> {
    fn new(model: &'a TokenizerModel) -> Self {
        let alphabet = model.pieces[..model.base_len]
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.chars().next().map(|c| (c, i as u32)))
            .collect();
        let mut ranks = HashMap::with_capacity(model.merges.len());
        for (rank, m) in model.merges.iter().enumerate() {
            ranks.entry((m.left, m.right)).or_insert((rank, m.result));
        }
        Segmenter { model, alphabet, ranks }
    }

    // Applying the lowest-ranked present merge first is equivalent to replaying
    // the merge list in order: a merge can only create pairs of higher rank.
    fn segment_word(&self, word: &str) -> Result<Vec<u32>> {
        let mut symbols = word
            .chars()
            .map(|c| self.alphabet.get(&c).copied().ok_or(Error::OutOfAlphabet(c)))
            .collect::<Result<Vec<_>>>()?;
        loop {
            let best = symbols
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0], w[1])).map(|&(rank, result)| (rank, (w[0], w[1]), result)))
                .min_by_key(|&(rank, _, _)| rank);
            let Some((_, pair, result)) = best else { break };
            merge_in_place(&mut symbols, pair, result);
        }
        debug_assert!(symbols.iter().all(|&s| (s as usize) < self.model.pieces.len()));
        Ok(symbols)
    }
}

/// Replace every non-overlapping occurrence of `pair`, scanning left to right.
/// Returns the number of replacements.
fn merge_in_place(symbols: &mut Vec<u32>, pair: Pair, result: u32) -> usize {
    let mut merged = 0;
    let mut write = 0;
    let mut read = 0;
    while read < symbols.len() {
        if read + 1 < symbols.len() && symbols[read] == pair.0 && symbols[read + 1] == pair.1 {
            symbols[write] = result;
            read += 2;
            merged += 1;
        } else {
            symbols[write] = symbols[read];
            read += 1;
        }
        write += 1;
    }
    symbols.truncate(write);
    merged
}

/// Occurrence count of every token id over a segmented corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenHistogram {
    pub counts: Vec<u64>,
}

impl TokenHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts of tokens that occur at least once.
    pub fn realized(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.iter().copied().filter(|&c| c > 0)
    }

    pub fn max_count(&self) -> Option<u64> {
        self.realized().max()
    }

    pub fn min_realized(&self) -> Option<u64> {
        self.realized().min()
    }

    /// Total characters covered: sum of count times piece length.
    pub fn char_mass(&self, model: &TokenizerModel) -> u64 {
        self.counts
            .iter()
            .zip(model.pieces())
            .map(|(&c, p)| c * p.chars().count() as u64)
            .sum()
    }

    /// Non-zero counts keyed by piece string.
    pub fn by_piece<'m>(&self, model: &'m TokenizerModel) -> BTreeMap<&'m str, u64> {
        self.counts
            .iter()
            .zip(model.pieces())
            .filter(|(&c, _)| c > 0)
            .map(|(&c, p)| (p.as_str(), c))
            .collect()
    }
}

#[derive(Debug, PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: Reverse<String>,
    right: Reverse<String>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| self.left.cmp(&other.left))
            .then_with(|| self.right.cmp(&other.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Incremental BPE trainer.
///
/// Merges are applied one at a time, so the state after reaching size `n` is
/// exactly the model trained for `n`. The sweep uses this to read off every
/// sampled vocabulary size from a single training pass.
pub struct BpeTrainer {
    words: Vec<(Vec<u32>, u64)>,
    pieces: Vec<String>,
    piece_index: HashMap<String, u32>,
    base_len: usize,
    merges: Vec<Merge>,
    pair_counts: HashMap<Pair, u64>,
    pair_words: HashMap<Pair, HashSet<usize>>,
    queue: BinaryHeap<Candidate>,
    token_counts: Vec<u64>,
}

impl BpeTrainer {
    pub fn new(words: &WordCounts) -> Result<Self> {
        let alphabet: Vec<char> = words.char_counts().into_keys().collect();
        if alphabet.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let pieces: Vec<String> = alphabet.iter().map(|c| c.to_string()).collect();
        let piece_index: HashMap<String, u32> =
            pieces.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        let char_id: HashMap<char, u32> = alphabet.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();

        let mut token_counts = vec![0u64; pieces.len()];
        let mut encoded = Vec::with_capacity(words.words.len());
        for (word, &freq) in &words.words {
            let symbols: Vec<u32> = word.chars().map(|c| char_id[&c]).collect();
            for &s in &symbols {
                token_counts[s as usize] += freq;
            }
            encoded.push((symbols, freq));
        }

        let mut trainer = BpeTrainer {
            words: encoded,
            base_len: pieces.len(),
            pieces,
            piece_index,
            merges: Vec::new(),
            pair_counts: HashMap::new(),
            pair_words: HashMap::new(),
            queue: BinaryHeap::new(),
            token_counts,
        };
        for (i, (symbols, freq)) in trainer.words.iter().enumerate() {
            for w in symbols.windows(2) {
                let pair = (w[0], w[1]);
                *trainer.pair_counts.entry(pair).or_default() += freq;
                trainer.pair_words.entry(pair).or_default().insert(i);
            }
        }
        let pairs: Vec<(Pair, u64)> = trainer.pair_counts.iter().map(|(&p, &c)| (p, c)).collect();
        for (pair, count) in pairs {
            trainer.push(pair, count);
        }
        Ok(trainer)
    }

    pub fn vocab_size(&self) -> usize {
        self.pieces.len()
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }

    fn push(&mut self, pair: Pair, count: u64) {
        self.queue.push(Candidate {
            count,
            left: Reverse(self.pieces[pair.0 as usize].clone()),
            right: Reverse(self.pieces[pair.1 as usize].clone()),
            pair,
        });
    }

    fn pop_best(&mut self) -> Option<Pair> {
        while let Some(top) = self.queue.pop() {
            let current = self.pair_counts.get(&top.pair).copied().unwrap_or(0);
            if current == 0 {
                continue;
            }
            if current != top.count {
                self.push(top.pair, current);
                continue;
            }
            return Some(top.pair);
        }
        None
    }

    /// Apply the next merge. Returns false once no adjacent pair remains.
    pub fn step(&mut self) -> bool {
        let Some(pair) = self.pop_best() else {
            return false;
        };
        let merged = format!("{}{}", self.pieces[pair.0 as usize], self.pieces[pair.1 as usize]);
        let result = match self.piece_index.entry(merged) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                let id = self.pieces.len() as u32;
                self.pieces.push(e.key().clone());
                self.token_counts.push(0);
                e.insert(id);
                id
            }
        };
        self.merges.push(Merge {
            left: pair.0,
            right: pair.1,
            result,
        });

        let mut touched: Vec<usize> = self.pair_words.remove(&pair).unwrap_or_default().into_iter().collect();
        touched.sort_unstable();
        let mut delta: HashMap<Pair, i64> = HashMap::new();
        for wi in touched {
            let (symbols, freq) = &mut self.words[wi];
            let freq = *freq;
            if !symbols.windows(2).any(|w| (w[0], w[1]) == pair) {
                continue;
            }
            for w in symbols.windows(2) {
                *delta.entry((w[0], w[1])).or_default() -= freq as i64;
            }
            let n = merge_in_place(symbols, pair, result) as u64;
            for w in symbols.windows(2) {
                let p = (w[0], w[1]);
                *delta.entry(p).or_default() += freq as i64;
                self.pair_words.entry(p).or_default().insert(wi);
            }
            self.token_counts[pair.0 as usize] -= n * freq;
            self.token_counts[pair.1 as usize] -= n * freq;
            self.token_counts[result as usize] += n * freq;
        }

        let mut raised = Vec::new();
        for (p, d) in delta {
            if d == 0 {
                continue;
            }
            let count = self.pair_counts.entry(p).or_default();
            *count = (*count as i64 + d) as u64;
            if *count == 0 {
                self.pair_counts.remove(&p);
                self.pair_words.remove(&p);
            } else if d > 0 {
                raised.push((p, *count));
            }
        }
        for (p, c) in raised {
            self.push(p, c);
        }
        true
    }

    /// Merge until the vocabulary holds `n` pieces. Returns false if the
    /// corpus was exhausted first.
    pub fn advance_to(&mut self, n: usize) -> bool {
        while self.pieces.len() < n {
            if !self.step() {
                return false;
            }
        }
        true
    }

    /// Token counts of the training corpus under the current merges.
    pub fn histogram(&self) -> TokenHistogram {
        TokenHistogram {
            counts: self.token_counts.clone(),
        }
    }

    pub fn model(&self, requested: usize) -> TokenizerModel {
        TokenizerModel {
            pieces: self.pieces.clone(),
            merges: self.merges.clone(),
            base_len: self.base_len,
            requested,
        }
    }
}

/// Train a tokenizer with `n` pieces on `words`.
///
/// Fails if `n` is below the number of distinct characters. If the corpus
/// runs out of pairs first, the largest attainable model is returned and
/// [`TokenizerModel::exhausted`] is set.
pub fn train_words(words: &WordCounts, n: usize) -> Result<TokenizerModel> {
    let mut trainer = BpeTrainer::new(words)?;
    if n < trainer.base_len() {
        return Err(Error::VocabTooSmall {
            requested: n,
            unique_chars: trainer.base_len(),
        });
    }
    trainer.advance_to(n);
    Ok(trainer.model(n))
}

pub fn train(text: &str, n: usize) -> Result<TokenizerModel> {
    train_words(&WordCounts::from_text(text), n)
}
