//! Byte-pair-encoding vocabulary induction over word frequencies.
//!
//! Every word is split into units of the requested level; the first unit is
//! kept bare and the rest carry the continuation marker. The most frequent
//! adjacent pair is merged until the target size is reached or no pair occurs
//! at least `min_pair_freq` times. Ties go to the lexicographically smallest
//! `(left, right)`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use super::{strip_marker, GranularityLevel, VocabError, Vocabulary, CONTINUATION, SPECIAL_TOKENS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeRule {
    pub left: String,
    pub right: String,
    pub merged: String,
    pub rank: usize,
}

impl MergeRule {
    pub fn new(left: impl Into<String>, right: impl Into<String>, rank: usize) -> Self {
        let left = left.into();
        let right = right.into();
        let merged = merge_tokens(&left, &right);
        MergeRule {
            left,
            right,
            merged,
            rank,
        }
    }
}

/// `left` followed by `right` without its continuation marker.
pub fn merge_tokens(left: &str, right: &str) -> String {
    let mut merged = String::with_capacity(left.len() + right.len());
    merged.push_str(left);
    merged.push_str(strip_marker(right).1);
    merged
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainerConfig {
    pub level: GranularityLevel,
    pub target_size: usize,
    pub min_pair_freq: u64,
    /// Units added to the alphabet even when the corpus never shows them.
    pub initial_alphabet: Vec<String>,
}

impl TrainerConfig {
    pub fn new(level: GranularityLevel, target_size: usize) -> Self {
        TrainerConfig {
            level,
            target_size,
            min_pair_freq: 2,
            initial_alphabet: Vec::new(),
        }
    }

    pub fn min_pair_freq(mut self, min_pair_freq: u64) -> Self {
        self.min_pair_freq = min_pair_freq;
        self
    }

    pub fn initial_alphabet<I, S>(mut self, alphabet: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.initial_alphabet = alphabet.into_iter().map(Into::into).collect();
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TrainReport {
    pub distinct_words: usize,
    pub total_words: u64,
    pub alphabet_size: usize,
    pub merges_executed: usize,
    /// Pair frequency at the moment each merge was chosen, in rank order.
    pub merge_frequencies: Vec<u64>,
    pub final_size: usize,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub vocab: Vocabulary,
    pub merges: Vec<MergeRule>,
    pub report: TrainReport,
}

#[derive(Default)]
struct Symbols {
    strings: Vec<Arc<str>>,
    ids: HashMap<Arc<str>, u32>,
}

impl Symbols {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.strings.len() as u32;
        let s: Arc<str> = Arc::from(s);
        self.strings.push(s.clone());
        self.ids.insert(s, id);
        id
    }

    fn get(&self, id: u32) -> &Arc<str> {
        &self.strings[id as usize]
    }
}

type Pair = (u32, u32);

// Orders by descending count, then ascending left and right strings.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct QueueKey {
    count: Reverse<i64>,
    left: Arc<str>,
    right: Arc<str>,
    pair: Pair,
}

struct Word {
    symbols: Vec<u32>,
    count: u64,
}

impl Word {
    fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.symbols.windows(2).map(|w| (w[0], w[1]))
    }

    /// Merges non-overlapping occurrences of `pair` left to right.
    fn merge(&mut self, pair: Pair, merged: u32) {
        let mut out = Vec::with_capacity(self.symbols.len());
        let mut i = 0;
        while i < self.symbols.len() {
            if i + 1 < self.symbols.len() && (self.symbols[i], self.symbols[i + 1]) == pair {
                out.push(merged);
                i += 2;
            } else {
                out.push(self.symbols[i]);
                i += 1;
            }
        }
        self.symbols = out;
    }
}

struct PairIndex {
    counts: HashMap<Pair, i64>,
    words: HashMap<Pair, Vec<usize>>,
    queue: BTreeSet<QueueKey>,
}

impl PairIndex {
    fn build(words: &[Word], symbols: &Symbols) -> Self {
        let mut counts: HashMap<Pair, i64> = HashMap::new();
        let mut where_: HashMap<Pair, Vec<usize>> = HashMap::new();
        for (idx, word) in words.iter().enumerate() {
            for pair in word.pairs() {
                *counts.entry(pair).or_default() += word.count as i64;
                let list = where_.entry(pair).or_default();
                if list.last() != Some(&idx) {
                    list.push(idx);
                }
            }
        }
        let queue = counts
            .iter()
            .map(|(&pair, &count)| key(symbols, pair, count))
            .collect();
        PairIndex {
            counts,
            words: where_,
            queue,
        }
    }

    fn apply(&mut self, symbols: &Symbols, deltas: HashMap<Pair, i64>) {
        let mut deltas: Vec<_> = deltas.into_iter().filter(|&(_, d)| d != 0).collect();
        deltas.sort_unstable();
        for (pair, delta) in deltas {
            let old = self.counts.get(&pair).copied().unwrap_or(0);
            if old > 0 {
                self.queue.remove(&key(symbols, pair, old));
            }
            let new = old + delta;
            debug_assert!(new >= 0, "pair counts never go negative");
            if new > 0 {
                self.counts.insert(pair, new);
                self.queue.insert(key(symbols, pair, new));
            } else {
                self.counts.remove(&pair);
                self.words.remove(&pair);
            }
        }
    }
}

fn key(symbols: &Symbols, pair: Pair, count: i64) -> QueueKey {
    QueueKey {
        count: Reverse(count),
        left: symbols.get(pair.0).clone(),
        right: symbols.get(pair.1).clone(),
        pair,
    }
}

fn split_units(word: &str, symbols: &mut Symbols) -> Vec<u32> {
    let mut buf = String::new();
    word.chars()
        .enumerate()
        .map(|(i, c)| {
            buf.clear();
            if i > 0 {
                buf.push_str(CONTINUATION);
            }
            buf.push(c);
            symbols.intern(&buf)
        })
        .collect()
}

/// Trains a vocabulary from `(word, count)` pairs.
///
/// Words are rewritten to the configured level first, so Character-level text
/// may be passed for either level.
pub fn train_bpe<I, S>(corpus: I, config: &TrainerConfig) -> Result<TrainOutput, VocabError>
where
    I: IntoIterator<Item = (S, u64)>,
    S: AsRef<str>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    for (word, count) in corpus {
        let word = config.level.prepare(word.as_ref());
        if count > 0 && !word.is_empty() {
            *counts.entry(word).or_default() += count;
        }
    }
    if counts.is_empty() {
        return Err(VocabError::EmptyCorpus);
    }
    let mut sorted: Vec<(String, u64)> = counts.into_iter().collect();
    sorted.sort_unstable();

    let mut symbols = Symbols::default();
    let mut words: Vec<Word> = sorted
        .iter()
        .map(|(w, count)| Word {
            symbols: split_units(w, &mut symbols),
            count: *count,
        })
        .collect();

    let mut alphabet: BTreeSet<Arc<str>> = symbols.strings.iter().cloned().collect();
    for unit in &config.initial_alphabet {
        let (continuation, body) = strip_marker(unit);
        if body.is_empty() {
            return Err(VocabError::InvalidToken(unit.clone()));
        }
        let prepared = config.level.prepare(body);
        let unit = if continuation {
            format!("{CONTINUATION}{prepared}")
        } else {
            prepared
        };
        alphabet.insert(Arc::from(unit.as_str()));
    }
    let minimum = SPECIAL_TOKENS.len() + alphabet.len();
    if config.target_size <= minimum {
        return Err(VocabError::TargetTooSmall {
            target: config.target_size,
            minimum,
            alphabet: alphabet.len(),
        });
    }

    let mut present: HashSet<Arc<str>> = alphabet.iter().cloned().collect();
    let mut added: Vec<u32> = Vec::new();
    let mut merges = Vec::new();
    let mut merge_frequencies = Vec::new();
    let mut index = PairIndex::build(&words, &symbols);

    while minimum + added.len() < config.target_size {
        let Some(best) = index.queue.pop_first() else {
            break;
        };
        let count = best.count.0;
        if count < config.min_pair_freq as i64 {
            break;
        }
        let pair = best.pair;
        let merged_str = merge_tokens(&best.left, &best.right);
        let merged = symbols.intern(&merged_str);
        merges.push(MergeRule {
            left: best.left.to_string(),
            right: best.right.to_string(),
            merged: merged_str,
            rank: merges.len(),
        });
        merge_frequencies.push(count as u64);
        if present.insert(symbols.get(merged).clone()) {
            added.push(merged);
        }

        // the popped key is gone from the queue; keep the map consistent
        index.queue.insert(best);
        let mut affected = index.words.get(&pair).cloned().unwrap_or_default();
        affected.sort_unstable();
        affected.dedup();
        let mut deltas: HashMap<Pair, i64> = HashMap::new();
        for idx in affected {
            let word = &mut words[idx];
            let weight = word.count as i64;
            for p in word.pairs() {
                *deltas.entry(p).or_default() -= weight;
            }
            word.merge(pair, merged);
            for p in word.pairs() {
                *deltas.entry(p).or_default() += weight;
                if p.0 == merged || p.1 == merged {
                    let list = index.words.entry(p).or_default();
                    if list.last() != Some(&idx) {
                        list.push(idx);
                    }
                }
            }
        }
        index.apply(&symbols, deltas);
    }

    let mut frequencies: HashMap<u32, u64> = HashMap::new();
    for word in &words {
        for &s in &word.symbols {
            *frequencies.entry(s).or_default() += word.count;
        }
    }
    let frequency_of = |s: &str| {
        symbols
            .ids
            .get(s)
            .and_then(|id| frequencies.get(id))
            .copied()
            .unwrap_or(0)
    };

    let mut vocab = Vocabulary::new(config.level);
    for unit in &alphabet {
        vocab.push(unit.to_string(), frequency_of(unit))?;
    }
    for &id in &added {
        let token = symbols.get(id);
        vocab.push(token.to_string(), frequency_of(token))?;
    }

    let report = TrainReport {
        distinct_words: sorted.len(),
        total_words: sorted.iter().map(|(_, c)| c).sum(),
        alphabet_size: alphabet.len(),
        merges_executed: merges.len(),
        merge_frequencies,
        final_size: vocab.len(),
    };
    Ok(TrainOutput {
        vocab,
        merges,
        report,
    })
}
