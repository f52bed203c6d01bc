//! Greedy longest-match segmentation of a single word.
//!
//! A word is a slice of units (syllables or jamo, already at the vocabulary's
//! level). The piece starting at unit 0 is looked up bare and every other
//! piece with the `##` prefix, in both scan directions, so forward and
//! backward candidates are sequences over the same vocabulary.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::vocab::{Vocabulary, CONTINUATION};

use super::TokenizerConfig;

/// One vocabulary piece covering `units` of the word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub id: u32,
    pub units: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segmentation {
    Pieces(Vec<Piece>),
    /// Some position had no matching piece; the whole word maps to `[UNK]`.
    Unknown,
}

impl Segmentation {
    pub fn is_unknown(&self) -> bool {
        matches!(self, Segmentation::Unknown)
    }

    pub fn pieces(&self) -> Option<&[Piece]> {
        match self {
            Segmentation::Pieces(p) => Some(p),
            Segmentation::Unknown => None,
        }
    }

    pub fn ids(&self) -> Option<Vec<u32>> {
        self.pieces().map(|p| p.iter().map(|p| p.id).collect())
    }
}

struct Matcher<'a> {
    vocab: &'a Vocabulary,
    units: &'a [char],
    buf: String,
}

impl<'a> Matcher<'a> {
    fn new(vocab: &'a Vocabulary, units: &'a [char]) -> Self {
        Matcher {
            vocab,
            units,
            buf: String::new(),
        }
    }

    fn lookup(&mut self, range: Range<usize>) -> Option<u32> {
        self.buf.clear();
        if range.start > 0 {
            self.buf.push_str(CONTINUATION);
        }
        self.buf.extend(&self.units[range]);
        self.vocab.id(&self.buf)
    }
}

fn too_long(units: &[char], config: &TokenizerConfig) -> bool {
    units.len() > config.max_word_units
}

/// Left-to-right greedy longest match.
pub fn wordpiece_forward(
    units: &[char],
    vocab: &Vocabulary,
    config: &TokenizerConfig,
) -> Segmentation {
    if too_long(units, config) {
        return Segmentation::Unknown;
    }
    let max = vocab.max_piece_units();
    let mut matcher = Matcher::new(vocab, units);
    let mut pieces = Vec::new();
    let mut start = 0;
    while start < units.len() {
        let longest = units.len().min(start + max);
        let found = (start + 1..=longest).rev().find_map(|end| {
            matcher.lookup(start..end).map(|id| Piece {
                id,
                units: start..end,
            })
        });
        match found {
            Some(piece) => {
                start = piece.units.end;
                pieces.push(piece);
            }
            None => return Segmentation::Unknown,
        }
    }
    Segmentation::Pieces(pieces)
}

/// Right-to-left greedy longest match; pieces are returned in reading order.
pub fn wordpiece_backward(
    units: &[char],
    vocab: &Vocabulary,
    config: &TokenizerConfig,
) -> Segmentation {
    if too_long(units, config) {
        return Segmentation::Unknown;
    }
    let max = vocab.max_piece_units();
    let mut matcher = Matcher::new(vocab, units);
    let mut pieces = Vec::new();
    let mut end = units.len();
    while end > 0 {
        let earliest = end.saturating_sub(max);
        let found = (earliest..end).find_map(|start| {
            matcher.lookup(start..end).map(|id| Piece {
                id,
                units: start..end,
            })
        });
        match found {
            Some(piece) => {
                end = piece.units.start;
                pieces.push(piece);
            }
            None => return Segmentation::Unknown,
        }
    }
    pieces.reverse();
    Segmentation::Pieces(pieces)
}

/// How a candidate's token frequencies turn into a comparable score.
pub trait CandidateScorer {
    fn score(&self, frequencies: &[u64]) -> f64;

    /// Orders two candidates by score. Implementations may compare exactly
    /// where `score` would round.
    fn compare(&self, a: &[u64], b: &[u64]) -> Ordering {
        self.score(a)
            .partial_cmp(&self.score(b))
            .unwrap_or(Ordering::Equal)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreStrategy {
    /// Mean of `ln(freq)`: the log of the geometric mean. A zero-frequency
    /// token scores negative infinity. Scaling every frequency by a positive
    /// constant shifts both candidates equally.
    #[default]
    MeanLog,
    /// Mean of `ln(1 + freq)`.
    MeanLog1p,
    /// Sum of raw frequencies.
    Sum,
    /// Smallest raw frequency.
    Min,
}

impl CandidateScorer for ScoreStrategy {
    fn score(&self, frequencies: &[u64]) -> f64 {
        if frequencies.is_empty() {
            return f64::NEG_INFINITY;
        }
        let n = frequencies.len() as f64;
        match self {
            ScoreStrategy::MeanLog => frequencies.iter().map(|&f| (f as f64).ln()).sum::<f64>() / n,
            ScoreStrategy::MeanLog1p => {
                frequencies.iter().map(|&f| (f as f64).ln_1p()).sum::<f64>() / n
            }
            ScoreStrategy::Sum => frequencies.iter().map(|&f| f as f64).sum(),
            ScoreStrategy::Min => frequencies.iter().copied().min().unwrap_or(0) as f64,
        }
    }

    fn compare(&self, a: &[u64], b: &[u64]) -> Ordering {
        match self {
            ScoreStrategy::MeanLog => compare_geometric_means(a, b),
            ScoreStrategy::Sum => {
                let sum = |f: &[u64]| f.iter().map(|&x| u128::from(x)).sum::<u128>();
                sum(a).cmp(&sum(b))
            }
            ScoreStrategy::Min => a.iter().min().cmp(&b.iter().min()),
            ScoreStrategy::MeanLog1p => self
                .score(a)
                .partial_cmp(&self.score(b))
                .unwrap_or(Ordering::Equal),
        }
    }
}

/// Score gap beyond any rounding in a sum of at most a few hundred logarithms.
const CLEAR_GAP: f64 = 1e-6;

/// Exact comparison of geometric means, so that scaling every frequency by
/// the same constant can never flip the result.
fn compare_geometric_means(a: &[u64], b: &[u64]) -> Ordering {
    let degenerate = |f: &[u64]| f.is_empty() || f.contains(&0);
    match (degenerate(a), degenerate(b)) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        (false, false) => {}
    }
    let mean_log = |f: &[u64]| f.iter().map(|&x| (x as f64).ln()).sum::<f64>() / f.len() as f64;
    let gap = mean_log(a) - mean_log(b);
    if gap.abs() > CLEAR_GAP {
        return if gap > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        };
    }
    // prod(a)^(1/|a|) vs prod(b)^(1/|b|)  <=>  prod(a)^|b| vs prod(b)^|a|
    let g = gcd(a.len(), b.len());
    power_product(a, b.len() / g).cmp_magnitude(&power_product(b, a.len() / g))
}

fn gcd(mut x: usize, mut y: usize) -> usize {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

/// Unsigned integer as little-endian 64-bit limbs without leading zero limbs.
struct Natural(Vec<u64>);

impl Natural {
    fn mul_small(&mut self, factor: u64) {
        let mut carry = 0u128;
        for limb in &mut self.0 {
            let product = u128::from(*limb) * u128::from(factor) + carry;
            *limb = product as u64;
            carry = product >> 64;
        }
        if carry > 0 {
            self.0.push(carry as u64);
        }
    }

    fn cmp_magnitude(&self, other: &Natural) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

/// Product of `factors`, each raised to `exponent`; factors must be non-zero.
fn power_product(factors: &[u64], exponent: usize) -> Natural {
    let mut n = Natural(vec![1]);
    for &f in factors {
        for _ in 0..exponent {
            n.mul_small(f);
        }
    }
    n
}

impl ScoreStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreStrategy::MeanLog => "mean-log",
            ScoreStrategy::MeanLog1p => "mean-log1p",
            ScoreStrategy::Sum => "sum",
            ScoreStrategy::Min => "min",
        }
    }
}

impl fmt::Display for ScoreStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean-log" => Ok(ScoreStrategy::MeanLog),
            "mean-log1p" => Ok(ScoreStrategy::MeanLog1p),
            "sum" => Ok(ScoreStrategy::Sum),
            "min" => Ok(ScoreStrategy::Min),
            other => Err(format!(
                "unknown scorer {other:?} (mean-log, mean-log1p, sum, min)"
            )),
        }
    }
}

fn frequencies(pieces: &[Piece], vocab: &Vocabulary) -> Vec<u64> {
    pieces.iter().map(|p| vocab.frequency(p.id)).collect()
}

pub fn candidate_score(pieces: &[Piece], vocab: &Vocabulary, scorer: &dyn CandidateScorer) -> f64 {
    scorer.score(&frequencies(pieces, vocab))
}

/// Orders two known candidates by score alone.
pub fn compare_candidates(
    a: &[Piece],
    b: &[Piece],
    vocab: &Vocabulary,
    scorer: &dyn CandidateScorer,
) -> Ordering {
    scorer.compare(&frequencies(a, vocab), &frequencies(b, vocab))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    /// Candidates were identical.
    Same,
    Forward,
    Backward,
}

/// Picks between a forward and a backward candidate.
///
/// An unknown candidate loses to a known one. Otherwise the higher score wins;
/// exact ties go to fewer tokens, then to the forward candidate.
pub fn select_candidate(
    forward: &Segmentation,
    backward: &Segmentation,
    vocab: &Vocabulary,
    scorer: &dyn CandidateScorer,
) -> Choice {
    let (fw, bw) = match (forward.pieces(), backward.pieces()) {
        (None, None) => return Choice::Same,
        (Some(_), None) => return Choice::Forward,
        (None, Some(_)) => return Choice::Backward,
        (Some(f), Some(b)) => (f, b),
    };
    if fw == bw {
        return Choice::Same;
    }
    match compare_candidates(bw, fw, vocab, scorer).then_with(|| fw.len().cmp(&bw.len())) {
        Ordering::Greater => Choice::Backward,
        Ordering::Less | Ordering::Equal => Choice::Forward,
    }
}

/// Runs both scans and keeps the better candidate.
pub fn tokenize_bidirectional(
    units: &[char],
    vocab: &Vocabulary,
    config: &TokenizerConfig,
) -> Segmentation {
    let forward = wordpiece_forward(units, vocab, config);
    let backward = wordpiece_backward(units, vocab, config);
    match select_candidate(&forward, &backward, vocab, &config.scorer) {
        Choice::Same | Choice::Forward => forward,
        Choice::Backward => backward,
    }
}
