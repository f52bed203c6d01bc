//! Subword vocabularies: training, augmentation, composition and persistence.

mod io;
mod train;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hangul::{self, classify_char};

pub use io::{
    export_bert_vocab, import_bert_vocab, load_merges, load_vocab, read_merges, read_vocab,
    save_merges, save_vocab, write_merges, write_vocab,
};
pub use train::{train_bpe, MergeRule, TrainOutput, TrainReport, TrainerConfig};

/// Prefix carried by every piece that does not start a word.
pub const CONTINUATION: &str = "##";

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
pub const MASK: &str = "[MASK]";

/// Reserved tokens, in id order.
pub const SPECIAL_TOKENS: [&str; 5] = [PAD, UNK, CLS, SEP, MASK];

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("EmptyCorpus: the training corpus contains no words")]
    EmptyCorpus,
    #[error("TargetTooSmall: target size {target} must exceed {minimum} (5 special tokens plus the {alphabet}-unit alphabet)")]
    TargetTooSmall {
        target: usize,
        minimum: usize,
        alphabet: usize,
    },
    #[error("ParseError at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate token {0:?}")]
    DuplicateToken(String),
    #[error("invalid token {0:?}: empty after stripping the continuation marker")]
    InvalidToken(String),
    #[error("vocabulary lacks the special token {0}")]
    MissingSpecial(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl VocabError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        VocabError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Smallest unit a vocabulary is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GranularityLevel {
    /// Precomposed syllables.
    Character,
    /// Conjoining jamo.
    #[serde(rename = "subcharacter")]
    SubCharacter,
}

impl GranularityLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            GranularityLevel::Character => "character",
            GranularityLevel::SubCharacter => "subcharacter",
        }
    }

    /// Rewrites `text` into this level's units.
    pub fn prepare(self, text: &str) -> String {
        match self {
            GranularityLevel::Character => text.to_owned(),
            GranularityLevel::SubCharacter => hangul::decompose_text(text),
        }
    }
}

impl fmt::Display for GranularityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GranularityLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "character" | "char" => Ok(GranularityLevel::Character),
            "subcharacter" | "subchar" | "jamo" => Ok(GranularityLevel::SubCharacter),
            other => Err(format!(
                "unknown level {other:?} (expected character or subcharacter)"
            )),
        }
    }
}

/// Splits a token into (is_continuation, body).
pub fn strip_marker(token: &str) -> (bool, &str) {
    match token.strip_prefix(CONTINUATION) {
        Some(body) => (true, body),
        None => (false, token),
    }
}

pub fn is_special(token: &str) -> bool {
    SPECIAL_TOKENS.contains(&token)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub token: String,
    pub id: u32,
    /// Occurrences in the training corpus; zero for added symbols.
    pub frequency: u64,
}

/// An ordered token inventory. Ids are dense and follow insertion order.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    level: GranularityLevel,
    entries: Vec<VocabEntry>,
    lookup: HashMap<String, u32>,
    max_piece_units: usize,
    unk_id: u32,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.entries == other.entries
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    /// A vocabulary holding only the five special tokens at ids 0..=4.
    pub fn new(level: GranularityLevel) -> Self {
        Self::from_tokens(level, SPECIAL_TOKENS.iter().map(|t| (t.to_string(), 0)))
            .expect("special tokens are distinct")
    }

    /// Builds a vocabulary from `(token, frequency)` pairs in id order.
    ///
    /// The special tokens are not added implicitly, but `[UNK]` must be present.
    pub fn from_tokens<I, S>(level: GranularityLevel, tokens: I) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary {
            level,
            ..Vocabulary::empty()
        };
        for (token, frequency) in tokens {
            vocab.push(token.into(), frequency)?;
        }
        vocab.finish()
    }

    pub(crate) fn empty() -> Self {
        Vocabulary {
            level: GranularityLevel::Character,
            entries: Vec::new(),
            lookup: HashMap::new(),
            max_piece_units: 0,
            unk_id: 0,
        }
    }

    pub(crate) fn finish(mut self) -> Result<Self, VocabError> {
        self.unk_id = self.id(UNK).ok_or(VocabError::MissingSpecial(UNK))?;
        Ok(self)
    }

    /// Special tokens at ids 0..=4 followed by `tokens`.
    pub fn with_specials<I, S>(level: GranularityLevel, tokens: I) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut vocab = Self::new(level);
        for (token, frequency) in tokens {
            vocab.push(token.into(), frequency)?;
        }
        Ok(vocab)
    }

    pub(crate) fn push(&mut self, token: String, frequency: u64) -> Result<u32, VocabError> {
        if strip_marker(&token).1.is_empty() {
            return Err(VocabError::InvalidToken(token));
        }
        if self.lookup.contains_key(&token) {
            return Err(VocabError::DuplicateToken(token));
        }
        let id = self.entries.len() as u32;
        if !is_special(&token) {
            self.max_piece_units = self
                .max_piece_units
                .max(strip_marker(&token).1.chars().count());
        }
        self.lookup.insert(token.clone(), id);
        self.entries.push(VocabEntry {
            token,
            id,
            frequency,
        });
        Ok(id)
    }

    pub fn level(&self) -> GranularityLevel {
        self.level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.lookup.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.lookup.contains_key(token)
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.entries.get(id as usize).map(|e| e.token.as_str())
    }

    pub fn frequency(&self, id: u32) -> u64 {
        self.entries.get(id as usize).map_or(0, |e| e.frequency)
    }

    pub fn unk_id(&self) -> u32 {
        self.unk_id
    }

    /// Longest non-special token, in units, ignoring the continuation marker.
    pub fn max_piece_units(&self) -> usize {
        self.max_piece_units
    }

    /// Overwrites the frequency of an existing token.
    pub fn set_frequency(&mut self, token: &str, frequency: u64) -> bool {
        match self.lookup.get(token) {
            Some(&id) => {
                self.entries[id as usize].frequency = frequency;
                true
            }
            None => false,
        }
    }

    /// Appends every symbol not already present, with frequency zero.
    pub fn augment<I, S>(&mut self, symbols: I) -> AugmentReport
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut report = AugmentReport::default();
        for symbol in symbols {
            let symbol = symbol.as_ref();
            if self.contains(symbol) || strip_marker(symbol).1.is_empty() {
                report.skipped += 1;
                continue;
            }
            self.push(symbol.to_owned(), 0)
                .expect("absence checked above");
            report.added += 1;
        }
        report
    }

    pub fn composition(&self) -> CompositionReport {
        classify_vocab(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AugmentReport {
    pub added: usize,
    pub skipped: usize,
}

/// Returns a copy of `vocab` with `symbols` appended.
pub fn augment_vocab<S: AsRef<str>>(
    vocab: &Vocabulary,
    symbols: &[S],
) -> (Vocabulary, AugmentReport) {
    let mut out = vocab.clone();
    let report = out.augment(symbols);
    (out, report)
}

/// Every modern conjoining jamo, bare and with the continuation marker.
pub fn full_jamo_alphabet() -> Vec<String> {
    hangul::conjoining_jamo()
        .flat_map(|c| [c.to_string(), format!("{CONTINUATION}{c}")])
        .collect()
}

/// Symbols added after training by default: emoticon jamo, printable ASCII
/// and common CJK punctuation. One symbol per line.
pub const DEFAULT_SYMBOLS: &str = include_str!("../../data/default_symbols.txt");

/// Parses a symbol list: one symbol per line, blank lines ignored, duplicates
/// dropped while keeping first-occurrence order.
pub fn parse_symbol_list(text: &str) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    text.lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .filter(|l| seen.insert(l.to_string()))
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VocabCategory {
    HangulWord,
    HangulSubword,
    SymbolsOther,
    Special,
}

pub fn categorize_token(token: &str) -> VocabCategory {
    if is_special(token) {
        return VocabCategory::Special;
    }
    let (continuation, body) = strip_marker(token);
    let all_hangul = !body.is_empty() && body.chars().all(|c| classify_char(c).is_hangul());
    match (all_hangul, continuation) {
        (true, true) => VocabCategory::HangulSubword,
        (true, false) => VocabCategory::HangulWord,
        (false, _) => VocabCategory::SymbolsOther,
    }
}

/// Category counts over a whole vocabulary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CompositionReport {
    pub hangul_words: usize,
    pub hangul_subwords: usize,
    pub symbols_other: usize,
    pub special: usize,
}

impl CompositionReport {
    pub fn total(&self) -> usize {
        self.hangul_words + self.hangul_subwords + self.symbols_other + self.special
    }

    pub fn count(&self, category: VocabCategory) -> usize {
        match category {
            VocabCategory::HangulWord => self.hangul_words,
            VocabCategory::HangulSubword => self.hangul_subwords,
            VocabCategory::SymbolsOther => self.symbols_other,
            VocabCategory::Special => self.special,
        }
    }

    /// Share of the vocabulary, in percent. Zero for an empty report.
    pub fn percent(&self, category: VocabCategory) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.count(category) as f64 * 100.0 / total as f64
        }
    }
}

pub fn classify_vocab(vocab: &Vocabulary) -> CompositionReport {
    let mut report = CompositionReport::default();
    for entry in vocab.entries() {
        match categorize_token(&entry.token) {
            VocabCategory::HangulWord => report.hangul_words += 1,
            VocabCategory::HangulSubword => report.hangul_subwords += 1,
            VocabCategory::SymbolsOther => report.symbols_other += 1,
            VocabCategory::Special => report.special += 1,
        }
    }
    report
}
