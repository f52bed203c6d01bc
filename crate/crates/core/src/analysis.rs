//! Diagnostics over tokenizers and vocabularies: `[UNK]` ratios, vocabulary
//! composition and side-by-side segmentations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::hangul::{classify_char, compose_text, CharClass};
use crate::tokenizer::{compat_display, pre_tokenize, Tokenizer};
use crate::vocab::{classify_vocab, CompositionReport, VocabCategory, Vocabulary};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassStats {
    pub words: u64,
    pub unk_words: u64,
    pub tokens: u64,
}

/// Token and word counts over a corpus.
///
/// `[UNK]` replaces whole words, so `unk_tokens == unk_words`; the two ratios
/// differ only in their denominators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub total_words: u64,
    pub unk_words: u64,
    pub total_tokens: u64,
    pub unk_tokens: u64,
    /// Keyed by the class of each word's first character.
    pub by_class: BTreeMap<CharClass, ClassStats>,
}

impl CorpusStats {
    /// `[UNK]` tokens over all output tokens.
    pub fn unk_ratio(&self) -> f64 {
        ratio(self.unk_tokens, self.total_tokens)
    }

    /// `[UNK]` words over all words.
    pub fn word_unk_ratio(&self) -> f64 {
        ratio(self.unk_words, self.total_words)
    }

    pub fn merge(&mut self, other: &CorpusStats) {
        self.total_words += other.total_words;
        self.unk_words += other.unk_words;
        self.total_tokens += other.total_tokens;
        self.unk_tokens += other.unk_tokens;
        for (class, stats) in &other.by_class {
            let entry = self.by_class.entry(*class).or_default();
            entry.words += stats.words;
            entry.unk_words += stats.unk_words;
            entry.tokens += stats.tokens;
        }
    }

    pub fn add_sentence(&mut self, sentence: &str, tokenizer: &Tokenizer) {
        let words = pre_tokenize(sentence);
        let tokenization = tokenizer.tokenize(sentence);
        let mut per_word = vec![(0u64, false); words.len()];
        for token in &tokenization.tokens {
            let slot = &mut per_word[token.word];
            slot.0 += 1;
            slot.1 |= token.is_unknown;
        }
        for ((word, _), (tokens, unknown)) in words.iter().zip(per_word) {
            let class = word.chars().next().map_or(CharClass::Other, classify_char);
            let stats = self.by_class.entry(class).or_default();
            stats.words += 1;
            stats.tokens += tokens;
            self.total_words += 1;
            self.total_tokens += tokens;
            if unknown {
                stats.unk_words += 1;
                self.unk_words += 1;
                self.unk_tokens += 1;
            }
        }
    }

    pub fn record(&self) -> StatsRecord {
        StatsRecord {
            total: self.total_tokens,
            unk: self.unk_tokens,
            ratio: round5(self.unk_ratio()),
            total_words: self.total_words,
            unk_words: self.unk_words,
            word_ratio: round5(self.word_unk_ratio()),
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let rows = [
            ("# of [UNK]", self.unk_tokens.to_string()),
            ("total # of tokens", self.total_tokens.to_string()),
            ("[UNK] ratio", format!("{:.5}", self.unk_ratio())),
            ("total # of words", self.total_words.to_string()),
            ("[UNK] word ratio", format!("{:.5}", self.word_unk_ratio())),
        ];
        for (label, value) in rows {
            let _ = writeln!(out, "{label:<20} {value:>12}");
        }
        for (class, stats) in &self.by_class {
            let _ = writeln!(
                out,
                "  {:<18} words {:>9}  unk {:>7}  tokens {:>9}",
                class.name(),
                stats.words,
                stats.unk_words,
                stats.tokens
            );
        }
        out
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn round5(x: f64) -> f64 {
    (x * 1e5).round() / 1e5
}

/// Aggregate record: `total`/`unk`/`ratio` count output tokens.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRecord {
    pub total: u64,
    pub unk: u64,
    pub ratio: f64,
    pub total_words: u64,
    pub unk_words: u64,
    pub word_ratio: f64,
}

pub fn unk_ratio<I, S>(sentences: I, tokenizer: &Tokenizer) -> CorpusStats
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut stats = CorpusStats::default();
    for sentence in sentences {
        stats.add_sentence(sentence.as_ref(), tokenizer);
    }
    stats
}

/// Same counts as [`unk_ratio`], computed in parallel.
pub fn unk_ratio_par<S: AsRef<str> + Sync>(sentences: &[S], tokenizer: &Tokenizer) -> CorpusStats {
    sentences
        .par_chunks(256)
        .map(|chunk| unk_ratio(chunk, tokenizer))
        .reduce(CorpusStats::default, |mut a, b| {
            a.merge(&b);
            a
        })
}

pub fn composition_report(vocab: &Vocabulary) -> CompositionReport {
    classify_vocab(vocab)
}

const CATEGORIES: [(VocabCategory, &str); 4] = [
    (VocabCategory::HangulWord, "words (Hangul)"),
    (VocabCategory::HangulSubword, "subwords (Hangul)"),
    (VocabCategory::SymbolsOther, "symbols and other"),
    (VocabCategory::Special, "special tokens"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionRecord {
    pub hangul_words: usize,
    pub hangul_subwords: usize,
    pub symbols_other: usize,
    pub special: usize,
    pub total: usize,
    /// Percentages with three decimals, in the field order above.
    pub percent: [String; 4],
}

pub fn composition_record(report: &CompositionReport) -> CompositionRecord {
    CompositionRecord {
        hangul_words: report.hangul_words,
        hangul_subwords: report.hangul_subwords,
        symbols_other: report.symbols_other,
        special: report.special,
        total: report.total(),
        percent: CATEGORIES.map(|(c, _)| format!("{:.3}", report.percent(c))),
    }
}

pub fn composition_table(report: &CompositionReport) -> String {
    let mut out = String::new();
    for (category, label) in CATEGORIES {
        let _ = writeln!(
            out,
            "{label:<20} {:>8} ({:.3}%)",
            report.count(category),
            report.percent(category)
        );
    }
    let _ = writeln!(out, "{:<20} {:>8}", "total", report.total());
    out
}

/// A named tokenizer taking part in a comparison.
#[derive(Debug, Clone)]
pub struct Variant {
    pub name: String,
    pub tokenizer: Tokenizer,
}

impl Variant {
    pub fn new(name: impl Into<String>, tokenizer: Tokenizer) -> Self {
        Variant {
            name: name.into(),
            tokenizer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantTokens {
    pub variant: String,
    /// Tokens with jamo composed for display.
    pub tokens: Vec<String>,
    pub is_unk: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub word: String,
    pub sequences: Vec<VariantTokens>,
    /// All variants produced the same displayed sequence.
    pub agree: bool,
}

/// One line-delimited record per (word, variant).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonRecord<'a> {
    pub word: &'a str,
    pub variant: &'a str,
    pub tokens: &'a [String],
    pub is_unk: bool,
    pub agree: bool,
}

impl ComparisonRow {
    pub fn records(&self) -> impl Iterator<Item = ComparisonRecord<'_>> {
        self.sequences.iter().map(move |s| ComparisonRecord {
            word: &self.word,
            variant: &s.variant,
            tokens: &s.tokens,
            is_unk: s.is_unk,
            agree: self.agree,
        })
    }
}

pub fn compare_tokenizers<S: AsRef<str>>(words: &[S], variants: &[Variant]) -> Vec<ComparisonRow> {
    words
        .iter()
        .map(|word| {
            let word = word.as_ref();
            let sequences: Vec<VariantTokens> = variants
                .iter()
                .map(|v| {
                    let t = v.tokenizer.tokenize(word);
                    VariantTokens {
                        variant: v.name.clone(),
                        tokens: t.tokens.iter().map(|tok| compose_text(&tok.text)).collect(),
                        is_unk: t.unknown_count() > 0,
                    }
                })
                .collect();
            let agree = sequences.windows(2).all(|w| w[0].tokens == w[1].tokens);
            ComparisonRow {
                word: word.to_owned(),
                sequences,
                agree,
            }
        })
        .collect()
}

/// Terminal column width: wide for Hangul and CJK, zero for medial and final jamo.
pub fn display_width(s: &str) -> usize {
    s.chars()
        .map(|c| match c as u32 {
            0x1160..=0x11FF => 0,
            0x1100..=0x115F | 0x2E80..=0x303E | 0x3041..=0xA4CF | 0xAC00..=0xD7A3 => 2,
            0xF900..=0xFAFF | 0xFF00..=0xFF60 | 0xFFE0..=0xFFE6 => 2,
            _ => 1,
        })
        .sum()
}

fn pad(s: &str, width: usize) -> String {
    let mut out = s.to_owned();
    out.extend(std::iter::repeat_n(
        ' ',
        width.saturating_sub(display_width(s)),
    ));
    out
}

/// Aligned table; leftover jamo are shown as compatibility jamo.
pub fn comparison_table(rows: &[ComparisonRow], variants: &[Variant]) -> String {
    let mut header = vec!["word".to_owned()];
    header.extend(variants.iter().map(|v| v.name.clone()));
    header.push("agree".to_owned());
    let mut cells = vec![header];
    for row in rows {
        let mut line = vec![row.word.clone()];
        line.extend(row.sequences.iter().map(|s| {
            let shown: Vec<String> = s.tokens.iter().map(|t| compat_display(t)).collect();
            shown.join(" ")
        }));
        line.push(if row.agree { "yes" } else { "no" }.to_owned());
        cells.push(line);
    }
    let columns = cells[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            cells
                .iter()
                .map(|r| display_width(&r[c]))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for line in &cells {
        let padded: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| pad(cell, w))
            .collect();
        let _ = writeln!(out, "{}", padded.join(" | ").trim_end());
    }
    out
}
