//! Text to subword tokens: pre-tokenization, level conversion and
//! forward, backward or bidirectional WordPiece matching.

mod pre;
mod wordpiece;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hangul::{self, compose_text, decompose_syllable};
use crate::vocab::{strip_marker, GranularityLevel, Vocabulary, UNK};

pub use pre::pre_tokenize;
pub use wordpiece::{
    candidate_score, compare_candidates, select_candidate, tokenize_bidirectional,
    wordpiece_backward, wordpiece_forward, CandidateScorer, Choice, Piece, ScoreStrategy,
    Segmentation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenizerError {
    #[error("LevelMismatch: vocabulary is {vocab} but the tokenizer is configured for {config}")]
    LevelMismatch {
        vocab: GranularityLevel,
        config: GranularityLevel,
    },
    #[error("unknown token {0:?} is not in the vocabulary")]
    MissingUnkToken(String),
    #[error("max_word_units must be positive")]
    ZeroWordLimit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    #[default]
    Forward,
    Backward,
    Bidirectional,
}

impl MatchMode {
    pub const ALL: [MatchMode; 3] = [
        MatchMode::Forward,
        MatchMode::Backward,
        MatchMode::Bidirectional,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::Forward => "forward",
            MatchMode::Backward => "backward",
            MatchMode::Bidirectional => "bidirectional",
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "forward" | "fw" => Ok(MatchMode::Forward),
            "backward" | "bw" => Ok(MatchMode::Backward),
            "bidirectional" | "bi" => Ok(MatchMode::Bidirectional),
            other => Err(format!(
                "unknown mode {other:?} (forward, backward, bidirectional)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub level: GranularityLevel,
    pub mode: MatchMode,
    /// Words longer than this many units become `[UNK]`.
    pub max_word_units: usize,
    pub unk_token: String,
    pub lowercase_latin: bool,
    pub scorer: ScoreStrategy,
}

impl TokenizerConfig {
    pub fn new(level: GranularityLevel) -> Self {
        TokenizerConfig {
            level,
            mode: MatchMode::Forward,
            max_word_units: 100,
            unk_token: UNK.to_owned(),
            lowercase_latin: false,
            scorer: ScoreStrategy::default(),
        }
    }

    pub fn with_mode(mut self, mode: MatchMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Vocabulary form: jamo stay decomposed at sub-character level.
    pub text: String,
    pub id: u32,
    /// Byte range in the original text. Pieces of one syllable share its span.
    pub start: usize,
    pub end: usize,
    pub is_unknown: bool,
    /// Index of the pre-tokenized word this token belongs to.
    pub word: usize,
}

impl Token {
    pub fn span(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn is_continuation(&self) -> bool {
        strip_marker(&self.text).0
    }

    /// The token with jamo runs composed back into syllables.
    pub fn display(&self) -> String {
        compose_text(&self.text)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokenization {
    pub tokens: Vec<Token>,
}

impl Tokenization {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.tokens.iter().map(|t| t.id).collect()
    }

    pub fn unknown_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_unknown).count()
    }

    pub fn detokenize(&self, level: GranularityLevel) -> String {
        detokenize(self.tokens.iter().map(|t| t.text.as_str()), level)
    }
}

/// A word converted to the vocabulary's units, each remembering its source span.
struct WordUnits {
    units: Vec<char>,
    spans: Vec<Range<usize>>,
}

fn push_unit(out: &mut WordUnits, c: char, span: Range<usize>, lowercase: bool) {
    if lowercase && c.is_alphabetic() && !hangul::classify_char(c).is_hangul() {
        for lower in c.to_lowercase() {
            out.units.push(lower);
            out.spans.push(span.clone());
        }
    } else {
        out.units.push(c);
        out.spans.push(span);
    }
}

fn word_units(word: &str, offset: usize, config: &TokenizerConfig) -> WordUnits {
    let mut out = WordUnits {
        units: Vec::with_capacity(word.len()),
        spans: Vec::with_capacity(word.len()),
    };
    match config.level {
        GranularityLevel::SubCharacter => {
            for (i, c) in word.char_indices() {
                let span = offset + i..offset + i + c.len_utf8();
                match decompose_syllable(c) {
                    Ok(triple) => {
                        for jamo in triple.jamo() {
                            out.units.push(jamo);
                            out.spans.push(span.clone());
                        }
                    }
                    Err(_) => push_unit(&mut out, c, span, config.lowercase_latin),
                }
            }
        }
        GranularityLevel::Character => {
            // recompose conjoining jamo runs so both levels see the same text
            let chars: Vec<(usize, char)> = word.char_indices().collect();
            let mut i = 0;
            while i < chars.len() {
                let (pos, c) = chars[i];
                let run_len = jamo_run_len(&chars[i..]);
                if run_len > 0 {
                    let run: String = chars[i..i + run_len].iter().map(|&(_, c)| c).collect();
                    let (end_pos, end_c) = chars[i + run_len - 1];
                    let syllable = compose_text(&run).chars().next().expect("non-empty run");
                    out.units.push(syllable);
                    out.spans
                        .push(offset + pos..offset + end_pos + end_c.len_utf8());
                    i += run_len;
                } else {
                    push_unit(
                        &mut out,
                        c,
                        offset + pos..offset + pos + c.len_utf8(),
                        config.lowercase_latin,
                    );
                    i += 1;
                }
            }
        }
    }
    out
}

/// Length of a composable `L V [T]` run at the start of `chars`, or 0.
fn jamo_run_len(chars: &[(usize, char)]) -> usize {
    match chars {
        [(_, l), (_, v), (_, t), ..]
            if hangul::is_leading_jamo(*l)
                && hangul::is_vowel_jamo(*v)
                && hangul::is_trailing_jamo(*t) =>
        {
            3
        }
        [(_, l), (_, v), ..] if hangul::is_leading_jamo(*l) && hangul::is_vowel_jamo(*v) => 2,
        _ => 0,
    }
}

/// A vocabulary paired with a configuration; immutable and shareable.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    vocab: Arc<Vocabulary>,
    config: TokenizerConfig,
    unk_id: u32,
}

impl Tokenizer {
    pub fn new(
        vocab: impl Into<Arc<Vocabulary>>,
        config: TokenizerConfig,
    ) -> Result<Self, TokenizerError> {
        let vocab = vocab.into();
        if vocab.level() != config.level {
            return Err(TokenizerError::LevelMismatch {
                vocab: vocab.level(),
                config: config.level,
            });
        }
        if config.max_word_units == 0 {
            return Err(TokenizerError::ZeroWordLimit);
        }
        let unk_id = vocab
            .id(&config.unk_token)
            .ok_or_else(|| TokenizerError::MissingUnkToken(config.unk_token.clone()))?;
        Ok(Tokenizer {
            vocab,
            config,
            unk_id,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &TokenizerConfig {
        &self.config
    }

    /// Segments one word already expressed in vocabulary units.
    pub fn segment_units(&self, units: &[char]) -> Segmentation {
        match self.config.mode {
            MatchMode::Forward => wordpiece_forward(units, &self.vocab, &self.config),
            MatchMode::Backward => wordpiece_backward(units, &self.vocab, &self.config),
            MatchMode::Bidirectional => tokenize_bidirectional(units, &self.vocab, &self.config),
        }
    }

    pub fn tokenize(&self, text: &str) -> Tokenization {
        let mut tokens = Vec::new();
        for (word_index, (word, span)) in pre_tokenize(text).into_iter().enumerate() {
            let units = word_units(word, span.start, &self.config);
            match self.segment_units(&units.units) {
                Segmentation::Pieces(pieces) => {
                    for piece in pieces {
                        let first = &units.spans[piece.units.start];
                        let last = &units.spans[piece.units.end - 1];
                        tokens.push(Token {
                            text: self
                                .vocab
                                .token(piece.id)
                                .expect("piece ids come from the vocabulary")
                                .to_owned(),
                            id: piece.id,
                            start: first.start,
                            end: last.end,
                            is_unknown: false,
                            word: word_index,
                        });
                    }
                }
                Segmentation::Unknown => tokens.push(Token {
                    text: self.config.unk_token.clone(),
                    id: self.unk_id,
                    start: span.start,
                    end: span.end,
                    is_unknown: true,
                    word: word_index,
                }),
            }
        }
        Tokenization { tokens }
    }

    /// Tokenizes independent texts in parallel; output order follows input order.
    pub fn tokenize_batch<S: AsRef<str> + Sync>(&self, texts: &[S]) -> Vec<Tokenization> {
        texts
            .par_iter()
            .map(|t| self.tokenize(t.as_ref()))
            .collect()
    }
}

/// One-shot tokenization; fails when `config.level` differs from the vocabulary's.
pub fn tokenize(
    text: &str,
    vocab: &Vocabulary,
    config: &TokenizerConfig,
) -> Result<Tokenization, TokenizerError> {
    Ok(Tokenizer::new(vocab.clone(), config.clone())?.tokenize(text))
}

/// Joins tokens back into text.
///
/// Continuation pieces attach to the preceding word; words are separated by a
/// single space. At sub-character level jamo are recomposed into syllables.
pub fn detokenize<I, S>(tokens: I, level: GranularityLevel) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut words: Vec<String> = Vec::new();
    for token in tokens {
        let (continuation, body) = strip_marker(token.as_ref());
        match words.last_mut() {
            Some(word) if continuation => word.push_str(body),
            _ => words.push(body.to_owned()),
        }
    }
    let words = words.into_iter().map(|w| match level {
        GranularityLevel::Character => w,
        GranularityLevel::SubCharacter => compose_text(&hangul::decompose_text(&w)),
    });
    words.collect::<Vec<_>>().join(" ")
}

/// Inverse of the human display form.
///
/// Like [`detokenize`], but at sub-character level compatibility jamo
/// produced by [`compat_display`] are read back by context
/// (see [`hangul::restore_jamo`]).
pub fn detokenize_display<I, S>(tokens: I, level: GranularityLevel) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    match level {
        GranularityLevel::Character => detokenize(tokens, level),
        GranularityLevel::SubCharacter => detokenize(tokens, GranularityLevel::Character)
            .split(' ')
            .map(hangul::restore_jamo)
            .collect::<Vec<_>>()
            .join(" "),
    }
}

/// Presentation form: syllables composed, leftover jamo shown as compatibility jamo.
pub fn compat_display(token: &str) -> String {
    compose_text(token)
        .chars()
        .map(hangul::to_compatibility)
        .collect()
}
