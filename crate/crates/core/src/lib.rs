//! Korean subword tokenization at character and sub-character granularity.
//!
//! Text is segmented into whole Hangul syllables (`Character`) or into
//! conjoining jamo (`SubCharacter`), a WordPiece-style vocabulary is trained
//! with BPE merges, and words are matched greedily forward, backward or in
//! both directions.

pub mod analysis;
pub mod corpus;
pub mod hangul;
pub mod tokenizer;
pub mod vocab;

pub use corpus::{CorpusReader, WordFrequency};
pub use tokenizer::{MatchMode, ScoreStrategy, Token, Tokenization, Tokenizer, TokenizerConfig};
pub use vocab::{train_bpe, GranularityLevel, TrainerConfig, Vocabulary};
