//! Independent oracles and random fixtures shared by the integration tests
//! and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use hangulpiece::hangul::decompose_text;
use hangulpiece::vocab::{full_jamo_alphabet, GranularityLevel, Vocabulary};
use rand::seq::SliceRandom;
use rand::Rng;

/// Syllables used to build small random words and vocabularies.
pub const SYLLABLES: [char; 8] = ['가', '나', '다', '라', '각', '닭', '뱃', '춥'];

pub fn piece(units: &[char], start: usize, end: usize) -> String {
    let body: String = units[start..end].iter().collect();
    if start == 0 {
        body
    } else {
        format!("##{body}")
    }
}

/// Greedy longest match by enumerating every candidate end position.
pub fn brute_forward(units: &[char], vocab: &HashSet<String>) -> Option<Vec<String>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < units.len() {
        let end = (start + 1..=units.len())
            .filter(|&end| vocab.contains(&piece(units, start, end)))
            .max()?;
        out.push(piece(units, start, end));
        start = end;
    }
    Some(out)
}

/// Greedy longest match from the right by enumerating every start position.
pub fn brute_backward(units: &[char], vocab: &HashSet<String>) -> Option<Vec<String>> {
    let mut out = Vec::new();
    let mut end = units.len();
    while end > 0 {
        let start = (0..end)
            .filter(|&start| vocab.contains(&piece(units, start, end)))
            .min()?;
        out.push(piece(units, start, end));
        end = start;
    }
    out.reverse();
    Some(out)
}

pub fn token_set(vocab: &Vocabulary) -> HashSet<String> {
    vocab.entries().iter().map(|e| e.token.clone()).collect()
}

pub fn random_word(rng: &mut impl Rng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

/// Random pieces over `alphabet`, each bare or continuation, without duplicates.
pub fn random_pieces(
    rng: &mut impl Rng,
    alphabet: &[char],
    count: usize,
    max_len: usize,
) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..count {
        let body = random_word(rng, alphabet, max_len);
        let token = if rng.gen_bool(0.5) {
            body
        } else {
            format!("##{body}")
        };
        if seen.insert(token.clone()) {
            out.push(token);
        }
    }
    out
}

pub fn vocab_with(level: GranularityLevel, tokens: &[String], rng: &mut impl Rng) -> Vocabulary {
    let entries: Vec<(String, u64)> = tokens
        .iter()
        .map(|t| (t.clone(), rng.gen_range(0..2000)))
        .collect();
    Vocabulary::with_specials(level, entries).unwrap()
}

/// Every unit of `alphabet` as a bare and a continuation piece.
pub fn unit_closure(alphabet: &[char]) -> Vec<String> {
    alphabet
        .iter()
        .flat_map(|c| [c.to_string(), format!("##{c}")])
        .collect()
}

/// A sub-character vocabulary: the full jamo alphabet plus random jamo runs
/// cut from `words`.
pub fn subchar_vocab(rng: &mut impl Rng, words: &[String], extra: usize) -> Vocabulary {
    let mut tokens: Vec<String> = full_jamo_alphabet();
    let mut seen: HashSet<String> = tokens.iter().cloned().collect();
    for _ in 0..extra {
        let word: Vec<char> = decompose_text(words.choose(rng).unwrap()).chars().collect();
        let start = rng.gen_range(0..word.len());
        let end = rng.gen_range(start + 1..=word.len().min(start + 6));
        let token = piece(&word, start, end);
        if seen.insert(token.clone()) {
            tokens.push(token);
        }
    }
    vocab_with(GranularityLevel::SubCharacter, &tokens, rng)
}

/// Random Hangul syllable string drawn from the whole syllable block.
pub fn random_hangul(rng: &mut impl Rng, max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| char::from_u32(0xAC00 + rng.gen_range(0..11_172)).unwrap())
        .collect()
}
