use std::ops::Range;

use crate::hangul::{classify_char, CharClass};

/// Splits on whitespace and isolates every punctuation character.
///
/// Spans are byte ranges into `text`.
pub fn pre_tokenize(text: &str) -> Vec<(&str, Range<usize>)> {
    let mut words = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match classify_char(c) {
            CharClass::Whitespace => {
                if let Some(s) = start.take() {
                    words.push((&text[s..i], s..i));
                }
            }
            CharClass::Punctuation => {
                if let Some(s) = start.take() {
                    words.push((&text[s..i], s..i));
                }
                let end = i + c.len_utf8();
                words.push((&text[i..end], i..end));
            }
            _ => {
                start.get_or_insert(i);
            }
        }
    }
    if let Some(s) = start {
        words.push((&text[s..], s..text.len()));
    }
    words
}
