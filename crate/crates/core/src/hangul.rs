//! Hangul syllable arithmetic and character classification.
//!
//! A precomposed syllable in U+AC00..=U+D7A3 is a (leading, vowel, trailing)
//! triple laid out as `0xAC00 + (leading * 21 + vowel) * 28 + trailing`.
//! Decomposition emits the modern conjoining jamo from the U+1100 block, which
//! is what canonical decomposition (NFD) produces for these syllables.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SYLLABLE_BASE: u32 = 0xAC00;
pub const LEADING_BASE: u32 = 0x1100;
pub const VOWEL_BASE: u32 = 0x1161;
/// One below the first trailing consonant; trailing index 0 means "none".
pub const TRAILING_BASE: u32 = 0x11A7;

pub const LEADING_COUNT: u32 = 19;
pub const VOWEL_COUNT: u32 = 21;
pub const TRAILING_COUNT: u32 = 28;
pub const BLOCK_COUNT: u32 = VOWEL_COUNT * TRAILING_COUNT;
pub const SYLLABLE_COUNT: u32 = LEADING_COUNT * BLOCK_COUNT;

const SYLLABLE_LAST: u32 = SYLLABLE_BASE + SYLLABLE_COUNT - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HangulError {
    #[error("NotASyllable: U+{:04X} is not a precomposed Hangul syllable", *.0 as u32)]
    NotASyllable(char),
}

/// Indices of a decomposed syllable.
///
/// `trailing == 0` means the syllable has no final consonant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JamoTriple {
    leading: u8,
    vowel: u8,
    trailing: u8,
}

impl JamoTriple {
    /// Returns `None` unless `leading < 19`, `vowel < 21` and `trailing < 28`.
    pub fn new(leading: u8, vowel: u8, trailing: u8) -> Option<Self> {
        if u32::from(leading) < LEADING_COUNT
            && u32::from(vowel) < VOWEL_COUNT
            && u32::from(trailing) < TRAILING_COUNT
        {
            Some(Self {
                leading,
                vowel,
                trailing,
            })
        } else {
            None
        }
    }

    pub fn leading(&self) -> u8 {
        self.leading
    }

    pub fn vowel(&self) -> u8 {
        self.vowel
    }

    pub fn trailing(&self) -> u8 {
        self.trailing
    }

    pub fn has_trailing(&self) -> bool {
        self.trailing != 0
    }

    pub fn leading_jamo(&self) -> char {
        from_u32(LEADING_BASE + u32::from(self.leading))
    }

    pub fn vowel_jamo(&self) -> char {
        from_u32(VOWEL_BASE + u32::from(self.vowel))
    }

    pub fn trailing_jamo(&self) -> Option<char> {
        self.has_trailing()
            .then(|| from_u32(TRAILING_BASE + u32::from(self.trailing)))
    }

    /// The two or three conjoining jamo, in order.
    pub fn jamo(&self) -> impl Iterator<Item = char> {
        [self.leading_jamo(), self.vowel_jamo()]
            .into_iter()
            .chain(self.trailing_jamo())
    }

    /// Number of conjoining jamo this syllable decomposes into.
    pub fn jamo_len(&self) -> usize {
        if self.has_trailing() {
            3
        } else {
            2
        }
    }
}

impl fmt::Display for JamoTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.leading, self.vowel, self.trailing)
    }
}

fn from_u32(cp: u32) -> char {
    // callers only pass values inside the Hangul blocks
    char::from_u32(cp).expect("Hangul codepoint")
}

pub fn is_syllable(c: char) -> bool {
    (SYLLABLE_BASE..=SYLLABLE_LAST).contains(&(c as u32))
}

/// Modern conjoining leading consonant (U+1100..=U+1112).
pub fn is_leading_jamo(c: char) -> bool {
    (LEADING_BASE..LEADING_BASE + LEADING_COUNT).contains(&(c as u32))
}

/// Modern conjoining vowel (U+1161..=U+1175).
pub fn is_vowel_jamo(c: char) -> bool {
    (VOWEL_BASE..VOWEL_BASE + VOWEL_COUNT).contains(&(c as u32))
}

/// Modern conjoining trailing consonant (U+11A8..=U+11C2).
pub fn is_trailing_jamo(c: char) -> bool {
    (TRAILING_BASE + 1..TRAILING_BASE + TRAILING_COUNT).contains(&(c as u32))
}

pub fn is_compatibility_jamo(c: char) -> bool {
    ('\u{3131}'..='\u{318E}').contains(&c)
}

pub fn decompose_syllable(c: char) -> Result<JamoTriple, HangulError> {
    if !is_syllable(c) {
        return Err(HangulError::NotASyllable(c));
    }
    let index = c as u32 - SYLLABLE_BASE;
    Ok(JamoTriple {
        leading: (index / BLOCK_COUNT) as u8,
        vowel: ((index % BLOCK_COUNT) / TRAILING_COUNT) as u8,
        trailing: (index % TRAILING_COUNT) as u8,
    })
}

pub fn compose_syllable(triple: JamoTriple) -> char {
    let index = (u32::from(triple.leading) * VOWEL_COUNT + u32::from(triple.vowel))
        * TRAILING_COUNT
        + u32::from(triple.trailing);
    from_u32(SYLLABLE_BASE + index)
}

/// Appends the decomposition of `c` to `out`; non-syllables are copied.
pub fn push_decomposed(out: &mut String, c: char) {
    match decompose_syllable(c) {
        Ok(triple) => out.extend(triple.jamo()),
        Err(_) => out.push(c),
    }
}

/// Replaces every precomposed syllable with its conjoining jamo.
pub fn decompose_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len() * 3);
    for c in s.chars() {
        push_decomposed(&mut out, c);
    }
    out
}

/// Recomposes maximal `L V [T]` conjoining jamo runs into syllables.
///
/// Anything that is not part of such a run, including precomposed syllables
/// followed by a stray trailing consonant, is left untouched.
pub fn compose_text(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if is_leading_jamo(c) && i + 1 < chars.len() && is_vowel_jamo(chars[i + 1]) {
            let leading = (c as u32 - LEADING_BASE) as u8;
            let vowel = (chars[i + 1] as u32 - VOWEL_BASE) as u8;
            let mut trailing = 0;
            i += 2;
            if i < chars.len() && is_trailing_jamo(chars[i]) {
                trailing = (chars[i] as u32 - TRAILING_BASE) as u8;
                i += 1;
            }
            out.push(compose_syllable(JamoTriple {
                leading,
                vowel,
                trailing,
            }));
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

// Compatibility consonants U+3131..=U+314E mapped to (leading index, trailing index).
const COMPAT_CONSONANTS: [(Option<u8>, Option<u8>); 30] = [
    (Some(0), Some(1)),   // ㄱ
    (Some(1), Some(2)),   // ㄲ
    (None, Some(3)),      // ㄳ
    (Some(2), Some(4)),   // ㄴ
    (None, Some(5)),      // ㄵ
    (None, Some(6)),      // ㄶ
    (Some(3), Some(7)),   // ㄷ
    (Some(4), None),      // ㄸ
    (Some(5), Some(8)),   // ㄹ
    (None, Some(9)),      // ㄺ
    (None, Some(10)),     // ㄻ
    (None, Some(11)),     // ㄼ
    (None, Some(12)),     // ㄽ
    (None, Some(13)),     // ㄾ
    (None, Some(14)),     // ㄿ
    (None, Some(15)),     // ㅀ
    (Some(6), Some(16)),  // ㅁ
    (Some(7), Some(17)),  // ㅂ
    (Some(8), None),      // ㅃ
    (None, Some(18)),     // ㅄ
    (Some(9), Some(19)),  // ㅅ
    (Some(10), Some(20)), // ㅆ
    (Some(11), Some(21)), // ㅇ
    (Some(12), Some(22)), // ㅈ
    (Some(13), None),     // ㅉ
    (Some(14), Some(23)), // ㅊ
    (Some(15), Some(24)), // ㅋ
    (Some(16), Some(25)), // ㅌ
    (Some(17), Some(26)), // ㅍ
    (Some(18), Some(27)), // ㅎ
];

fn compat_consonant(c: char) -> Option<(Option<u8>, Option<u8>)> {
    let cp = c as u32;
    (0x3131..=0x314E)
        .contains(&cp)
        .then(|| COMPAT_CONSONANTS[(cp - 0x3131) as usize])
}

fn compat_vowel(c: char) -> Option<char> {
    let cp = c as u32;
    (0x314F..=0x3163)
        .contains(&cp)
        .then(|| from_u32(VOWEL_BASE + cp - 0x314F))
}

/// Display form of a conjoining jamo; anything else is returned unchanged.
pub fn to_compatibility(c: char) -> char {
    let cp = c as u32;
    if is_vowel_jamo(c) {
        return from_u32(0x314F + cp - VOWEL_BASE);
    }
    let position = COMPAT_CONSONANTS.iter().position(|&(leading, trailing)| {
        if is_leading_jamo(c) {
            leading.map(|l| LEADING_BASE + u32::from(l)) == Some(cp)
        } else if is_trailing_jamo(c) {
            trailing.map(|t| TRAILING_BASE + u32::from(t)) == Some(cp)
        } else {
            false
        }
    });
    position.map_or(c, |i| from_u32(0x3131 + i as u32))
}

/// Brings human-authored sub-character text into the internal form.
///
/// Syllables are decomposed, and modern compatibility jamo (U+3131 block) are
/// mapped to conjoining jamo. A compatibility consonant followed by a vowel
/// becomes a leading consonant; otherwise it becomes a trailing consonant when
/// one exists (ㄸ, ㅃ and ㅉ never close a syllable).
pub fn to_conjoining(s: &str) -> String {
    let decomposed: Vec<char> = decompose_text(s).chars().collect();
    let mut out = String::with_capacity(decomposed.len() * 3);
    for (i, &c) in decomposed.iter().enumerate() {
        if let Some(v) = compat_vowel(c) {
            out.push(v);
        } else if let Some((leading, trailing)) = compat_consonant(c) {
            let before_vowel = decomposed
                .get(i + 1)
                .is_some_and(|&n| is_vowel_jamo(n) || compat_vowel(n).is_some());
            let mapped = match (before_vowel, leading, trailing) {
                (true, Some(l), _) | (false, Some(l), None) => LEADING_BASE + u32::from(l),
                (_, _, Some(t)) => TRAILING_BASE + u32::from(t),
                (_, None, None) => unreachable!("every compatibility consonant has a form"),
            };
            out.push(from_u32(mapped));
        } else {
            out.push(c);
        }
    }
    out
}

/// Reads compatibility jamo back into conjoining form using their neighbours,
/// then composes.
///
/// A consonant followed by a vowel becomes a leading consonant; one that
/// follows a vowel becomes a final consonant; a vowel joins a preceding
/// leading consonant. Jamo with no such context stay compatibility jamo.
pub fn restore_jamo(s: &str) -> String {
    let decomposed: Vec<char> = decompose_text(s).chars().collect();
    let mut out: Vec<char> = Vec::with_capacity(decomposed.len());
    for (i, &c) in decomposed.iter().enumerate() {
        let previous = out.last().copied();
        let mapped = if let Some(v) = compat_vowel(c) {
            if previous.is_some_and(is_leading_jamo) {
                v
            } else {
                c
            }
        } else if let Some((leading, trailing)) = compat_consonant(c) {
            let before_vowel = decomposed
                .get(i + 1)
                .is_some_and(|&n| is_vowel_jamo(n) || compat_vowel(n).is_some());
            let after_vowel = previous.is_some_and(is_vowel_jamo);
            match (before_vowel, leading, after_vowel, trailing) {
                (true, Some(l), _, _) => from_u32(LEADING_BASE + u32::from(l)),
                (false, _, true, Some(t)) => from_u32(TRAILING_BASE + u32::from(t)),
                _ => c,
            }
        } else {
            c
        };
        out.push(mapped);
    }
    compose_text(&out.into_iter().collect::<String>())
}

/// Every modern conjoining jamo: 19 leading, 21 vowels, 27 trailing.
pub fn conjoining_jamo() -> impl Iterator<Item = char> {
    let leading = (0..LEADING_COUNT).map(|i| from_u32(LEADING_BASE + i));
    let vowels = (0..VOWEL_COUNT).map(|i| from_u32(VOWEL_BASE + i));
    let trailing = (1..TRAILING_COUNT).map(|i| from_u32(TRAILING_BASE + i));
    leading.chain(vowels).chain(trailing)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CharClass {
    HangulSyllable,
    HangulJamo,
    Latin,
    Digit,
    Punctuation,
    Whitespace,
    OtherCjk,
    Other,
}

impl CharClass {
    pub fn is_hangul(self) -> bool {
        matches!(self, CharClass::HangulSyllable | CharClass::HangulJamo)
    }

    pub fn name(self) -> &'static str {
        match self {
            CharClass::HangulSyllable => "hangul_syllable",
            CharClass::HangulJamo => "hangul_jamo",
            CharClass::Latin => "latin",
            CharClass::Digit => "digit",
            CharClass::Punctuation => "punctuation",
            CharClass::Whitespace => "whitespace",
            CharClass::OtherCjk => "other_cjk",
            CharClass::Other => "other",
        }
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_char(c: char) -> CharClass {
    let cp = c as u32;
    if c.is_whitespace() {
        CharClass::Whitespace
    } else if is_syllable(c) {
        CharClass::HangulSyllable
    } else if matches!(cp, 0x1100..=0x11FF | 0x3131..=0x318E | 0xA960..=0xA97F | 0xD7B0..=0xD7FF | 0xFFA0..=0xFFDC)
    {
        CharClass::HangulJamo
    } else if c.is_ascii_digit() || ('\u{FF10}'..='\u{FF19}').contains(&c) {
        CharClass::Digit
    } else if is_latin_letter(c) {
        CharClass::Latin
    } else if is_punctuation(c) {
        CharClass::Punctuation
    } else if is_other_cjk(cp) {
        CharClass::OtherCjk
    } else {
        CharClass::Other
    }
}

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || matches!(c as u32, 0x00C0..=0x024F | 0x1E00..=0x1EFF | 0xFF21..=0xFF3A | 0xFF41..=0xFF5A)
            && c.is_alphabetic()
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c as u32,
            0x00A1 | 0x00A7 | 0x00AB | 0x00B6 | 0x00B7 | 0x00BB | 0x00BF
                | 0x2010..=0x2027
                | 0x2030..=0x205E
                | 0x3001..=0x3003
                | 0x3008..=0x3011
                | 0x3014..=0x301F
                | 0x30FB
                | 0xFF01..=0xFF0F
                | 0xFF1A..=0xFF20
                | 0xFF3B..=0xFF40
                | 0xFF5B..=0xFF65
        )
}

fn is_other_cjk(cp: u32) -> bool {
    matches!(
        cp,
        0x2E80..=0x2FDF
            | 0x3004..=0x3007
            | 0x3012..=0x3013
            | 0x3020..=0x30FF
            | 0x3190..=0x31FF
            | 0x3200..=0x33FF
            | 0x3400..=0x4DBF
            | 0x4E00..=0x9FFF
            | 0xF900..=0xFAFF
            | 0xFF66..=0xFF9F
            | 0x20000..=0x2FA1F
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(l: u8, v: u8, t: u8) -> JamoTriple {
        JamoTriple::new(l, v, t).unwrap()
    }

    #[test]
    fn decomposes_went() {
        assert_eq!(decompose_syllable('갔').unwrap(), triple(0, 0, 20));
        assert_eq!(decompose_syllable('가').unwrap(), triple(0, 0, 0));
        assert_eq!(decompose_syllable('뜀').unwrap(), triple(4, 16, 16));
    }

    #[test]
    fn composes_known_triples() {
        assert_eq!(compose_syllable(triple(0, 0, 20)), '갔');
        assert_eq!(compose_syllable(triple(0, 0, 0)), '가');
        assert_eq!(compose_syllable(triple(4, 16, 16)), '뜀');
    }

    #[test]
    fn rejects_non_syllables() {
        assert_eq!(decompose_syllable('a'), Err(HangulError::NotASyllable('a')));
        assert!(decompose_syllable('\u{1100}').is_err());
        assert!(decompose_syllable('\u{D7A4}').is_err());
        assert!(decompose_syllable('\u{ABFF}').is_err());
    }

    #[test]
    fn triple_bounds() {
        assert!(JamoTriple::new(18, 20, 27).is_some());
        assert!(JamoTriple::new(19, 0, 0).is_none());
        assert!(JamoTriple::new(0, 21, 0).is_none());
        assert!(JamoTriple::new(0, 0, 28).is_none());
    }

    #[test]
    fn decompose_text_examples() {
        assert_eq!(
            decompose_text("갔다"),
            "\u{1100}\u{1161}\u{11BB}\u{1103}\u{1161}"
        );
        assert_eq!(decompose_text("갔다").chars().count(), 5);
        assert_eq!(decompose_text(""), "");
        let mut expected = String::from("a");
        expected.extend(decompose_syllable('뜀').unwrap().jamo());
        expected.push('!');
        assert_eq!(decompose_text("a뜀!"), expected);
    }

    #[test]
    fn compose_text_leaves_stray_jamo() {
        assert_eq!(compose_text(&decompose_text("갔")), "갔");
        assert_eq!(compose_text("\u{1100}"), "\u{1100}");
        assert_eq!(compose_text("\u{11BB}\u{1161}"), "\u{11BB}\u{1161}");
        // trailing without a preceding L V stays put
        assert_eq!(compose_text("가\u{11A8}"), "가\u{11A8}");
    }

    #[test]
    fn decompose_is_idempotent() {
        let once = decompose_text("힉! 냉장고 abc 뱃사람");
        assert_eq!(decompose_text(&once), once);
        assert!(!once.chars().any(is_syllable));
    }

    #[test]
    fn classification() {
        assert_eq!(classify_char('힉'), CharClass::HangulSyllable);
        assert_eq!(classify_char('\u{1161}'), CharClass::HangulJamo);
        assert_eq!(classify_char('ㅋ'), CharClass::HangulJamo);
        assert_eq!(classify_char('7'), CharClass::Digit);
        assert_eq!(classify_char('q'), CharClass::Latin);
        assert_eq!(classify_char('é'), CharClass::Latin);
        assert_eq!(classify_char('.'), CharClass::Punctuation);
        assert_eq!(classify_char('。'), CharClass::Punctuation);
        assert_eq!(classify_char('…'), CharClass::Punctuation);
        assert_eq!(classify_char(' '), CharClass::Whitespace);
        assert_eq!(classify_char('\u{3000}'), CharClass::Whitespace);
        assert_eq!(classify_char('漢'), CharClass::OtherCjk);
        assert_eq!(classify_char('カ'), CharClass::OtherCjk);
        assert_eq!(classify_char('♥'), CharClass::Other);
        assert_eq!(classify_char('×'), CharClass::Other);
    }

    #[test]
    fn compatibility_jamo_context() {
        // ㅂ before a leading consonant closes the previous syllable
        assert_eq!(to_conjoining("ㅂ다"), "\u{11B8}\u{1103}\u{1161}");
        // before a vowel it opens one
        assert_eq!(to_conjoining("ㅂㅏ"), "\u{1107}\u{1161}");
        assert_eq!(to_conjoining("ㅅ"), "\u{11BA}");
        // ㄸ has no trailing form
        assert_eq!(to_conjoining("ㄸ"), "\u{1104}");
        assert_eq!(to_conjoining("ㄳ"), "\u{11AA}");
        assert_eq!(to_conjoining("ab"), "ab");
        assert_eq!(restore_jamo("추ㅂ다"), "춥다");
        assert_eq!(restore_jamo("배ㅅ사람"), "뱃사람");
        assert_eq!(restore_jamo("재미ㅅ는데ㅇ"), "재밋는뎅");
        assert_eq!(restore_jamo("가ㄱㅏ"), "가가");
        assert_eq!(restore_jamo("ㅋㅋ"), "ㅋㅋ");
        assert_eq!(restore_jamo("ㅠㅠ"), "ㅠㅠ");
        assert_eq!(restore_jamo("가ㄸ"), "가ㄸ");
        assert_eq!(restore_jamo("가나"), "가나");
    }

    #[test]
    fn compatibility_table_matches_names() {
        // each form listed in the table is reachable from its context
        for (i, (leading, trailing)) in COMPAT_CONSONANTS.iter().enumerate() {
            let compat = from_u32(0x3131 + i as u32);
            if let Some(t) = trailing {
                let conj = from_u32(TRAILING_BASE + u32::from(*t));
                assert_eq!(to_conjoining(&compat.to_string()), conj.to_string());
            }
            if let Some(l) = leading {
                let conj = from_u32(LEADING_BASE + u32::from(*l));
                let s = format!("{compat}ㅏ");
                assert!(to_conjoining(&s).starts_with(conj));
            }
        }
    }

    #[test]
    fn jamo_inventory() {
        let all: Vec<char> = conjoining_jamo().collect();
        assert_eq!(all.len(), 67);
        assert!(all
            .iter()
            .all(|&c| classify_char(c) == CharClass::HangulJamo));
    }
}
