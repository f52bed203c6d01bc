//! Vocabulary and merge files.
//!
//! The native vocab format is a three-line header followed by one
//! `token<TAB>frequency` line per entry, ids following line order:
//!
//! ```text
//! #hpv1
//! level=subcharacter
//! count=12367
//! [PAD]<TAB>0
//! ...
//! ```
//!
//! Each entry line is `token`, a tab, then the frequency.
//!
//! Files that do not start with `#hpv1` are read as plain BERT `vocab.txt`
//! (one token per line, character level, zero frequencies).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::hangul;

use super::{GranularityLevel, MergeRule, VocabError, Vocabulary};

const MAGIC: &str = "#hpv1";

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> VocabError + '_ {
    move |source| VocabError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_vocab<W: Write>(vocab: &Vocabulary, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "level={}", vocab.level())?;
    writeln!(out, "count={}", vocab.len())?;
    for entry in vocab.entries() {
        writeln!(out, "{}\t{}", entry.token, entry.frequency)?;
    }
    out.flush()
}

pub fn save_vocab(vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<(), VocabError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_error(path))?;
    write_vocab(vocab, BufWriter::new(file)).map_err(io_error(path))
}

fn read_lines<R: Read>(input: R) -> std::io::Result<Vec<String>> {
    let mut text = String::new();
    BufReader::new(input).read_to_string(&mut text)?;
    let mut lines: Vec<String> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_owned())
        .collect();
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    Ok(lines)
}

fn header_value<'a>(lines: &'a [String], index: usize, key: &str) -> Result<&'a str, VocabError> {
    let line = lines
        .get(index)
        .ok_or_else(|| VocabError::parse(index + 1, format!("missing header line `{key}=`")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| {
            VocabError::parse(index + 1, format!("expected `{key}=...`, found {line:?}"))
        })
}

/// Reads either format; headerless input becomes a character-level vocabulary.
pub fn read_vocab<R: Read>(input: R) -> Result<Vocabulary, VocabError> {
    let lines = read_lines(input).map_err(|source| VocabError::Io {
        path: "<input>".into(),
        source,
    })?;
    if lines.first().map(String::as_str) != Some(MAGIC) {
        return parse_plain(&lines, GranularityLevel::Character, false);
    }

    let level: GranularityLevel = header_value(&lines, 1, "level")?
        .parse()
        .map_err(|e: String| VocabError::parse(2, e))?;
    let count: usize = header_value(&lines, 2, "count")?
        .parse()
        .map_err(|e| VocabError::parse(3, format!("bad count: {e}")))?;

    let mut vocab = Vocabulary {
        level,
        ..Vocabulary::empty()
    };
    for (i, line) in lines.iter().enumerate().skip(3) {
        let line_no = i + 1;
        let (token, freq) = line
            .rsplit_once('\t')
            .ok_or_else(|| VocabError::parse(line_no, "expected `token<TAB>frequency`"))?;
        let frequency = freq
            .parse::<u64>()
            .map_err(|e| VocabError::parse(line_no, format!("bad frequency {freq:?}: {e}")))?;
        vocab
            .push(token.to_owned(), frequency)
            .map_err(|e| VocabError::parse(line_no, e.to_string()))?;
    }
    if vocab.len() != count {
        return Err(VocabError::parse(
            3,
            format!("header declares {count} entries, file has {}", vocab.len()),
        ));
    }
    vocab.finish()
}

fn parse_plain(
    lines: &[String],
    level: GranularityLevel,
    normalize: bool,
) -> Result<Vocabulary, VocabError> {
    let mut vocab = Vocabulary {
        level,
        ..Vocabulary::empty()
    };
    for (i, line) in lines.iter().enumerate() {
        let token = if normalize {
            let (continuation, body) = super::strip_marker(line);
            let body = hangul::to_conjoining(body);
            if continuation {
                format!("{}{body}", super::CONTINUATION)
            } else {
                body
            }
        } else {
            line.clone()
        };
        vocab
            .push(token, 0)
            .map_err(|e| VocabError::parse(i + 1, e.to_string()))?;
    }
    vocab.finish()
}

pub fn load_vocab(path: impl AsRef<Path>) -> Result<Vocabulary, VocabError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_error(path))?;
    read_vocab(file)
}

/// Imports a plain one-token-per-line `vocab.txt`.
///
/// At sub-character level, syllables are decomposed and compatibility jamo
/// are mapped to conjoining jamo, so lists written as `##ㅂ다` match the
/// tokenizer's internal units.
pub fn import_bert_vocab(
    path: impl AsRef<Path>,
    level: GranularityLevel,
) -> Result<Vocabulary, VocabError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_error(path))?;
    let lines = read_lines(file).map_err(io_error(path))?;
    parse_plain(&lines, level, level == GranularityLevel::SubCharacter)
}

pub fn export_bert_vocab(vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<(), VocabError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_error(path))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        for entry in vocab.entries() {
            writeln!(out, "{}", entry.token)?;
        }
        out.flush()
    };
    write(&mut out).map_err(io_error(path))
}

pub fn write_merges<W: Write>(merges: &[MergeRule], mut out: W) -> std::io::Result<()> {
    for rule in merges {
        writeln!(out, "{}\t{}", rule.left, rule.right)?;
    }
    out.flush()
}

pub fn save_merges(merges: &[MergeRule], path: impl AsRef<Path>) -> Result<(), VocabError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_error(path))?;
    write_merges(merges, BufWriter::new(file)).map_err(io_error(path))
}

pub fn read_merges<R: Read>(input: R) -> Result<Vec<MergeRule>, VocabError> {
    let reader = BufReader::new(input);
    let mut merges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| VocabError::Io {
            path: "<input>".into(),
            source,
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let (left, right) = line
            .split_once('\t')
            .filter(|(l, r)| !l.is_empty() && !r.is_empty() && !r.contains('\t'))
            .ok_or_else(|| VocabError::parse(i + 1, "expected `left<TAB>right`"))?;
        merges.push(MergeRule::new(left, right, merges.len()));
    }
    Ok(merges)
}

pub fn load_merges(path: impl AsRef<Path>) -> Result<Vec<MergeRule>, VocabError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_error(path))?;
    read_merges(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vocabulary {
        Vocabulary::with_specials(
            GranularityLevel::SubCharacter,
            [("\u{1100}\u{1161}", 7), ("##\u{11BA}", 2), ("!", 0)],
        )
        .unwrap()
    }

    fn to_string(v: &Vocabulary) -> String {
        let mut buf = Vec::new();
        write_vocab(v, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn native_round_trip() {
        let v = sample();
        let text = to_string(&v);
        assert!(text.starts_with("#hpv1\nlevel=subcharacter\ncount=8\n[PAD]\t0\n"));
        assert_eq!(read_vocab(text.as_bytes()).unwrap(), v);
    }

    #[test]
    fn duplicate_reports_its_line() {
        let mut text = String::from("#hpv1\nlevel=character\ncount=43\n");
        for t in crate::vocab::SPECIAL_TOKENS {
            text.push_str(&format!("{t}\t0\n"));
        }
        // lines 9..=41 hold t0..t32, line 42 repeats t0
        for i in 0..33 {
            text.push_str(&format!("t{i}\t1\n"));
        }
        text.push_str("t0\t1\n");
        match read_vocab(text.as_bytes()) {
            Err(VocabError::Parse { line, .. }) => assert_eq!(line, 42),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        let bad = [
            ("#hpv1\ncount=1\n", 2),
            ("#hpv1\nlevel=character\n", 3),
            ("#hpv1\nlevel=bytes\ncount=0\n", 2),
            ("#hpv1\nlevel=character\ncount=1\n[UNK]\n", 4),
            ("#hpv1\nlevel=character\ncount=1\n[UNK]\tx\n", 4),
            ("#hpv1\nlevel=character\ncount=2\n[UNK]\t0\n", 3),
        ];
        for (text, expected) in bad {
            match read_vocab(text.as_bytes()) {
                Err(VocabError::Parse { line, .. }) => assert_eq!(line, expected, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn plain_vocab_is_interop_mode() {
        let text = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n가\n##다\n";
        let v = read_vocab(text.as_bytes()).unwrap();
        assert_eq!(v.level(), GranularityLevel::Character);
        assert_eq!(v.len(), 7);
        assert!(v.entries().iter().all(|e| e.frequency == 0));
        assert_eq!(v.id("##다"), Some(6));
    }

    #[test]
    fn plain_vocab_needs_unk() {
        assert!(matches!(
            read_vocab("가\n나\n".as_bytes()),
            Err(VocabError::MissingSpecial(_))
        ));
    }

    #[test]
    fn import_maps_compatibility_jamo() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.txt");
        std::fs::write(&path, "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n추\n##ㅂ다\n").unwrap();
        let v = import_bert_vocab(&path, GranularityLevel::SubCharacter).unwrap();
        assert!(v.contains("\u{110E}\u{116E}"));
        assert!(v.contains("##\u{11B8}\u{1103}\u{1161}"));

        let out = dir.path().join("out.txt");
        export_bert_vocab(&v, &out).unwrap();
        let back = import_bert_vocab(&out, GranularityLevel::SubCharacter).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn merges_round_trip() {
        let merges = vec![
            MergeRule::new("가", "##다", 0),
            MergeRule::new("가다", "##가", 1),
        ];
        let mut buf = Vec::new();
        write_merges(&merges, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "가\t##다\n가다\t##가\n"
        );
        assert_eq!(read_merges(buf.as_slice()).unwrap(), merges);
        assert!(matches!(
            read_merges("a b\n".as_bytes()),
            Err(VocabError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        save_vocab(&sample(), &path).unwrap();
        assert_eq!(load_vocab(&path).unwrap(), sample());
        assert!(matches!(
            load_vocab(dir.path().join("missing")),
            Err(VocabError::Io { .. })
        ));
    }
}
