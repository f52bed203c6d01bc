//! Plain-text corpus ingestion: sentence splitting and word counting.

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hangul::compose_text;
use crate::tokenizer::pre_tokenize;
use crate::vocab::GranularityLevel;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    Encoding { path: String, offset: u64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    None,
    /// Recompose conjoining jamo runs into syllables.
    #[default]
    PrecomposeHangul,
}

pub enum Source {
    Path(PathBuf),
    Reader {
        name: String,
        reader: Box<dyn Read + Send>,
    },
}

impl Source {
    pub fn path(path: impl Into<PathBuf>) -> Self {
        Source::Path(path.into())
    }

    pub fn reader(name: impl Into<String>, reader: impl Read + Send + 'static) -> Self {
        Source::Reader {
            name: name.into(),
            reader: Box::new(reader),
        }
    }

    fn name(&self) -> String {
        match self {
            Source::Path(p) => p.display().to_string(),
            Source::Reader { name, .. } => name.clone(),
        }
    }
}

/// Reads sentences from a list of sources, in order.
pub struct CorpusReader {
    pub sources: Vec<Source>,
    pub normalization: Normalization,
    pub sentence_split: bool,
}

impl CorpusReader {
    pub fn new(sources: Vec<Source>) -> Self {
        CorpusReader {
            sources,
            normalization: Normalization::default(),
            sentence_split: true,
        }
    }

    pub fn from_paths<P: AsRef<Path>>(paths: &[P]) -> Self {
        Self::new(paths.iter().map(|p| Source::path(p.as_ref())).collect())
    }

    pub fn from_text(text: impl Into<String>) -> Self {
        let text = text.into();
        Self::new(vec![Source::reader(
            "<text>",
            std::io::Cursor::new(text.into_bytes()),
        )])
    }

    pub fn sentence_split(mut self, on: bool) -> Self {
        self.sentence_split = on;
        self
    }

    pub fn normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn sentences(self) -> Sentences {
        Sentences {
            sources: self.sources.into_iter(),
            current: None,
            normalization: self.normalization,
            sentence_split: self.sentence_split,
            pending: VecDeque::new(),
            buffer: String::new(),
            failed: false,
        }
    }
}

pub fn read_sentences(reader: CorpusReader) -> Sentences {
    reader.sentences()
}

struct OpenSource {
    name: String,
    input: Box<dyn BufRead + Send>,
    offset: u64,
}

fn open(source: Source) -> Result<OpenSource, CorpusError> {
    let name = source.name();
    let raw: Box<dyn Read + Send> = match source {
        Source::Path(path) => Box::new(File::open(&path).map_err(|source| CorpusError::Io {
            path: name.clone(),
            source,
        })?),
        Source::Reader { reader, .. } => reader,
    };
    let mut buffered = BufReader::new(raw);
    let magic = buffered.fill_buf().map_err(|source| CorpusError::Io {
        path: name.clone(),
        source,
    })?;
    let input: Box<dyn BufRead + Send> = if magic.starts_with(&[0x1f, 0x8b]) {
        Box::new(BufReader::new(MultiGzDecoder::new(buffered)))
    } else {
        Box::new(buffered)
    };
    Ok(OpenSource {
        name,
        input,
        offset: 0,
    })
}

/// Drops control characters; control whitespace (tab, CR, ...) becomes a space.
fn clean(line: &str) -> String {
    line.chars()
        .filter_map(|c| {
            if c.is_control() {
                c.is_whitespace().then_some(' ')
            } else {
                Some(c)
            }
        })
        .collect()
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '。' | '．' | '！' | '？' | '…')
}

fn is_closing(c: char) -> bool {
    matches!(
        c,
        '"' | '\'' | ')' | ']' | '”' | '’' | '」' | '』' | '》' | '〉' | '）'
    )
}

/// Splits after a run of terminal punctuation (plus closing quotes) that is
/// followed by whitespace. Returns the finished sentences and the remainder,
/// which is unterminated unless it ends with terminal punctuation.
fn split_terminated(text: &str) -> (Vec<String>, String) {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if is_terminal(chars[i].1) {
            let mut j = i;
            while j < chars.len() && is_terminal(chars[j].1) {
                j += 1;
            }
            while j < chars.len() && is_closing(chars[j].1) {
                j += 1;
            }
            if j < chars.len() && chars[j].1.is_whitespace() {
                let cut = chars[j].0;
                let sentence = text[start..cut].trim();
                if !sentence.is_empty() {
                    sentences.push(sentence.to_owned());
                }
                start = cut;
            }
            i = j;
        } else {
            i += 1;
        }
    }
    (sentences, text[start..].trim().to_owned())
}

fn ends_terminated(text: &str) -> bool {
    text.trim_end()
        .chars()
        .rev()
        .find(|&c| !is_closing(c))
        .is_some_and(is_terminal)
}

/// Iterator over sentences; stops after the first error.
pub struct Sentences {
    sources: std::vec::IntoIter<Source>,
    current: Option<OpenSource>,
    normalization: Normalization,
    sentence_split: bool,
    pending: VecDeque<String>,
    buffer: String,
    failed: bool,
}

impl Sentences {
    fn flush_buffer(&mut self) {
        let rest = std::mem::take(&mut self.buffer);
        let rest = rest.trim();
        if !rest.is_empty() {
            self.pending.push_back(rest.to_owned());
        }
    }

    fn take_line(&mut self, line: String) {
        let line = clean(&line);
        let line = match self.normalization {
            Normalization::None => line,
            Normalization::PrecomposeHangul => compose_text(&line),
        };
        if !self.sentence_split {
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                self.pending.push_back(trimmed.to_owned());
            }
            return;
        }
        if line.trim().is_empty() {
            self.flush_buffer();
            return;
        }
        if !self.buffer.is_empty() {
            self.buffer.push(' ');
        }
        self.buffer.push_str(line.trim());
        let (done, rest) = split_terminated(&self.buffer);
        self.pending.extend(done);
        self.buffer = rest;
        if ends_terminated(&self.buffer) {
            self.flush_buffer();
        }
    }

    /// Reads one line from the current source. `Ok(false)` at end of input.
    fn advance(&mut self) -> Result<bool, CorpusError> {
        loop {
            if self.current.is_none() {
                match self.sources.next() {
                    Some(source) => self.current = Some(open(source)?),
                    None => {
                        self.flush_buffer();
                        return Ok(false);
                    }
                }
            }
            let src = self.current.as_mut().expect("opened above");
            let mut bytes = Vec::new();
            let n = src
                .input
                .read_until(b'\n', &mut bytes)
                .map_err(|source| CorpusError::Io {
                    path: src.name.clone(),
                    source,
                })?;
            if n == 0 {
                // sources are separate documents
                self.current = None;
                self.flush_buffer();
                if !self.pending.is_empty() {
                    return Ok(true);
                }
                continue;
            }
            let line = match String::from_utf8(bytes) {
                Ok(line) => line,
                Err(e) => {
                    return Err(CorpusError::Encoding {
                        path: src.name.clone(),
                        offset: src.offset + e.utf8_error().valid_up_to() as u64,
                    })
                }
            };
            src.offset += n as u64;
            self.take_line(line);
            return Ok(true);
        }
    }
}

impl Iterator for Sentences {
    type Item = Result<String, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(sentence) = self.pending.pop_front() {
                return Some(Ok(sentence));
            }
            if self.failed {
                return None;
            }
            match self.advance() {
                Ok(true) => continue,
                Ok(false) if self.pending.is_empty() => return None,
                Ok(false) => continue,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Exact word counts, in level units.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordFrequency {
    counts: HashMap<String, u64>,
}

impl WordFrequency {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, word: &str, count: u64) {
        if count == 0 {
            return;
        }
        match self.counts.get_mut(word) {
            Some(c) => *c += count,
            None => {
                self.counts.insert(word.to_owned(), count);
            }
        }
    }

    pub fn merge(&mut self, other: WordFrequency) {
        for (word, count) in other.counts {
            *self.counts.entry(word).or_default() += count;
        }
    }

    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Entries ordered by word.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut out: Vec<_> = self.counts.iter().map(|(w, &c)| (w.as_str(), c)).collect();
        out.sort_unstable();
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }
}

impl<'a> IntoIterator for &'a WordFrequency {
    type Item = (&'a str, u64);
    type IntoIter = std::vec::IntoIter<(&'a str, u64)>;

    fn into_iter(self) -> Self::IntoIter {
        self.sorted().into_iter()
    }
}

/// Adds every pre-tokenized word of `sentence` to `counts`.
pub fn count_sentence(counts: &mut WordFrequency, sentence: &str, level: GranularityLevel) {
    for (word, _) in pre_tokenize(sentence) {
        match level {
            GranularityLevel::Character => counts.add(word, 1),
            GranularityLevel::SubCharacter => counts.add(&level.prepare(word), 1),
        }
    }
}

pub fn count_words<I, S>(sentences: I, level: GranularityLevel) -> WordFrequency
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts = WordFrequency::new();
    for sentence in sentences {
        count_sentence(&mut counts, sentence.as_ref(), level);
    }
    counts
}

/// Counts words across files concurrently; the sum is order-independent.
pub fn count_files<P: AsRef<Path> + Sync>(
    paths: &[P],
    level: GranularityLevel,
    sentence_split: bool,
) -> Result<WordFrequency, CorpusError> {
    let partials: Vec<Result<WordFrequency, CorpusError>> = paths
        .par_iter()
        .map(|path| {
            let reader = CorpusReader::from_paths(&[path.as_ref()]).sentence_split(sentence_split);
            let mut counts = WordFrequency::new();
            for sentence in reader.sentences() {
                count_sentence(&mut counts, &sentence?, level);
            }
            Ok(counts)
        })
        .collect();
    let mut total = WordFrequency::new();
    for partial in partials {
        total.merge(partial?);
    }
    Ok(total)
}
