//! Word lists: loading, normalization and content fingerprints.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use sha2::{Digest as _, Sha256};

use crate::error::DictionaryError;

pub const DEFAULT_WORD_LENGTH: usize = 5;

/// Longest supported word. Code indices must fit in a `u16` (3^10 = 59049).
pub const MAX_WORD_LENGTH: usize = 10;

/// A lowercase ASCII word of fixed length.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Box<str>);

impl Word {
    /// Normalizes (trim + lowercase) and validates `text` as a word of `word_length` letters.
    pub fn parse(text: &str, word_length: usize) -> Result<Word, DictionaryError> {
        let normalized = text.trim().to_lowercase();
        if normalized.chars().any(|c| !c.is_ascii_lowercase()) {
            return Err(DictionaryError::NonAsciiLetter {
                line: 0,
                word: normalized,
            });
        }
        if normalized.len() != word_length {
            return Err(DictionaryError::WrongLength {
                line: 0,
                word: normalized,
                expected: word_length,
            });
        }
        Ok(Word(normalized.into_boxed_str()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl AsRef<str> for Word {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// SHA-256 over the newline-joined sorted word list.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ListDigest(pub [u8; 32]);

impl ListDigest {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for ListDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for ListDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ListDigest({})", &self.to_hex()[..16])
    }
}

impl FromStr for ListDigest {
    type Err = hex::FromHexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bytes = [0u8; 32];
        hex::decode_to_slice(s, &mut bytes)?;
        Ok(ListDigest(bytes))
    }
}

/// A deduplicated, byte-order sorted list of words of one length.
///
/// Index `i` always refers to the `i`-th word in ascending order, so index
/// order doubles as alphabetical order for tie-breaking.
#[derive(Clone, PartialEq, Eq)]
pub struct WordList {
    words: Vec<Word>,
    word_length: usize,
    digest: ListDigest,
}

impl WordList {
    /// Builds a canonical list from already separated words.
    pub fn from_words<I, S>(words: I, word_length: usize) -> Result<WordList, DictionaryError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if word_length == 0 || word_length > MAX_WORD_LENGTH {
            return Err(DictionaryError::UnsupportedLength(word_length));
        }
        let mut parsed = Vec::new();
        for (n, raw) in words.into_iter().enumerate() {
            let word = Word::parse(raw.as_ref(), word_length).map_err(|e| e.at_line(n + 1))?;
            parsed.push(word);
        }
        Self::from_parsed(parsed, word_length)
    }

    fn from_parsed(mut words: Vec<Word>, word_length: usize) -> Result<WordList, DictionaryError> {
        words.sort_unstable();
        words.dedup();
        if words.is_empty() {
            return Err(DictionaryError::Empty);
        }
        let digest = digest_of(&words);
        Ok(WordList {
            words,
            word_length,
            digest,
        })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, index: usize) -> &Word {
        &self.words[index]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn digest(&self) -> ListDigest {
        self.digest
    }

    /// Position of `word` (after normalization), if present.
    pub fn index_of(&self, word: &str) -> Option<usize> {
        let normalized = word.trim().to_lowercase();
        self.words
            .binary_search_by(|w| w.as_str().cmp(normalized.as_str()))
            .ok()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index_of(word).is_some()
    }

    /// One word per line, the format `load_word_list` reads back.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.words.len() * (self.word_length + 1));
        for w in &self.words {
            out.push_str(w.as_str());
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for WordList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WordList")
            .field("size", &self.words.len())
            .field("word_length", &self.word_length)
            .field("digest", &self.digest)
            .finish()
    }
}

fn digest_of(words: &[Word]) -> ListDigest {
    let mut hasher = Sha256::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            hasher.update(b"\n");
        }
        hasher.update(w.as_bytes());
    }
    ListDigest(hasher.finalize().into())
}

/// Reads a line-delimited word list. Blank lines and `#` comments are skipped.
pub fn load_word_list<R: BufRead>(
    source: R,
    word_length: usize,
) -> Result<WordList, DictionaryError> {
    if word_length == 0 || word_length > MAX_WORD_LENGTH {
        return Err(DictionaryError::UnsupportedLength(word_length));
    }
    let mut words = Vec::new();
    for (n, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        words.push(Word::parse(trimmed, word_length).map_err(|e| e.at_line(n + 1))?);
    }
    WordList::from_parsed(words, word_length)
}

pub fn load_word_list_file(
    path: impl AsRef<std::path::Path>,
    word_length: usize,
) -> Result<WordList, DictionaryError> {
    let file = std::fs::File::open(path)?;
    load_word_list(std::io::BufReader::new(file), word_length)
}

pub fn word_list_digest(list: &WordList) -> ListDigest {
    list.digest
}
