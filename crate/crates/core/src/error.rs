use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DictionaryError {
    #[error("line {line}: {word:?} contains a character outside a-z")]
    NonAsciiLetter { line: usize, word: String },
    #[error("line {line}: {word:?} has {} letters, expected {expected}", word.chars().count())]
    WrongLength {
        line: usize,
        word: String,
        expected: usize,
    },
    #[error("word list is empty")]
    Empty,
    #[error("unsupported word length {0}")]
    UnsupportedLength(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl DictionaryError {
    pub(crate) fn at_line(self, n: usize) -> Self {
        match self {
            DictionaryError::NonAsciiLetter { word, .. } => {
                DictionaryError::NonAsciiLetter { line: n, word }
            }
            DictionaryError::WrongLength { word, expected, .. } => DictionaryError::WrongLength {
                line: n,
                word,
                expected,
            },
            other => other,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeedbackError {
    #[error("guess has {guess} letters but answer has {answer}")]
    LengthMismatch { guess: usize, answer: usize },
    #[error("code index {value} out of range for word length {word_length}")]
    OutOfRange { value: u32, word_length: usize },
    #[error("invalid color code {0:?}: expected only G, Y or B")]
    BadMark(String),
    #[error("color code {code:?} has {got} marks, expected {expected}")]
    WrongCodeLength {
        code: String,
        got: usize,
        expected: usize,
    },
}

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("guess and answer lists have different word lengths ({guess} vs {answer})")]
    WordLengthMismatch { guess: usize, answer: usize },
    #[error("cannot allocate {bytes} bytes for a {rows}x{cols} code matrix")]
    OutOfMemory { rows: usize, cols: usize, bytes: usize },
    #[error("cache was built from a different word list ({which} digest mismatch)")]
    StaleCache { which: &'static str },
    #[error("corrupt cache file: {0}")]
    CorruptCache(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("feedback contradicts every remaining answer")]
    InconsistentFeedback,
    #[error("row {0} is not available as a guess")]
    NotAGuessRow(usize),
    #[error("all-green feedback ends the game")]
    AlreadySolved,
    #[error("hard mode needs every answer word to be in the guess list")]
    AnswersNotGuessable,
}

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("p = 0 is not a valid scoring exponent")]
    ZeroExponent,
    #[error("invalid score mode {0:?}: expected a nonzero number, inf or -inf")]
    BadMode(String),
    #[error("tie-break list must not be empty")]
    EmptyTieBreak,
    #[error("answer prior has no mass on the current viable set")]
    ZeroPriorMass,
    #[error("prior weight for {word:?} must be finite and nonnegative")]
    BadWeight { word: String },
    #[error("prior line {line}: {message}")]
    BadPriorLine { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("answer {0:?} is not in the answer pool")]
    UnknownAnswer(String),
    #[error("game for {answer:?} exceeded {cap} rounds without resolving")]
    RoundCap { answer: String, cap: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}
