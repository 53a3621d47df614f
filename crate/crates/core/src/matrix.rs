//! The guess x answer color-code matrix, its on-disk cache, and live game state.
//!
//! A game never copies the matrix: round `m` is a view over it made of the
//! surviving answer columns (the viable set) and the still-available guess rows.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::dictionary::{ListDigest, Word, WordList};
use crate::error::{GameError, MatrixError};
use crate::feedback::{code_space, color_count_table, colorize_bytes, CodeIndex};

const MAGIC: &[u8; 4] = b"WCCM";
const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 8 + 32 + 32;

#[derive(Clone, PartialEq, Eq)]
enum Cells {
    /// One byte per cell, word length <= 5.
    Narrow(Vec<u8>),
    Wide(Vec<u16>),
}

/// Borrowed view of one matrix row.
#[derive(Clone, Copy)]
pub enum RowCodes<'a> {
    Narrow(&'a [u8]),
    Wide(&'a [u16]),
}

impl RowCodes<'_> {
    #[inline]
    pub fn at(&self, col: usize) -> usize {
        match self {
            RowCodes::Narrow(r) => r[col] as usize,
            RowCodes::Wide(r) => r[col] as usize,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct CodeMatrix {
    cells: Cells,
    rows: usize,
    cols: usize,
    word_length: usize,
    guess_digest: ListDigest,
    answer_digest: ListDigest,
}

impl std::fmt::Debug for CodeMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CodeMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("word_length", &self.word_length)
            .finish()
    }
}

fn cell_width(word_length: usize) -> usize {
    if word_length <= 5 {
        1
    } else {
        2
    }
}

fn allocate<T: Clone + Default>(rows: usize, cols: usize) -> Result<Vec<T>, MatrixError> {
    let len = rows.checked_mul(cols);
    let bytes = len.map(|l| l.saturating_mul(std::mem::size_of::<T>()));
    let oom = || MatrixError::OutOfMemory {
        rows,
        cols,
        bytes: bytes.unwrap_or(usize::MAX),
    };
    let len = len.ok_or_else(oom)?;
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| oom())?;
    v.resize(len, T::default());
    Ok(v)
}

/// Computes every (guess, answer) code, parallel over contiguous row blocks.
pub fn precompute_matrix(guesses: &WordList, answers: &WordList) -> Result<CodeMatrix, MatrixError> {
    if guesses.word_length() != answers.word_length() {
        return Err(MatrixError::WordLengthMismatch {
            guess: guesses.word_length(),
            answer: answers.word_length(),
        });
    }
    let (rows, cols) = (guesses.len(), answers.len());
    let word_length = guesses.word_length();
    let answer_bytes: Vec<&[u8]> = answers.words().iter().map(Word::as_bytes).collect();
    let cells = if cell_width(word_length) == 1 {
        let mut cells: Vec<u8> = allocate(rows, cols)?;
        cells
            .par_chunks_mut(cols)
            .zip(guesses.words().par_iter())
            .for_each(|(row, guess)| {
                let g = guess.as_bytes();
                for (cell, a) in row.iter_mut().zip(&answer_bytes) {
                    *cell = colorize_bytes(g, a).0 as u8;
                }
            });
        Cells::Narrow(cells)
    } else {
        let mut cells: Vec<u16> = allocate(rows, cols)?;
        cells
            .par_chunks_mut(cols)
            .zip(guesses.words().par_iter())
            .for_each(|(row, guess)| {
                let g = guess.as_bytes();
                for (cell, a) in row.iter_mut().zip(&answer_bytes) {
                    *cell = colorize_bytes(g, a).0;
                }
            });
        Cells::Wide(cells)
    };
    Ok(CodeMatrix {
        cells,
        rows,
        cols,
        word_length,
        guess_digest: guesses.digest(),
        answer_digest: answers.digest(),
    })
}

impl CodeMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn guess_digest(&self) -> ListDigest {
        self.guess_digest
    }

    pub fn answer_digest(&self) -> ListDigest {
        self.answer_digest
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> CodeIndex {
        CodeIndex(self.row(row).at(col) as u16)
    }

    #[inline]
    pub fn row(&self, row: usize) -> RowCodes<'_> {
        let range = row * self.cols..(row + 1) * self.cols;
        match &self.cells {
            Cells::Narrow(c) => RowCodes::Narrow(&c[range]),
            Cells::Wide(c) => RowCodes::Wide(&c[range]),
        }
    }

    fn payload_bytes(&self) -> Vec<u8> {
        match &self.cells {
            Cells::Narrow(c) => c.clone(),
            Cells::Wide(c) => c.iter().flat_map(|v| v.to_le_bytes()).collect(),
        }
    }
}

/// Digests and dimensions stored at the front of a cache file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub word_length: usize,
    pub rows: usize,
    pub cols: usize,
    pub guess_digest: ListDigest,
    pub answer_digest: ListDigest,
}

/// Writes the cache: header, row-major cells (little-endian), SHA-256 of the cells.
pub fn save_matrix(matrix: &CodeMatrix, path: impl AsRef<Path>) -> Result<(), MatrixError> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(matrix.word_length as u32).to_le_bytes())?;
    out.write_all(&(matrix.rows as u64).to_le_bytes())?;
    out.write_all(&(matrix.cols as u64).to_le_bytes())?;
    out.write_all(&matrix.guess_digest.0)?;
    out.write_all(&matrix.answer_digest.0)?;
    let checksum: [u8; 32] = match &matrix.cells {
        Cells::Narrow(c) => {
            out.write_all(c)?;
            Sha256::digest(c).into()
        }
        Cells::Wide(_) => {
            let bytes = matrix.payload_bytes();
            out.write_all(&bytes)?;
            Sha256::digest(&bytes).into()
        }
    };
    out.write_all(&checksum)?;
    out.flush()?;
    Ok(())
}

fn corrupt(msg: impl Into<String>) -> MatrixError {
    MatrixError::CorruptCache(msg.into())
}

fn parse_header(bytes: &[u8; HEADER_LEN]) -> Result<CacheHeader, MatrixError> {
    if &bytes[0..4] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported format version {version}")));
    }
    let word_length = u32_at(8) as usize;
    if word_length == 0 || word_length > crate::dictionary::MAX_WORD_LENGTH {
        return Err(corrupt(format!("bad word length {word_length}")));
    }
    Ok(CacheHeader {
        word_length,
        rows: u64_at(12) as usize,
        cols: u64_at(20) as usize,
        guess_digest: ListDigest(bytes[28..60].try_into().unwrap()),
        answer_digest: ListDigest(bytes[60..92].try_into().unwrap()),
    })
}

pub fn read_cache_header(path: impl AsRef<Path>) -> Result<CacheHeader, MatrixError> {
    let mut file = File::open(path)?;
    let mut header = [0u8; HEADER_LEN];
    file.read_exact(&mut header)
        .map_err(|_| corrupt("truncated header"))?;
    parse_header(&header)
}

/// Loads a cache and checks it was built from lists with the given digests.
pub fn load_matrix(
    path: impl AsRef<Path>,
    guess_digest: ListDigest,
    answer_digest: ListDigest,
) -> Result<CodeMatrix, MatrixError> {
    let mut file = File::open(path)?;
    let file_len = file.metadata()?.len() as usize;
    let mut header_bytes = [0u8; HEADER_LEN];
    file.read_exact(&mut header_bytes)
        .map_err(|_| corrupt("truncated header"))?;
    let header = parse_header(&header_bytes)?;
    let width = cell_width(header.word_length);
    let payload_len = header
        .rows
        .checked_mul(header.cols)
        .and_then(|n| n.checked_mul(width))
        .ok_or_else(|| corrupt("dimensions overflow"))?;
    if file_len != HEADER_LEN + payload_len + 32 {
        return Err(corrupt(format!(
            "expected {} bytes, found {file_len}",
            HEADER_LEN + payload_len + 32
        )));
    }
    if header.guess_digest != guess_digest {
        return Err(MatrixError::StaleCache { which: "guess" });
    }
    if header.answer_digest != answer_digest {
        return Err(MatrixError::StaleCache { which: "answer" });
    }
    let mut payload: Vec<u8> = allocate(payload_len, 1)?;
    file.read_exact(&mut payload)
        .map_err(|_| corrupt("truncated payload"))?;
    let mut checksum = [0u8; 32];
    file.read_exact(&mut checksum)
        .map_err(|_| corrupt("missing checksum"))?;
    let actual: [u8; 32] = Sha256::digest(&payload).into();
    if actual != checksum {
        return Err(corrupt("checksum mismatch"));
    }
    let cells = if width == 1 {
        Cells::Narrow(payload)
    } else {
        Cells::Wide(
            payload
                .chunks_exact(2)
                .map(|b| u16::from_le_bytes([b[0], b[1]]))
                .collect(),
        )
    };
    let space = code_space(header.word_length);
    let in_range = match &cells {
        Cells::Narrow(c) => c.iter().all(|&v| (v as usize) < space),
        Cells::Wide(c) => c.iter().all(|&v| (v as usize) < space),
    };
    if !in_range {
        return Err(corrupt("cell value out of range"));
    }
    Ok(CodeMatrix {
        cells,
        rows: header.rows,
        cols: header.cols,
        word_length: header.word_length,
        guess_digest: header.guess_digest,
        answer_digest: header.answer_digest,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Normal,
    Hard,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Normal => "normal",
            Mode::Hard => "hard",
        })
    }
}

/// A matrix together with the word lists it was built from.
pub struct GameSetup {
    matrix: CodeMatrix,
    guesses: WordList,
    answers: WordList,
    column_of_row: Vec<Option<u32>>,
    row_of_column: Vec<Option<u32>>,
    color_counts: Vec<(u8, u8)>,
}

impl std::fmt::Debug for GameSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameSetup")
            .field("matrix", &self.matrix)
            .field("guesses", &self.guesses)
            .field("answers", &self.answers)
            .finish()
    }
}

impl GameSetup {
    pub fn new(matrix: CodeMatrix, guesses: WordList, answers: WordList) -> Result<Self, MatrixError> {
        if matrix.guess_digest != guesses.digest() || matrix.rows != guesses.len() {
            return Err(MatrixError::StaleCache { which: "guess" });
        }
        if matrix.answer_digest != answers.digest() || matrix.cols != answers.len() {
            return Err(MatrixError::StaleCache { which: "answer" });
        }
        let column_of_row: Vec<Option<u32>> = guesses
            .words()
            .iter()
            .map(|w| answers.index_of(w.as_str()).map(|c| c as u32))
            .collect();
        let row_of_column = answers
            .words()
            .iter()
            .map(|w| guesses.index_of(w.as_str()).map(|r| r as u32))
            .collect();
        let color_counts = color_count_table(matrix.word_length);
        Ok(GameSetup {
            matrix,
            guesses,
            answers,
            column_of_row,
            row_of_column,
            color_counts,
        })
    }

    /// Precomputes the matrix for the given lists.
    pub fn build(guesses: WordList, answers: WordList) -> Result<Self, MatrixError> {
        let matrix = precompute_matrix(&guesses, &answers)?;
        Self::new(matrix, guesses, answers)
    }

    /// Guess pool and answer pool are the same list.
    pub fn build_single(words: WordList) -> Result<Self, MatrixError> {
        Self::build(words.clone(), words)
    }

    pub fn matrix(&self) -> &CodeMatrix {
        &self.matrix
    }

    pub fn guesses(&self) -> &WordList {
        &self.guesses
    }

    pub fn answers(&self) -> &WordList {
        &self.answers
    }

    pub fn word_length(&self) -> usize {
        self.matrix.word_length
    }

    pub fn guess_word(&self, row: usize) -> &Word {
        self.guesses.word(row)
    }

    pub fn answer_word(&self, col: usize) -> &Word {
        self.answers.word(col)
    }

    pub fn column_of_row(&self, row: usize) -> Option<usize> {
        self.column_of_row[row].map(|c| c as usize)
    }

    pub fn row_of_column(&self, col: usize) -> Option<usize> {
        self.row_of_column[col].map(|r| r as usize)
    }

    pub fn all_green(&self) -> CodeIndex {
        CodeIndex::all_green(self.word_length())
    }

    /// `(greens, yellows)` for a code index.
    #[inline]
    pub fn color_counts(&self, code: usize) -> (u8, u8) {
        self.color_counts[code]
    }

    /// Every answer word is also a legal guess (needed for hard mode).
    pub fn answers_guessable(&self) -> bool {
        self.row_of_column.iter().all(Option::is_some)
    }
}

/// Round `m` of a game: the viable answer columns and the guess rows still on offer.
#[derive(Clone)]
pub struct GameState<'a> {
    setup: &'a GameSetup,
    viable: Vec<u32>,
    guess_rows: Vec<u32>,
    round: u32,
    mode: Mode,
    history: Vec<(u32, CodeIndex)>,
}

impl std::fmt::Debug for GameState<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameState")
            .field("viable", &self.viable.len())
            .field("guess_rows", &self.guess_rows.len())
            .field("round", &self.round)
            .field("mode", &self.mode)
            .field("history", &self.history)
            .finish()
    }
}

/// Round 1: every answer is viable and every word can be guessed.
pub fn new_game(setup: &GameSetup, mode: Mode) -> GameState<'_> {
    GameState {
        setup,
        viable: (0..setup.matrix.cols as u32).collect(),
        guess_rows: (0..setup.matrix.rows as u32).collect(),
        round: 1,
        mode,
        history: Vec::new(),
    }
}

impl<'a> GameState<'a> {
    /// Rebuilds a state by replaying `(row, code)` moves from round 1.
    pub fn replay(
        setup: &'a GameSetup,
        mode: Mode,
        history: &[(u32, CodeIndex)],
    ) -> Result<GameState<'a>, GameError> {
        history
            .iter()
            .try_fold(new_game(setup, mode), |state, &(row, code)| {
                state.apply_feedback(row as usize, code)
            })
    }

    pub fn setup(&self) -> &'a GameSetup {
        self.setup
    }

    pub fn matrix(&self) -> &'a CodeMatrix {
        &self.setup.matrix
    }

    pub fn viable(&self) -> &[u32] {
        &self.viable
    }

    pub fn guess_rows(&self) -> &[u32] {
        &self.guess_rows
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn history(&self) -> &[(u32, CodeIndex)] {
        &self.history
    }

    pub fn viable_words(&self) -> impl Iterator<Item = &'a Word> + '_ {
        self.viable
            .iter()
            .map(|&c| self.setup.answer_word(c as usize))
    }

    pub fn is_guess_row(&self, row: usize) -> bool {
        self.guess_rows.binary_search(&(row as u32)).is_ok()
    }

    /// Whether the word of guess row `row` is still a viable answer.
    pub fn is_row_viable(&self, row: usize) -> bool {
        self.setup
            .column_of_row(row)
            .is_some_and(|c| self.viable.binary_search(&(c as u32)).is_ok())
    }

    /// Columns of the viable set that `row` would mark with `code`.
    pub fn bucket(&self, row: usize, code: CodeIndex) -> Vec<u32> {
        let codes = self.setup.matrix.row(row);
        self.viable
            .iter()
            .copied()
            .filter(|&c| codes.at(c as usize) == code.value())
            .collect()
    }

    /// Narrows the viable set to the columns of `row` equal to `code`.
    pub fn apply_feedback(&self, row: usize, code: CodeIndex) -> Result<GameState<'a>, GameError> {
        if !self.is_guess_row(row) {
            return Err(GameError::NotAGuessRow(row));
        }
        if code == self.setup.all_green() {
            return Err(GameError::AlreadySolved);
        }
        let viable = self.bucket(row, code);
        if viable.is_empty() {
            return Err(GameError::InconsistentFeedback);
        }
        Ok(self.advance(row, code, viable))
    }

    /// Next-round state for an already computed (nonempty) bucket.
    pub(crate) fn advance(&self, row: usize, code: CodeIndex, viable: Vec<u32>) -> GameState<'a> {
        let guess_rows = match self.mode {
            Mode::Normal => {
                let mut rows = self.guess_rows.clone();
                if let Ok(pos) = rows.binary_search(&(row as u32)) {
                    rows.remove(pos);
                }
                rows
            }
            Mode::Hard => viable
                .iter()
                .filter_map(|&c| self.setup.row_of_column[c as usize])
                .filter(|&r| r as usize != row)
                .collect(),
        };
        let mut history = self.history.clone();
        history.push((row as u32, code));
        GameState {
            setup: self.setup,
            viable,
            guess_rows,
            round: self.round + 1,
            mode: self.mode,
            history,
        }
    }
}
