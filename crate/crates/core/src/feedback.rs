//! Green/Yellow/Black marking of a guess against an answer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dictionary::{Word, MAX_WORD_LENGTH};
use crate::error::FeedbackError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Black = 0,
    Yellow = 1,
    Green = 2,
}

impl Mark {
    pub fn as_char(self) -> char {
        match self {
            Mark::Black => 'B',
            Mark::Yellow => 'Y',
            Mark::Green => 'G',
        }
    }

    fn from_trit(t: u32) -> Mark {
        match t {
            0 => Mark::Black,
            1 => Mark::Yellow,
            _ => Mark::Green,
        }
    }
}

/// Per-position marks for one guess.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ColorCode {
    marks: Vec<Mark>,
}

impl ColorCode {
    pub fn new(marks: Vec<Mark>) -> ColorCode {
        ColorCode { marks }
    }

    pub fn all_green(word_length: usize) -> ColorCode {
        ColorCode {
            marks: vec![Mark::Green; word_length],
        }
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    /// Parses a `G`/`Y`/`B` string of exactly `word_length` characters, any case.
    pub fn parse(text: &str, word_length: usize) -> Result<ColorCode, FeedbackError> {
        let code: ColorCode = text.parse()?;
        if code.len() != word_length {
            return Err(FeedbackError::WrongCodeLength {
                code: text.to_string(),
                got: code.len(),
                expected: word_length,
            });
        }
        Ok(code)
    }

    pub fn is_all_green(&self) -> bool {
        self.marks.iter().all(|&m| m == Mark::Green)
    }
}

impl FromStr for ColorCode {
    type Err = FeedbackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let marks = s
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'G' => Ok(Mark::Green),
                'Y' => Ok(Mark::Yellow),
                'B' => Ok(Mark::Black),
                _ => Err(FeedbackError::BadMark(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if marks.is_empty() || marks.len() > MAX_WORD_LENGTH {
            return Err(FeedbackError::BadMark(s.to_string()));
        }
        Ok(ColorCode { marks })
    }
}

impl fmt::Display for ColorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.marks {
            write!(f, "{}", m.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ColorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColorCode({self})")
    }
}

/// Base-3 encoding of a color code, leftmost mark most significant, B=0 Y=1 G=2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CodeIndex(pub u16);

impl CodeIndex {
    pub fn value(self) -> usize {
        self.0 as usize
    }

    pub fn all_green(word_length: usize) -> CodeIndex {
        CodeIndex((code_space(word_length) - 1) as u16)
    }
}

/// Number of distinct code indices, 3^word_length.
pub fn code_space(word_length: usize) -> usize {
    3usize.pow(word_length as u32)
}

/// Number of codes `colorize` can actually produce: 3^L minus the L patterns
/// with L-1 greens and one yellow.
pub fn achievable_code_count(word_length: usize) -> usize {
    code_space(word_length) - word_length
}

/// Marks `guess` against `answer`: greens first, then yellows left to right
/// against the letters of the answer not already matched.
pub fn colorize(guess: &Word, answer: &Word) -> Result<ColorCode, FeedbackError> {
    if guess.len() != answer.len() {
        return Err(FeedbackError::LengthMismatch {
            guess: guess.len(),
            answer: answer.len(),
        });
    }
    let index = colorize_bytes(guess.as_bytes(), answer.as_bytes());
    Ok(decode_trits(index.0 as u32, guess.len()))
}

/// Allocation-free colorize on raw lowercase ASCII bytes of equal length.
#[inline]
pub fn colorize_bytes(guess: &[u8], answer: &[u8]) -> CodeIndex {
    debug_assert_eq!(guess.len(), answer.len());
    let n = guess.len();
    let mut residual = [0u8; 26];
    let mut green = [false; MAX_WORD_LENGTH];
    for i in 0..n {
        if guess[i] == answer[i] {
            green[i] = true;
        } else {
            residual[(answer[i] - b'a') as usize] += 1;
        }
    }
    let mut value: u32 = 0;
    for i in 0..n {
        let trit = if green[i] {
            2
        } else {
            let slot = &mut residual[(guess[i] - b'a') as usize];
            if *slot > 0 {
                *slot -= 1;
                1
            } else {
                0
            }
        };
        value = value * 3 + trit;
    }
    CodeIndex(value as u16)
}

pub fn encode_code(code: &ColorCode) -> CodeIndex {
    let value = code
        .marks
        .iter()
        .fold(0u32, |acc, &m| acc * 3 + m as u32);
    CodeIndex(value as u16)
}

pub fn decode_code(value: u32, word_length: usize) -> Result<ColorCode, FeedbackError> {
    if word_length == 0
        || word_length > MAX_WORD_LENGTH
        || value as usize >= code_space(word_length)
    {
        return Err(FeedbackError::OutOfRange { value, word_length });
    }
    Ok(decode_trits(value, word_length))
}

fn decode_trits(mut value: u32, word_length: usize) -> ColorCode {
    let mut marks = vec![Mark::Black; word_length];
    for slot in marks.iter_mut().rev() {
        *slot = Mark::from_trit(value % 3);
        value /= 3;
    }
    ColorCode { marks }
}

/// `(greens, yellows)` in a code.
pub fn count_colors(code: &ColorCode) -> (u32, u32) {
    code.marks.iter().fold((0, 0), |(g, y), m| match m {
        Mark::Green => (g + 1, y),
        Mark::Yellow => (g, y + 1),
        Mark::Black => (g, y),
    })
}

/// `(greens, yellows)` for every code index of a given word length.
pub fn color_count_table(word_length: usize) -> Vec<(u8, u8)> {
    (0..code_space(word_length) as u32)
        .map(|v| {
            let (g, y) = count_colors(&decode_trits(v, word_length));
            (g as u8, y as u8)
        })
        .collect()
}
