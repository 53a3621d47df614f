//! Solver engine for the five-letter word-guessing game.
//!
//! The pieces, bottom up: word lists ([`dictionary`]), per-guess color codes
//! ([`feedback`]), the precomputed guess x answer code matrix and game state
//! ([`matrix`]), guess scoring and ranking ([`strategy`], [`fds`]) and
//! exhaustive benchmarking ([`simulate`]).

pub mod dictionary;
pub mod error;
pub mod fds;
pub mod feedback;
pub mod matrix;
pub mod simulate;
pub mod strategy;

pub use dictionary::{load_word_list, load_word_list_file, ListDigest, Word, WordList};
pub use error::{DictionaryError, FeedbackError, GameError, MatrixError, SimulationError, StrategyError};
pub use fds::{classify_fds, l_tilde, score_fds, FdsCache, FdsClass, FdsKind};
pub use feedback::{colorize, decode_code, encode_code, CodeIndex, ColorCode, Mark};
pub use matrix::{load_matrix, new_game, precompute_matrix, save_matrix, CodeMatrix, GameSetup, GameState, Mode};
pub use simulate::{
    best_opener, play_game, simulate_all, GameRecord, Outcome, Rounds, SimulationReport, SimulationSummary,
};
pub use strategy::{rank_guesses, select_guess, AnswerPrior, Policy, ScoreMode, ScoreReport};
