//! Cache and sidecar word-list loading.
//!
//! The cache stores only digests of its word lists, so `precompute` writes the
//! lists next to it as `<cache>.guesses.txt` and `<cache>.answers.txt`.

use std::path::{Path, PathBuf};

use anyhow::Context;
use tares_core::matrix::read_cache_header;
use tares_core::{load_matrix, load_word_list_file, GameSetup, MatrixError, Mode, Policy, ScoreMode, WordList};

use crate::{CliError, PolicyArgs};

pub fn sidecar(cache: &Path, which: &str) -> PathBuf {
    let mut name = cache.as_os_str().to_owned();
    name.push(format!(".{which}.txt"));
    PathBuf::from(name)
}

pub fn word_list(path: &Path, length: usize) -> Result<WordList, CliError> {
    load_word_list_file(path, length)
        .with_context(|| format!("reading word list {}", path.display()))
        .map_err(CliError::usage)
}

pub fn setup(cache: &Path) -> Result<GameSetup, CliError> {
    let header = read_cache_header(cache)
        .with_context(|| format!("opening cache {}", cache.display()))
        .map_err(CliError::usage)?;
    let guesses = word_list(&sidecar(cache, "guesses"), header.word_length)?;
    let answers = word_list(&sidecar(cache, "answers"), header.word_length)?;
    let matrix = load_matrix(cache, guesses.digest(), answers.digest())
        .map_err(|e| match e {
            MatrixError::Io(_) => CliError::runtime(e),
            other => CliError::usage(anyhow::Error::new(other).context(format!(
                "loading cache {} (rerun precompute to rebuild it)",
                cache.display()
            ))),
        })?;
    GameSetup::new(matrix, guesses, answers).map_err(CliError::usage)
}

pub fn mode(hard: bool, setup: &GameSetup) -> Result<Mode, CliError> {
    if !hard {
        return Ok(Mode::Normal);
    }
    if !setup.answers_guessable() {
        return Err(CliError::usage(tares_core::GameError::AnswersNotGuessable));
    }
    Ok(Mode::Hard)
}

pub fn policy(args: &PolicyArgs, default: ScoreMode) -> Policy {
    Policy::new(args.p.unwrap_or(default)).with_fds(args.fds)
}
