//! Terminal assistant: the player types `word code` after each real guess.

use std::io::{self, BufRead, Write};

use tares_core::feedback::encode_code;
use tares_core::strategy::rank_guesses_with;
use tares_core::{ColorCode, FdsCache, GameError, GameSetup, GameState, Mode, Policy, ScoreMode};

use crate::{load, AssistArgs, CliError, CliResult};

const SHOW_VIABLE: usize = 20;

fn show(out: &mut impl Write, state: &GameState<'_>, policy: &Policy, cache: &FdsCache, top: usize) -> io::Result<()> {
    let viable = state.viable().len();
    writeln!(out, "round {}: {viable} viable", state.round())?;
    if viable <= SHOW_VIABLE {
        let words: Vec<String> = state.viable_words().map(|w| w.as_str().to_uppercase()).collect();
        writeln!(out, "  remaining: {}", words.join(" "))?;
    }
    // With one answer left the only sensible guess is that answer.
    let top = if viable == 1 { 1 } else { top };
    for (i, r) in rank_guesses_with(state, policy, Some(top), cache).iter().enumerate() {
        writeln!(
            out,
            "  {:>2}. {} {:>12.6}{}",
            i + 1,
            r.word.as_str().to_uppercase(),
            r.score,
            if r.in_viable { "  *" } else { "" }
        )?;
    }
    Ok(())
}

enum Step<'a> {
    Moved(GameState<'a>),
    Solved,
    Rejected(String),
}

fn step<'a>(state: &GameState<'a>, setup: &GameSetup, word: &str, code: &str) -> Step<'a> {
    let Some(row) = setup.guesses().index_of(word) else {
        return Step::Rejected(format!("{word:?} is not in the word list"));
    };
    let code = match ColorCode::parse(code, setup.word_length()) {
        Ok(c) => encode_code(&c),
        Err(e) => return Step::Rejected(e.to_string()),
    };
    match state.apply_feedback(row, code) {
        Ok(next) => Step::Moved(next),
        Err(GameError::AlreadySolved) if state.is_row_viable(row) => Step::Solved,
        Err(GameError::AlreadySolved) => Step::Rejected(format!("{word} was already ruled out; state unchanged")),
        Err(GameError::InconsistentFeedback) => {
            Step::Rejected("that pattern contradicts every remaining word; state unchanged".into())
        }
        Err(GameError::NotAGuessRow(_)) => Step::Rejected(format!("{word} can not be guessed now")),
        Err(e) => Step::Rejected(e.to_string()),
    }
}

pub fn run(args: &AssistArgs) -> CliResult {
    let policy = load::policy(&args.policy, ScoreMode::Finite(-0.5));
    let setup = load::setup(&args.cache)?;
    let mode = load::mode(args.hard, &setup)?;
    let stdin = io::stdin();
    let stdout = io::stdout();
    session(&setup, mode, &policy, args.top, stdin.lock(), stdout.lock()).map_err(CliError::runtime)
}

fn session(
    setup: &GameSetup,
    mode: Mode,
    policy: &Policy,
    top: usize,
    input: impl BufRead,
    mut out: impl Write,
) -> io::Result<()> {
    let cache = FdsCache::new(mode);
    let mut history: Vec<GameState<'_>> = vec![tares_core::new_game(setup, mode)];
    writeln!(out, "enter `word code` (code letters G, Y, B), `undo` or `quit`; * marks possible answers")?;
    show(&mut out, history.last().unwrap(), policy, &cache, top)?;
    for line in input.lines() {
        let line = line?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            [] => continue,
            [cmd] if cmd.eq_ignore_ascii_case("quit") || cmd.eq_ignore_ascii_case("exit") => break,
            [cmd] if cmd.eq_ignore_ascii_case("undo") => {
                if history.len() == 1 {
                    writeln!(out, "nothing to undo")?;
                    continue;
                }
                history.pop();
            }
            [word, code] => match step(history.last().unwrap(), setup, word, code) {
                Step::Moved(next) => history.push(next),
                Step::Solved => {
                    writeln!(out, "solved in {} guesses", history.len())?;
                    return Ok(());
                }
                Step::Rejected(why) => {
                    writeln!(out, "warning: {why}")?;
                    continue;
                }
            },
            _ => {
                writeln!(out, "expected `word code`, `undo` or `quit`")?;
                continue;
            }
        }
        show(&mut out, history.last().unwrap(), policy, &cache, top)?;
        out.flush()?;
    }
    Ok(())
}
