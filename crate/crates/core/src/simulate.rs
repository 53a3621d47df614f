//! Exhaustive play-outs of a policy against every answer.
//!
//! A game stops as soon as the viable set has one word (one more round to
//! win) or two words (1.5 more rounds in expectation), or when a guess comes
//! back all green.
//!
//! The policy is deterministic, so answers that have produced the same
//! feedback so far share the same next guess. `simulate_all` therefore walks
//! the decision tree once instead of replaying every game from scratch.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use once_cell::sync::Lazy;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dictionary::{ListDigest, Word};
use crate::error::{GameError, SimulationError};
use crate::fds::FdsCache;
use crate::matrix::{new_game, GameSetup, GameState, Mode};
use crate::strategy::{rank_guesses_with, select_guess_with, Policy, ScoreReport};

/// A round count in half rounds, so 6.5 is `Rounds(13)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Rounds(pub u32);

impl Rounds {
    pub fn whole(n: u32) -> Rounds {
        Rounds(2 * n)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn half_rounds(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Rounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}

impl Serialize for Rounds {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_f64())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    WonExact,
    ResolvedToOne,
    ResolvedToTwo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameRecord {
    pub answer: Word,
    pub guesses: Vec<Word>,
    pub rounds: Rounds,
    pub outcome: Outcome,
}

impl GameRecord {
    fn new(answer: Word, guesses: Vec<Word>, outcome: Outcome) -> GameRecord {
        let n = guesses.len() as u32;
        let rounds = match outcome {
            Outcome::WonExact => Rounds::whole(n),
            Outcome::ResolvedToOne => Rounds::whole(n + 1),
            Outcome::ResolvedToTwo => Rounds(2 * n + 3),
        };
        GameRecord {
            answer,
            guesses,
            rounds,
            outcome,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    pub mean_rounds: f64,
    pub histogram: BTreeMap<Rounds, u32>,
    pub count_at_6_5: u32,
    pub count_ge_7: u32,
    /// Answers needing 6.5 rounds or more, ascending.
    pub fail_words: Vec<(Word, Rounds)>,
    /// One record per simulated answer, in answer order.
    pub records: Vec<GameRecord>,
}

impl SimulationSummary {
    pub fn from_records(records: Vec<GameRecord>) -> SimulationSummary {
        let mut histogram = BTreeMap::new();
        let mut total: u64 = 0;
        for r in &records {
            *histogram.entry(r.rounds).or_insert(0) += 1;
            total += r.rounds.0 as u64;
        }
        let mean_rounds = if records.is_empty() {
            0.0
        } else {
            total as f64 / 2.0 / records.len() as f64
        };
        let fail_words = records
            .iter()
            .filter(|r| r.rounds >= Rounds(13))
            .map(|r| (r.answer.clone(), r.rounds))
            .collect();
        SimulationSummary {
            mean_rounds,
            count_at_6_5: histogram.get(&Rounds(13)).copied().unwrap_or(0),
            count_ge_7: histogram.range(Rounds(14)..).map(|(_, n)| n).sum(),
            histogram,
            fail_words,
            records,
        }
    }

    pub fn games(&self) -> usize {
        self.records.len()
    }
}

/// Plays one game to its stopping point, recomputing every decision.
pub fn play_game(
    setup: &GameSetup,
    answer: &Word,
    policy: &Policy,
    mode: Mode,
) -> Result<GameRecord, SimulationError> {
    let col = setup
        .answers()
        .index_of(answer.as_str())
        .ok_or_else(|| SimulationError::UnknownAnswer(answer.to_string()))?;
    check_mode(setup, mode)?;
    let cache = FdsCache::new(mode);
    let cap = round_cap(setup);
    let mut state = new_game(setup, mode);
    let mut guesses = Vec::new();
    loop {
        match state.viable().len() {
            1 if guesses.is_empty() => {
                return Ok(GameRecord::new(answer.clone(), vec![answer.clone()], Outcome::WonExact))
            }
            1 => return Ok(GameRecord::new(answer.clone(), guesses, Outcome::ResolvedToOne)),
            2 => return Ok(GameRecord::new(answer.clone(), guesses, Outcome::ResolvedToTwo)),
            _ => {}
        }
        if guesses.len() >= cap {
            return Err(SimulationError::RoundCap {
                answer: answer.to_string(),
                cap,
            });
        }
        let row = select_guess_with(&state, policy, &cache);
        guesses.push(setup.guess_word(row).clone());
        let code = setup.matrix().get(row, col);
        if code == setup.all_green() {
            return Ok(GameRecord::new(answer.clone(), guesses, Outcome::WonExact));
        }
        state = state.apply_feedback(row, code)?;
    }
}

/// Simulates every answer (or the given answer columns) and aggregates.
pub fn simulate_all(
    setup: &GameSetup,
    policy: &Policy,
    mode: Mode,
    answers: Option<&[usize]>,
) -> Result<SimulationSummary, SimulationError> {
    check_mode(setup, mode)?;
    let targets: Vec<u32> = match answers {
        Some(cols) => {
            let mut cols: Vec<u32> = cols.iter().map(|&c| c as u32).collect();
            cols.sort_unstable();
            cols.dedup();
            if let Some(&bad) = cols.iter().find(|&&c| c as usize >= setup.answers().len()) {
                return Err(SimulationError::UnknownAnswer(format!("column {bad}")));
            }
            cols
        }
        None => (0..setup.answers().len() as u32).collect(),
    };
    let walker = Walker {
        setup,
        policy,
        cache: FdsCache::new(mode),
        cap: round_cap(setup),
    };
    let root = new_game(setup, mode);
    let mut records = walker.node(&root, &targets, &[])?;
    records.sort_by_key(|(col, _)| *col);
    Ok(SimulationSummary::from_records(
        records.into_iter().map(|(_, r)| r).collect(),
    ))
}

fn check_mode(setup: &GameSetup, mode: Mode) -> Result<(), SimulationError> {
    if mode == Mode::Hard && !setup.answers_guessable() {
        return Err(GameError::AnswersNotGuessable.into());
    }
    Ok(())
}

/// Every informative guess removes at least one row, so a game can not take
/// more guesses than there are rows.
fn round_cap(setup: &GameSetup) -> usize {
    setup.guesses().len().max(1)
}

struct Walker<'a> {
    setup: &'a GameSetup,
    policy: &'a Policy,
    cache: FdsCache,
    cap: usize,
}

impl Walker<'_> {
    fn node(
        &self,
        state: &GameState<'_>,
        targets: &[u32],
        path: &[u32],
    ) -> Result<Vec<(u32, GameRecord)>, SimulationError> {
        let setup = self.setup;
        let guesses = || -> Vec<Word> {
            path.iter()
                .map(|&r| setup.guess_word(r as usize).clone())
                .collect()
        };
        let finish = |outcome: Outcome| -> Vec<(u32, GameRecord)> {
            targets
                .iter()
                .map(|&c| {
                    let answer = setup.answer_word(c as usize).clone();
                    let record = if path.is_empty() && outcome == Outcome::ResolvedToOne {
                        GameRecord::new(answer.clone(), vec![answer], Outcome::WonExact)
                    } else {
                        GameRecord::new(answer, guesses(), outcome)
                    };
                    (c, record)
                })
                .collect()
        };
        match state.viable().len() {
            1 => return Ok(finish(Outcome::ResolvedToOne)),
            2 => return Ok(finish(Outcome::ResolvedToTwo)),
            _ => {}
        }
        if path.len() >= self.cap {
            return Err(SimulationError::RoundCap {
                answer: setup.answer_word(targets[0] as usize).to_string(),
                cap: self.cap,
            });
        }
        let row = if path.is_empty() {
            best_opener_with(setup, self.policy, state.mode(), &self.cache).row
        } else {
            select_guess_with(state, self.policy, &self.cache)
        };
        let mut next_path = path.to_vec();
        next_path.push(row as u32);

        let codes = setup.matrix().row(row);
        let all_green = setup.all_green().value();
        let mut out = Vec::with_capacity(targets.len());
        let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for &c in targets {
            let code = codes.at(c as usize);
            if code == all_green {
                let answer = setup.answer_word(c as usize).clone();
                let words = next_path
                    .iter()
                    .map(|&r| setup.guess_word(r as usize).clone())
                    .collect();
                out.push((c, GameRecord::new(answer, words, Outcome::WonExact)));
            } else {
                groups.entry(code).or_default().push(c);
            }
        }
        let children: Vec<_> = groups
            .into_par_iter()
            .map(|(code, group)| {
                let viable: Vec<u32> = state
                    .viable()
                    .iter()
                    .copied()
                    .filter(|&c| codes.at(c as usize) == code)
                    .collect();
                let child = state.advance(row, crate::feedback::CodeIndex(code as u16), viable);
                self.node(&child, &group, &next_path)
            })
            .collect();
        for child in children {
            out.extend(child?);
        }
        Ok(out)
    }
}

type OpenerKey = (ListDigest, ListDigest, Mode, String);

static OPENERS: Lazy<Mutex<HashMap<OpenerKey, ScoreReport>>> = Lazy::new(Default::default);

/// The policy's round-one guess. Round one does not depend on the answer, so
/// results are cached per word lists, mode and policy.
pub fn best_opener(setup: &GameSetup, policy: &Policy, mode: Mode) -> ScoreReport {
    best_opener_with(setup, policy, mode, &FdsCache::new(mode))
}

fn best_opener_with(setup: &GameSetup, policy: &Policy, mode: Mode, cache: &FdsCache) -> ScoreReport {
    let key = (
        setup.guesses().digest(),
        setup.answers().digest(),
        mode,
        policy.cache_key(),
    );
    if let Some(hit) = OPENERS.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let state = new_game(setup, mode);
    let best = rank_guesses_with(&state, policy, Some(1), cache)
        .into_iter()
        .next()
        .expect("a game always has at least one guess row");
    OPENERS.lock().unwrap().insert(key, best.clone());
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct PolicyView {
    pub p: crate::strategy::ScoreMode,
    pub fds: bool,
    pub mode: Mode,
}

/// Machine-readable benchmark report.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub policy: PolicyView,
    pub opener: Word,
    pub mean_rounds: f64,
    pub histogram: Vec<(Rounds, u32)>,
    pub count_at_6_5: u32,
    pub count_ge_7: u32,
    pub fail_words: Vec<(Word, Rounds)>,
    pub wallclock_seconds: f64,
}

impl SimulationReport {
    pub fn new(
        policy: &Policy,
        mode: Mode,
        opener: Word,
        summary: &SimulationSummary,
        wallclock_seconds: f64,
    ) -> SimulationReport {
        SimulationReport {
            policy: PolicyView {
                p: policy.mode,
                fds: policy.use_fds,
                mode,
            },
            opener,
            mean_rounds: summary.mean_rounds,
            histogram: summary.histogram.iter().map(|(&r, &n)| (r, n)).collect(),
            count_at_6_5: summary.count_at_6_5,
            count_ge_7: summary.count_ge_7,
            fail_words: summary.fail_words.clone(),
            wallclock_seconds,
        }
    }
}
