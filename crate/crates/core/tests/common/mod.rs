//! Oracles, generators and property checks shared by the integration tests and
//! the acceptance harness.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};

use tares_core::fds::{classify_fds, l_tilde, score_fds, FdsKind};
use tares_core::feedback::code_space;
use tares_core::matrix::{new_game, GameSetup, GameState, Mode};
use tares_core::simulate::{play_game, simulate_all, Outcome, SimulationSummary};
use tares_core::strategy::{
    bucket_histogram, rank_guesses, score, AnswerPrior, Policy, ScoreMode,
};
use tares_core::WordList;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

/// Straightforward two-pass marking written without any shared code: greens
/// consume their answer letter, then each remaining guess letter takes the
/// leftmost unconsumed equal answer letter.
pub fn reference_colorize(guess: &str, answer: &str) -> String {
    let g: Vec<char> = guess.chars().collect();
    let mut a: Vec<Option<char>> = answer.chars().map(Some).collect();
    let mut out = vec!['B'; g.len()];
    for i in 0..g.len() {
        if a[i] == Some(g[i]) {
            out[i] = 'G';
            a[i] = None;
        }
    }
    for i in 0..g.len() {
        if out[i] == 'G' {
            continue;
        }
        if let Some(j) = (0..a.len()).find(|&j| a[j] == Some(g[i])) {
            out[i] = 'Y';
            a[j] = None;
        }
    }
    out.into_iter().collect()
}

/// Distinct random words of length `len` drawn letter by letter from `alphabet`.
pub fn random_words(rng: &mut StdRng, n: usize, len: usize, alphabet: &[u8]) -> Vec<String> {
    let mut seen = std::collections::BTreeSet::new();
    let mut guard = 0;
    while seen.len() < n {
        let w: String = (0..len)
            .map(|_| *alphabet.choose(rng).unwrap() as char)
            .collect();
        seen.insert(w);
        guard += 1;
        assert!(guard < n * 1000, "alphabet too small for {n} distinct words");
    }
    let mut words: Vec<String> = seen.into_iter().collect();
    words.shuffle(rng);
    words
}

/// Letters weighted roughly like five-letter English words so that random
/// lists share letters and produce nontrivial partitions.
pub const COMMON: &[u8] = b"aaaeeeeiioorrrsssstttllnnncdumhpgbyk";

pub fn setup_from(words: &[String]) -> GameSetup {
    GameSetup::build_single(WordList::from_words(words, words[0].len()).unwrap()).unwrap()
}

pub fn random_setup(seed: u64, n: usize) -> GameSetup {
    let mut rng = StdRng::seed_from_u64(seed);
    setup_from(&random_words(&mut rng, n, 5, COMMON))
}

/// Advances a fresh game by up to `moves` random informative moves toward a random answer.
pub fn random_state<'a>(setup: &'a GameSetup, mode: Mode, rng: &mut StdRng, moves: usize) -> GameState<'a> {
    let mut state = new_game(setup, mode);
    let answer = rng.random_range(0..setup.answers().len());
    for _ in 0..moves {
        if state.viable().len() <= 2 {
            break;
        }
        let row = *state.guess_rows().choose(rng).unwrap() as usize;
        let code = setup.matrix().get(row, answer);
        if code == setup.all_green() {
            break;
        }
        state = state.apply_feedback(row, code).unwrap();
    }
    state
}

/// Optimal expected rounds over a uniformly random answer, by exhaustive
/// search over every guess at every viable subset. Guess pool and answer pool
/// must coincide and hold at most 20 words.
pub fn expectimax_mean(setup: &GameSetup) -> f64 {
    let n = setup.answers().len();
    assert!(n <= 20 && setup.guesses().len() == n);
    let words: Vec<String> = setup.answers().words().iter().map(|w| w.to_string()).collect();
    let codes: Vec<Vec<String>> = words
        .iter()
        .map(|g| words.iter().map(|a| reference_colorize(g, a)).collect())
        .collect();
    let green = "G".repeat(words[0].len());
    let mut memo = HashMap::new();
    expectimax((1u32 << n) - 1, &codes, &green, &mut memo)
}

/// Expected further rounds from a viable set, counting the guess about to be made.
fn expectimax(viable: u32, codes: &[Vec<String>], green: &str, memo: &mut HashMap<u32, f64>) -> f64 {
    match viable.count_ones() {
        1 => return 1.0,
        2 => return 1.5,
        _ => {}
    }
    if let Some(&v) = memo.get(&viable) {
        return v;
    }
    let n = viable.count_ones() as f64;
    let mut best = f64::INFINITY;
    for row in codes {
        let mut parts: HashMap<&str, u32> = HashMap::new();
        for (j, code) in row.iter().enumerate() {
            if viable >> j & 1 == 1 {
                *parts.entry(code.as_str()).or_default() |= 1 << j;
            }
        }
        if parts.len() == 1 && !parts.contains_key(green) {
            continue;
        }
        let mut total = 1.0;
        for (code, part) in parts {
            if code != green {
                total += part.count_ones() as f64 / n * expectimax(part, codes, green, memo);
            }
        }
        best = best.min(total);
    }
    memo.insert(viable, best);
    best
}

/// Rounds each game should take, derived by replaying the policy's decisions
/// one answer at a time and applying the stopping rules directly.
pub fn replay_rounds(setup: &GameSetup, policy: &Policy, mode: Mode) -> Vec<f64> {
    (0..setup.answers().len())
        .map(|col| {
            let mut state = new_game(setup, mode);
            let mut m = 1.0;
            loop {
                match state.viable().len() {
                    1 if m == 1.0 => return 1.0,
                    1 => return m,
                    2 => return m + 0.5,
                    _ => {}
                }
                let row = tares_core::select_guess(&state, policy);
                let code = setup.matrix().get(row, col);
                if code == setup.all_green() {
                    return m;
                }
                state = state.apply_feedback(row, code).unwrap();
                m += 1.0;
            }
        })
        .collect()
}

pub fn check_oracle(seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(3..=12);
    let setup = setup_from(&random_words(&mut rng, n, 5, COMMON));
    let policy = Policy::new(ScoreMode::Finite(-0.5));
    let summary = simulate_all(&setup, &policy, Mode::Normal, None).map_err(|e| e.to_string())?;
    let optimal = expectimax_mean(&setup);
    ensure!(
        optimal <= summary.mean_rounds + 1e-9,
        "seed {seed}: policy mean {} is below the optimum {optimal}",
        summary.mean_rounds
    );
    let replay = replay_rounds(&setup, &policy, Mode::Normal);
    for (r, expected) in summary.records.iter().zip(&replay) {
        ensure!(
            r.rounds.as_f64() == *expected,
            "seed {seed}: {} took {} in the tree but {} on replay",
            r.answer,
            r.rounds,
            expected
        );
    }
    Ok(())
}

/// Whether the policy mean equals the oracle mean (used for reporting).
pub fn oracle_gap(seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(3..=12);
    let setup = setup_from(&random_words(&mut rng, n, 5, COMMON));
    let policy = Policy::new(ScoreMode::Finite(-0.5));
    let summary = simulate_all(&setup, &policy, Mode::Normal, None).unwrap();
    summary.mean_rounds - expectimax_mean(&setup)
}

pub fn check_partition(setup: &GameSetup, seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let state = random_state(setup, Mode::Normal, &mut rng, 2);
    for _ in 0..5 {
        let row = *state.guess_rows().choose(&mut rng).unwrap() as usize;
        let h = bucket_histogram(&state, row);
        let total: u32 = h.buckets().iter().map(|b| b.1).sum::<u32>() + h.has_all_green() as u32;
        ensure!(total as usize == state.viable().len(), "bucket sizes sum to {total}");
        let mut union = Vec::new();
        for code in 0..code_space(setup.word_length()) {
            union.extend(state.bucket(row, tares_core::CodeIndex(code as u16)));
        }
        union.sort_unstable();
        ensure!(union == state.viable(), "buckets of row {row} do not partition the viable set");
    }
    Ok(())
}

pub fn check_gep_identity(setup: &GameSetup, seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let state = random_state(setup, Mode::Normal, &mut rng, 2);
    for &row in state.guess_rows() {
        let h = bucket_histogram(&state, row as usize);
        if h.is_degenerate() {
            continue;
        }
        let lhs = score(&h, ScoreMode::Finite(-1.0)) * h.denominator() as f64;
        let rhs = h.distinct() as f64;
        ensure!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0), "row {row}: {lhs} vs {rhs}");
    }
    Ok(())
}

pub fn check_monotone(setup: &GameSetup, seed: u64, mode: Mode) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let answer = rng.random_range(0..setup.answers().len());
    let mut state = new_game(setup, mode);
    while let Some(&row) = state.guess_rows().choose(&mut rng) {
        let code = setup.matrix().get(row as usize, answer);
        if code == setup.all_green() {
            break;
        }
        let next = state.apply_feedback(row as usize, code).map_err(|e| e.to_string())?;
        ensure!(next.viable().len() <= state.viable().len(), "viable set grew");
        ensure!(
            next.viable().iter().all(|c| state.viable().binary_search(c).is_ok()),
            "viable set gained a column"
        );
        ensure!(next.viable().binary_search(&(answer as u32)).is_ok(), "answer was eliminated");
        if mode == Mode::Hard {
            ensure!(
                next.guess_rows().iter().all(|&r| next.is_row_viable(r as usize)),
                "hard mode offered a non-viable row"
            );
        }
        state = next;
    }
    Ok(())
}

/// Every guess of every hard-mode game is a viable word when it is chosen.
pub fn check_hard_membership(setup: &GameSetup, policy: &Policy) -> Check {
    let summary = simulate_all(setup, policy, Mode::Hard, None).map_err(|e| e.to_string())?;
    for r in &summary.records {
        let col = setup.answers().index_of(r.answer.as_str()).unwrap();
        let mut state = new_game(setup, Mode::Hard);
        for g in &r.guesses {
            let row = setup.guesses().index_of(g.as_str()).unwrap();
            ensure!(state.is_row_viable(row), "{g} guessed for {} while not viable", r.answer);
            let code = setup.matrix().get(row, col);
            if code == setup.all_green() {
                break;
            }
            state = state.apply_feedback(row, code).map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

/// Words built so that many small subsets are fully discernible.
pub fn fds_setup(seed: u64) -> GameSetup {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(8..=30);
    setup_from(&random_words(&mut rng, n, 5, b"aeiorstlnc"))
}

pub fn check_fds_subset_closure(setup: &GameSetup, seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let state = new_game(setup, Mode::Normal);
    let k = rng.random_range(1..=7.min(state.viable().len()));
    let mut set: Vec<u32> = state.viable().choose_multiple(&mut rng, k).copied().collect();
    set.sort_unstable();
    let class = classify_fds(&state, &set);
    if class.kind == FdsKind::NotFds {
        return Ok(());
    }
    for mask in 1..(1u32 << set.len()) {
        let subset: Vec<u32> = (0..set.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| set[i])
            .collect();
        let sub = classify_fds(&state, &subset);
        ensure!(sub.kind != FdsKind::NotFds, "{subset:?} of FDS {set:?} is not FDS");
        ensure!(
            class.keys.iter().all(|k| sub.keys.contains(k)),
            "a key of {set:?} does not key {subset:?}"
        );
    }
    Ok(())
}

/// When the viable set is fully discernible, keys score 1, nothing scores
/// better, and the top-ranked guess is a key (internal when one exists).
pub fn check_key_optimality(seed: u64, p: f64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(8..=30);
    let words = random_words(&mut rng, n, 5, b"aeiorstlnc");
    let k = rng.random_range(2..=6);
    let answers: Vec<&String> = words.choose_multiple(&mut rng, k).collect();
    let setup = GameSetup::build(
        WordList::from_words(&words, 5).unwrap(),
        WordList::from_words(&answers, 5).unwrap(),
    )
    .unwrap();
    let state = new_game(&setup, Mode::Normal);
    let class = classify_fds(&state, state.viable());
    if class.kind == FdsKind::NotFds {
        return Ok(());
    }
    let mode = ScoreMode::Finite(p);
    for &key in &class.keys {
        let s = score(&bucket_histogram(&state, key), mode);
        ensure!((s - 1.0).abs() < 1e-12, "key {key} scores {s}");
    }
    for &row in state.guess_rows() {
        let s = score(&bucket_histogram(&state, row as usize), mode);
        let no_better = if p > 0.0 { s >= 1.0 - 1e-12 } else { s <= 1.0 + 1e-12 };
        ensure!(no_better, "row {row} scores {s}, better than a key");
    }
    let top = rank_guesses(&state, &Policy::new(mode), Some(1))[0].row;
    ensure!(class.keys.contains(&top), "top guess {top} is not a key {:?}", class.keys);
    if class.kind == FdsKind::Internal {
        ensure!(state.is_row_viable(top), "top guess {top} is an external key");
    }
    Ok(())
}

pub fn check_fds_reduction(setup: &GameSetup, seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let state = random_state(setup, Mode::Normal, &mut rng, 1);
    for _ in 0..8 {
        let row = *state.guess_rows().choose(&mut rng).unwrap() as usize;
        let h = bucket_histogram(&state, row);
        let unchanged = h.buckets().iter().all(|&(code, len)| {
            len < 3 || l_tilde(&state, &state.bucket(row, code)) == len as f64
        });
        if !unchanged {
            continue;
        }
        for mode in [ScoreMode::Finite(-0.5), ScoreMode::Finite(2.0), ScoreMode::PosInf, ScoreMode::NegInf] {
            let a = score_fds(&state, row, mode);
            let b = score(&h, mode);
            ensure!(a.to_bits() == b.to_bits(), "row {row} {mode}: fds {a} vs plain {b}");
        }
    }
    Ok(())
}

fn ranking(state: &GameState<'_>, policy: &Policy) -> Vec<usize> {
    rank_guesses(state, policy, None).into_iter().map(|r| r.row).collect()
}

pub fn check_uniform_prior(setup: &GameSetup, seed: u64, mode: ScoreMode) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let state = random_state(setup, Mode::Normal, &mut rng, 1);
    let plain = Policy::new(mode);
    let uniform = plain
        .clone()
        .with_prior(Some(Arc::new(AnswerPrior::uniform(setup.answers().len()))));
    ensure!(ranking(&state, &plain) == ranking(&state, &uniform), "uniform prior changed the ranking");
    Ok(())
}

pub fn check_prior_scale(setup: &GameSetup, seed: u64, mode: ScoreMode) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let state = random_state(setup, Mode::Normal, &mut rng, 1);
    let weights: Vec<f64> = (0..setup.answers().len())
        .map(|_| rng.random_range(0.01..10.0))
        .collect();
    let prior = AnswerPrior::from_weights(weights).unwrap();
    let factor = 2f64.powi(rng.random_range(-10..=10)) * rng.random_range(0.5..2.0);
    let a = Policy::new(mode).with_prior(Some(Arc::new(prior.clone())));
    let b = Policy::new(mode).with_prior(Some(Arc::new(prior.scaled(factor))));
    ensure!(ranking(&state, &a) == ranking(&state, &b), "scaling the prior by {factor} changed the ranking");
    Ok(())
}

pub fn summary_with_threads(setup: &GameSetup, policy: &Policy, mode: Mode, threads: usize) -> SimulationSummary {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| simulate_all(setup, policy, mode, None).unwrap())
}

pub fn check_thread_reproducibility(setup: &GameSetup, policy: &Policy, mode: Mode) -> Check {
    let max = std::thread::available_parallelism().map_or(1, |n| n.get()).max(2);
    let one = summary_with_threads(setup, policy, mode, 1);
    for threads in [4, max] {
        let other = summary_with_threads(setup, policy, mode, threads);
        ensure!(one == other, "summary differs between 1 and {threads} threads");
    }
    Ok(())
}

/// The three-row stopping rule table, checked on every record of a run.
pub fn check_accounting(summary: &SimulationSummary) -> Check {
    for r in &summary.records {
        let g = r.guesses.len() as f64;
        let expected = match r.outcome {
            Outcome::WonExact => g,
            Outcome::ResolvedToOne => g + 1.0,
            Outcome::ResolvedToTwo => g + 1.5,
        };
        ensure!(r.rounds.as_f64() == expected, "{}: {:?} with {g} guesses took {}", r.answer, r.outcome, r.rounds);
        ensure!(r.rounds.as_f64() >= 1.0, "{} took under one round", r.answer);
    }
    Ok(())
}

/// Half-round fixtures: plays each answer of a small dictionary and compares
/// every record with a replay that applies the stopping rules by hand.
pub fn check_half_rounds(seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(1..=40);
    let setup = setup_from(&random_words(&mut rng, n, 5, COMMON));
    for mode in [Mode::Normal, Mode::Hard] {
        let policy = Policy::new(ScoreMode::Finite(-0.5));
        let summary = simulate_all(&setup, &policy, mode, None).map_err(|e| e.to_string())?;
        check_accounting(&summary)?;
        let replay = replay_rounds(&setup, &policy, mode);
        for (r, expected) in summary.records.iter().zip(&replay) {
            ensure!(r.rounds.as_f64() == *expected, "{}: {} vs {}", r.answer, r.rounds, expected);
            let direct = play_game(&setup, &r.answer, &policy, mode).map_err(|e| e.to_string())?;
            ensure!(&direct == r, "{}: play_game disagrees with the tree walk", r.answer);
        }
    }
    Ok(())
}

/// Hand-built fixtures where the viable set hits one or two words at a known round.
pub fn check_half_round_fixtures() -> Check {
    let policy = Policy::default();
    let words = |ws: &[&str]| setup_from(&ws.iter().map(|s| s.to_string()).collect::<Vec<_>>());

    // One word: won in round one.
    let one = simulate_all(&words(&["tares"]), &policy, Mode::Normal, None).map_err(|e| e.to_string())?;
    ensure!(one.records[0].rounds.as_f64() == 1.0, "single word took {}", one.records[0].rounds);

    // Two words at round one: 1.5.
    let two = simulate_all(&words(&["tares", "lares"]), &policy, Mode::Normal, None).map_err(|e| e.to_string())?;
    ensure!(two.records.iter().all(|r| r.rounds.as_f64() == 1.5), "pair did not take 1.5");

    // Three words that any of them splits into singletons: the guessed word
    // wins in round 1, the other two resolve to one word at round 2.
    let three = simulate_all(&words(&["abcde", "bacde", "cabde"]), &policy, Mode::Normal, None)
        .map_err(|e| e.to_string())?;
    let mut rounds: Vec<f64> = three.records.iter().map(|r| r.rounds.as_f64()).collect();
    rounds.sort_by(f64::total_cmp);
    ensure!(rounds == [1.0, 2.0, 2.0], "three-word fixture took {rounds:?}");

    // Four words, one guess leaves a pair: the pair resolves at 2.5.
    // "abcde" separates itself and "vwxyz" but cannot tell "abcdf" from "abcdg".
    let s = words(&["abcde", "abcdf", "abcdg", "vwxyz"]);
    let state = new_game(&s, Mode::Normal);
    let row = s.guesses().index_of("abcde").unwrap();
    let pair = s.answers().index_of("abcdf").unwrap();
    let next = state
        .apply_feedback(row, s.matrix().get(row, pair))
        .map_err(|e| e.to_string())?;
    ensure!(next.viable().len() == 2, "fixture should leave a pair, got {}", next.viable().len());
    // Under p = -0.5 the three "abcd?" rows tie and alphabetical order picks
    // "abcde": it wins at once, "vwxyz" is then known (2 rounds) and the pair
    // costs 1 + 1.5.
    let four = simulate_all(&s, &policy, Mode::Normal, None).map_err(|e| e.to_string())?;
    check_accounting(&four)?;
    let got: Vec<(String, f64)> = four
        .records
        .iter()
        .map(|r| (r.answer.to_string(), r.rounds.as_f64()))
        .collect();
    let want: Vec<(String, f64)> = [("abcde", 1.0), ("abcdf", 2.5), ("abcdg", 2.5), ("vwxyz", 2.0)]
        .iter()
        .map(|&(w, r)| (w.to_string(), r))
        .collect();
    ensure!(got == want, "four-word fixture: {got:?}");
    Ok(())
}
