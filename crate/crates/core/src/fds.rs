//! Fully discernible sets.
//!
//! A set of answers is fully discernible when some guess (a key) gives every
//! member a different code, counting all-green as a code. With an internal key
//! (a member of the set) the set plays like a size-two set; with only external
//! keys it plays like a size-three set. `adjusted_lengths` folds this into the
//! bucket lengths used for scoring.

use dashmap::DashMap;

use crate::feedback::{achievable_code_count, code_space, CodeIndex};
use crate::matrix::{GameState, Mode};
use crate::strategy::{power_sum, Histogram, ScoreMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FdsKind {
    NotFds,
    External,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdsClass {
    pub kind: FdsKind,
    /// Key guess rows, ascending.
    pub keys: Vec<usize>,
}

/// Largest set a single guess can fully discern.
pub fn max_fds_size(word_length: usize) -> usize {
    achievable_code_count(word_length)
}

/// Memoized bucket classifications, keyed by bucket contents.
///
/// A cache must only be shared between states of one `GameSetup` and one mode.
/// Within that scope a bucket's class does not depend on which rows were
/// guessed earlier: every earlier guess gives all surviving answers the same
/// code, so it can never be a key for a bucket of two or more words.
pub struct FdsCache {
    mode: Mode,
    map: DashMap<Box<[u32]>, FdsKind>,
}

impl FdsCache {
    pub fn new(mode: Mode) -> FdsCache {
        FdsCache {
            mode,
            map: DashMap::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

struct Distinct {
    bits: Vec<u64>,
}

impl Distinct {
    fn new(word_length: usize) -> Distinct {
        Distinct {
            bits: vec![0; code_space(word_length).div_ceil(64)],
        }
    }

    /// Whether `row` gives every column of `set` a different code.
    fn is_key(&mut self, state: &GameState<'_>, row: usize, set: &[u32]) -> bool {
        let codes = state.matrix().row(row);
        let mut distinct = true;
        let mut seen = 0;
        for &c in set {
            let code = codes.at(c as usize);
            let (word, bit) = (code / 64, 1u64 << (code % 64));
            if self.bits[word] & bit != 0 {
                distinct = false;
                break;
            }
            self.bits[word] |= bit;
            seen += 1;
        }
        for &c in &set[..seen] {
            self.bits[codes.at(c as usize) / 64] = 0;
        }
        distinct
    }
}

fn internal_rows<'s>(state: &'s GameState<'_>, set: &'s [u32]) -> impl Iterator<Item = usize> + 's {
    set.iter()
        .filter_map(|&c| state.setup().row_of_column(c as usize))
}

/// Classifies `subset` using the state's guess rows as candidate keys.
pub fn classify_fds(state: &GameState<'_>, subset: &[u32]) -> FdsClass {
    let mut distinct = Distinct::new(state.setup().word_length());
    let keys: Vec<usize> = state
        .guess_rows()
        .iter()
        .map(|&r| r as usize)
        .filter(|&r| distinct.is_key(state, r, subset))
        .collect();
    let internal = keys.iter().any(|&r| {
        state
            .setup()
            .column_of_row(r)
            .is_some_and(|c| subset.contains(&(c as u32)))
    });
    let kind = if internal {
        FdsKind::Internal
    } else if keys.is_empty() {
        FdsKind::NotFds
    } else {
        FdsKind::External
    };
    FdsClass { kind, keys }
}

/// Kind of `bucket` as the viable set of the round after the current one.
/// Normal mode keeps every other guess row as a candidate key; hard mode only
/// the bucket's own words.
fn bucket_kind(state: &GameState<'_>, bucket: &[u32], distinct: &mut Distinct) -> FdsKind {
    for r in internal_rows(state, bucket) {
        if distinct.is_key(state, r, bucket) {
            return FdsKind::Internal;
        }
    }
    if state.mode() == Mode::Hard {
        return FdsKind::NotFds;
    }
    for &r in state.guess_rows() {
        let r = r as usize;
        if state
            .setup()
            .column_of_row(r)
            .is_some_and(|c| bucket.binary_search(&(c as u32)).is_ok())
        {
            continue;
        }
        if distinct.is_key(state, r, bucket) {
            return FdsKind::External;
        }
    }
    FdsKind::NotFds
}

fn cached_kind(state: &GameState<'_>, bucket: &[u32], cache: &FdsCache, distinct: &mut Distinct) -> FdsKind {
    if cache.mode != state.mode() {
        return bucket_kind(state, bucket, distinct);
    }
    if let Some(kind) = cache.map.get(bucket) {
        return *kind;
    }
    let kind = bucket_kind(state, bucket, distinct);
    cache.map.insert(bucket.into(), kind);
    kind
}

fn adjust(len: usize, kind: FdsKind) -> f64 {
    let l = len as f64;
    match kind {
        FdsKind::NotFds => l,
        FdsKind::External => 3.0,
        FdsKind::Internal => 2.0 * (2.0 / l) + 3.0 * (1.0 - 2.0 / l),
    }
}

fn in_adjusted_range(len: usize, word_length: usize) -> bool {
    (3..=max_fds_size(word_length)).contains(&len)
}

/// Adjusted length of a bucket (ascending columns) that would become the next viable set.
pub fn l_tilde(state: &GameState<'_>, bucket: &[u32]) -> f64 {
    let word_length = state.setup().word_length();
    if !in_adjusted_range(bucket.len(), word_length) {
        return bucket.len() as f64;
    }
    let mut distinct = Distinct::new(word_length);
    adjust(bucket.len(), bucket_kind(state, bucket, &mut distinct))
}

/// `(code, adjusted length)` for every non-all-green bucket of `row`.
pub fn adjusted_lengths(state: &GameState<'_>, row: usize, cache: &FdsCache) -> Vec<(CodeIndex, f64)> {
    let setup = state.setup();
    let word_length = setup.word_length();
    let all_green = setup.all_green().value();
    let codes = state.matrix().row(row);
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); code_space(word_length)];
    for &c in state.viable() {
        members[codes.at(c as usize)].push(c);
    }
    let mut distinct = Distinct::new(word_length);
    members
        .iter()
        .enumerate()
        .filter(|(code, m)| *code != all_green && !m.is_empty())
        .map(|(code, bucket)| {
            let l = if in_adjusted_range(bucket.len(), word_length) {
                adjust(bucket.len(), cached_kind(state, bucket, cache, &mut distinct))
            } else {
                bucket.len() as f64
            };
            (CodeIndex(code as u16), l)
        })
        .collect()
}

/// p-FDS score of `row`: `sum_c L_c * Ltilde_c^p / (N_v - [row can win now])`.
pub fn score_fds(state: &GameState<'_>, row: usize, mode: ScoreMode) -> f64 {
    let cache = FdsCache::new(state.mode());
    let h = crate::strategy::bucket_histogram(state, row);
    score_fds_with(state, row, &h, mode, &cache)
}

pub(crate) fn score_fds_with(
    state: &GameState<'_>,
    row: usize,
    h: &Histogram,
    mode: ScoreMode,
    cache: &FdsCache,
) -> f64 {
    if h.is_degenerate() {
        return 0.0;
    }
    let word_length = state.setup().word_length();
    let needs_adjustment = h
        .buckets()
        .iter()
        .any(|b| in_adjusted_range(b.1 as usize, word_length));
    if !needs_adjustment {
        return crate::strategy::score(h, mode);
    }
    let adjusted = adjusted_lengths(state, row, cache);
    debug_assert_eq!(adjusted.len(), h.buckets().len());
    match mode {
        ScoreMode::Finite(p) => {
            let terms = h
                .buckets()
                .iter()
                .zip(&adjusted)
                .map(|(b, a)| (b.1 as f64, a.1));
            power_sum(terms, p) / h.denominator() as f64
        }
        ScoreMode::PosInf => adjusted.iter().map(|a| a.1).fold(0.0, f64::max),
        ScoreMode::NegInf => adjusted.iter().filter(|a| a.1 == 1.0).count() as f64,
    }
}
