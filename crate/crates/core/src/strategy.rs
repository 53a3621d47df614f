//! Guess scoring and ranking.
//!
//! Every candidate row is summarized by the histogram of codes it produces over
//! the viable set. The p-optimality family scores a row by
//! `sum_c L_c^(p+1) / (N_v - [row can win now])`, minimized for `p > 0` and
//! maximized for `p < 0`; `+inf` minimizes the largest bucket and `-inf`
//! maximizes the number of singleton buckets.
//!
//! Ranking forms tie classes under the primary mode, prefers rows whose word
//! is still viable, then breaks ties with the policy's secondary modes, the
//! expected number of green+yellow marks, the expected number of greens, and
//! finally alphabetical order.

use std::cmp::Ordering;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::dictionary::{Word, WordList};
use crate::error::StrategyError;
use crate::fds::{self, FdsCache};
use crate::feedback::{code_space, CodeIndex};
use crate::matrix::{GameState, RowCodes};

/// Relative tolerance for treating two non-exact scores as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Relative width of the float pre-grouping that exact comparison then resolves.
const NEAR_TIE: f64 = 1e-7;

/// Largest |p| compared with exact rational arithmetic.
const MAX_EXACT_EXPONENT: f64 = 64.0;

/// Code counts of one guess row over the viable set. The all-green code is
/// tracked separately and never appears in `buckets`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    buckets: Vec<(CodeIndex, u32)>,
    has_all_green: bool,
    viable_count: u32,
}

impl Histogram {
    pub fn new(buckets: Vec<(CodeIndex, u32)>, has_all_green: bool) -> Histogram {
        let viable_count = buckets.iter().map(|b| b.1).sum::<u32>() + has_all_green as u32;
        Histogram {
            buckets,
            has_all_green,
            viable_count,
        }
    }

    pub fn buckets(&self) -> &[(CodeIndex, u32)] {
        &self.buckets
    }

    pub fn has_all_green(&self) -> bool {
        self.has_all_green
    }

    pub fn viable_count(&self) -> u32 {
        self.viable_count
    }

    /// `N_v` minus one if this row can win immediately.
    pub fn denominator(&self) -> u32 {
        self.viable_count - self.has_all_green as u32
    }

    /// The row is the only viable word: a guaranteed win with nothing to score.
    pub fn is_degenerate(&self) -> bool {
        self.denominator() == 0
    }

    pub fn max_bucket(&self) -> u32 {
        self.buckets.iter().map(|b| b.1).max().unwrap_or(0)
    }

    pub fn singletons(&self) -> u32 {
        self.buckets.iter().filter(|b| b.1 == 1).count() as u32
    }

    /// Distinct non-all-green codes.
    pub fn distinct(&self) -> u32 {
        self.buckets.len() as u32
    }
}

/// Reusable counting buffers, one per worker thread.
pub(crate) struct Scratch {
    counts: Vec<u32>,
    touched: Vec<u16>,
}

impl Scratch {
    pub(crate) fn new(word_length: usize) -> Scratch {
        Scratch {
            counts: vec![0; code_space(word_length)],
            touched: Vec::with_capacity(256),
        }
    }

    pub(crate) fn histogram(&mut self, codes: RowCodes<'_>, columns: &[u32], all_green: usize) -> Histogram {
        for &c in columns {
            let code = codes.at(c as usize);
            if self.counts[code] == 0 {
                self.touched.push(code as u16);
            }
            self.counts[code] += 1;
        }
        self.touched.sort_unstable();
        let mut buckets = Vec::with_capacity(self.touched.len());
        let mut has_all_green = false;
        for &code in &self.touched {
            let n = std::mem::take(&mut self.counts[code as usize]);
            if code as usize == all_green {
                has_all_green = true;
            } else {
                buckets.push((CodeIndex(code), n));
            }
        }
        self.touched.clear();
        Histogram {
            buckets,
            has_all_green,
            viable_count: columns.len() as u32,
        }
    }
}

/// Code counts of `row` over the state's viable columns.
pub fn bucket_histogram(state: &GameState<'_>, row: usize) -> Histogram {
    let setup = state.setup();
    Scratch::new(setup.word_length()).histogram(
        state.matrix().row(row),
        state.viable(),
        setup.all_green().value(),
    )
}

/// Which member of the p-optimality family to score with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScoreMode {
    Finite(f64),
    PosInf,
    NegInf,
}

impl ScoreMode {
    pub fn finite(p: f64) -> Result<ScoreMode, StrategyError> {
        if p == 0.0 {
            return Err(StrategyError::ZeroExponent);
        }
        if p.is_nan() {
            return Err(StrategyError::BadMode(p.to_string()));
        }
        Ok(if p == f64::INFINITY {
            ScoreMode::PosInf
        } else if p == f64::NEG_INFINITY {
            ScoreMode::NegInf
        } else {
            ScoreMode::Finite(p)
        })
    }

    /// Larger scores are better (p < 0 and -inf).
    pub fn maximizes(self) -> bool {
        match self {
            ScoreMode::Finite(p) => p < 0.0,
            ScoreMode::PosInf => false,
            ScoreMode::NegInf => true,
        }
    }

    /// `p` as an integer when scores can be compared exactly.
    fn integer_exponent(self) -> Option<i32> {
        match self {
            ScoreMode::Finite(p) if p.fract() == 0.0 && p.abs() <= MAX_EXACT_EXPONENT => Some(p as i32),
            _ => None,
        }
    }

    /// Identity usable as a map key.
    pub fn key(self) -> u64 {
        match self {
            ScoreMode::Finite(p) => p.to_bits(),
            ScoreMode::PosInf => f64::INFINITY.to_bits(),
            ScoreMode::NegInf => f64::NEG_INFINITY.to_bits(),
        }
    }
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreMode::Finite(p) => write!(f, "{p}"),
            ScoreMode::PosInf => f.write_str("+inf"),
            ScoreMode::NegInf => f.write_str("-inf"),
        }
    }
}

impl FromStr for ScoreMode {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(ScoreMode::PosInf),
            "-inf" | "-infinity" => Ok(ScoreMode::NegInf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| StrategyError::BadMode(s.to_string()))?;
                ScoreMode::finite(p)
            }
        }
    }
}

impl Serialize for ScoreMode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ScoreMode::Finite(p) => serializer.serialize_f64(*p),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for ScoreMode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let mode = match Raw::deserialize(deserializer)? {
            Raw::Number(p) => ScoreMode::finite(p),
            Raw::Text(s) => s.parse(),
        };
        mode.map_err(serde::de::Error::custom)
    }
}

/// Per-answer probabilities `q_j`, indexed by answer column.
#[derive(Clone, Debug, PartialEq)]
pub struct AnswerPrior {
    weights: Vec<f64>,
}

impl AnswerPrior {
    pub fn uniform(columns: usize) -> AnswerPrior {
        AnswerPrior {
            weights: vec![1.0; columns],
        }
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<AnswerPrior, StrategyError> {
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(StrategyError::BadWeight {
                word: format!("column {i}"),
            });
        }
        Ok(AnswerPrior { weights })
    }

    /// Reads `word weight` lines; answers not listed get weight 0.
    pub fn load<R: BufRead>(source: R, answers: &WordList) -> Result<AnswerPrior, StrategyError> {
        let mut weights = vec![0.0; answers.len()];
        for (n, line) in source.lines().enumerate() {
            let bad = |message: String| StrategyError::BadPriorLine { line: n + 1, message };
            let line = line.map_err(|e| bad(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(word), Some(weight), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad("expected `word weight`".into()));
            };
            let col = answers
                .index_of(word)
                .ok_or_else(|| bad(format!("{word:?} is not in the answer list")))?;
            let w: f64 = weight
                .parse()
                .map_err(|_| bad(format!("bad weight {weight:?}")))?;
            if !w.is_finite() || w < 0.0 {
                return Err(StrategyError::BadWeight { word: word.to_string() });
            }
            weights[col] = w;
        }
        Ok(AnswerPrior { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scaled(&self, factor: f64) -> AnswerPrior {
        AnswerPrior {
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    pub(crate) fn mass(&self, columns: &[u32]) -> f64 {
        columns.iter().map(|&c| self.weights[c as usize]).sum()
    }
}

/// How guesses are chosen.
#[derive(Clone, Debug)]
pub struct Policy {
    pub mode: ScoreMode,
    pub use_fds: bool,
    /// Secondary modes used in order to split ties of the primary mode.
    pub tie_break: Vec<ScoreMode>,
    pub prior: Option<Arc<AnswerPrior>>,
}

impl Policy {
    pub fn default_tie_break() -> Vec<ScoreMode> {
        vec![
            ScoreMode::Finite(-1.0),
            ScoreMode::Finite(1.0),
            ScoreMode::Finite(-10.0),
            ScoreMode::Finite(10.0),
        ]
    }

    pub fn new(mode: ScoreMode) -> Policy {
        Policy {
            mode,
            use_fds: false,
            tie_break: Self::default_tie_break(),
            prior: None,
        }
    }

    pub fn with_fds(mut self, use_fds: bool) -> Policy {
        self.use_fds = use_fds;
        self
    }

    pub fn with_prior(mut self, prior: Option<Arc<AnswerPrior>>) -> Policy {
        self.prior = prior;
        self
    }

    pub fn with_tie_break(mut self, tie_break: Vec<ScoreMode>) -> Result<Policy, StrategyError> {
        if tie_break.is_empty() {
            return Err(StrategyError::EmptyTieBreak);
        }
        self.tie_break = tie_break;
        Ok(self)
    }

    /// Stable identity for caching; a prior is identified by a hash of its weights.
    pub fn cache_key(&self) -> String {
        let tb: Vec<String> = self.tie_break.iter().map(|m| m.to_string()).collect();
        let prior = self
            .prior
            .as_ref()
            .map(|p| {
                let mut h = Sha256::new();
                for w in p.weights() {
                    h.update(w.to_bits().to_le_bytes());
                }
                hex::encode(&h.finalize()[..8])
            })
            .unwrap_or_default();
        format!("{}|{}|{}|{}", self.mode, self.use_fds, tb.join(","), prior)
    }
}

impl Default for Policy {
    fn default() -> Self {
        Policy::new(ScoreMode::Finite(-0.5))
    }
}

/// One ranked guess.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreReport {
    pub row: usize,
    pub word: Word,
    pub score: f64,
    pub in_viable: bool,
    pub expected_gy: f64,
    pub expected_g: f64,
}

/// Unweighted p-optimality score of a histogram; 0 for a degenerate row.
pub fn score(h: &Histogram, mode: ScoreMode) -> f64 {
    if h.is_degenerate() {
        return 0.0;
    }
    match mode {
        ScoreMode::Finite(p) => power_sum(h.buckets.iter().map(|b| (b.1 as f64, b.1 as f64)), p) / h.denominator() as f64,
        ScoreMode::PosInf => h.max_bucket() as f64,
        ScoreMode::NegInf => h.singletons() as f64,
    }
}

/// `sum weight * length^p` with an integer fast path.
pub(crate) fn power_sum(terms: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        let e = p as i32;
        terms.map(|(w, l)| w * l.powi(e)).sum()
    } else {
        terms.map(|(w, l)| w * l.powf(p)).sum()
    }
}

/// Renormalized prior mass per code over the viable set (all-green included).
pub fn weighted_histogram(
    state: &GameState<'_>,
    row: usize,
    prior: &AnswerPrior,
) -> Result<Vec<(CodeIndex, f64)>, StrategyError> {
    let total = prior.mass(state.viable());
    if total <= 0.0 {
        return Err(StrategyError::ZeroPriorMass);
    }
    let codes = state.matrix().row(row);
    let mut mass = vec![0.0f64; code_space(state.setup().word_length())];
    let mut seen = vec![false; mass.len()];
    for &c in state.viable() {
        let code = codes.at(c as usize);
        mass[code] += prior.weights[c as usize];
        seen[code] = true;
    }
    Ok(seen
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(code, _)| (CodeIndex(code as u16), mass[code] / total))
        .collect())
}

/// `sum_c W_c * L_c^p` over the non-all-green buckets.
pub fn weighted_score(weights: &[(CodeIndex, f64)], counts: &Histogram, p: f64) -> f64 {
    let mut terms = Vec::with_capacity(counts.buckets.len());
    for &(code, n) in &counts.buckets {
        if let Ok(i) = weights.binary_search_by_key(&code, |w| w.0) {
            terms.push((weights[i].1, n as f64));
        }
    }
    power_sum(terms.into_iter(), p)
}

/// Mean (G+Y, G) counts of the codes `row` produces over the viable set.
pub fn expected_colors(state: &GameState<'_>, row: usize) -> (f64, f64) {
    let (gy, g) = color_sums(state, row);
    let n = state.viable().len() as f64;
    (gy as f64 / n, g as f64 / n)
}

fn color_sums(state: &GameState<'_>, row: usize) -> (u64, u64) {
    let setup = state.setup();
    let codes = state.matrix().row(row);
    state.viable().iter().fold((0, 0), |(gy, g), &c| {
        let (greens, yellows) = setup.color_counts(codes.at(c as usize));
        (gy + (greens + yellows) as u64, g + greens as u64)
    })
}

#[derive(Clone, Copy, Debug)]
enum Stage {
    Score { mode: ScoreMode, fds: bool },
    InViable,
    ExpectedGy,
    ExpectedG,
}

/// Value of a row under one scoring stage.
#[derive(Clone, Copy, Debug)]
struct StageValue {
    degenerate: bool,
    value: f64,
}

struct Ranker<'s, 'a> {
    state: &'s GameState<'a>,
    policy: &'s Policy,
    cache: &'s FdsCache,
    /// Prior is usable only when it puts mass on the viable set.
    prior: Option<&'s AnswerPrior>,
    viable_mask: Vec<bool>,
}

impl<'s, 'a> Ranker<'s, 'a> {
    fn new(state: &'s GameState<'a>, policy: &'s Policy, cache: &'s FdsCache) -> Self {
        let prior = policy
            .prior
            .as_deref()
            .filter(|p| p.mass(state.viable()) > 0.0);
        let mut viable_mask = vec![false; state.matrix().cols()];
        for &c in state.viable() {
            viable_mask[c as usize] = true;
        }
        Ranker {
            state,
            policy,
            cache,
            prior,
            viable_mask,
        }
    }

    fn in_viable(&self, row: u32) -> bool {
        self.state
            .setup()
            .column_of_row(row as usize)
            .is_some_and(|c| self.viable_mask[c])
    }

    fn stages(&self) -> Vec<Stage> {
        let primary = self.policy.mode;
        let mut stages = vec![
            Stage::Score {
                mode: primary,
                fds: self.policy.use_fds,
            },
            Stage::InViable,
        ];
        for &m in &self.policy.tie_break {
            if m.key() != primary.key() {
                stages.push(Stage::Score { mode: m, fds: false });
            }
        }
        stages.push(Stage::ExpectedGy);
        stages.push(Stage::ExpectedG);
        stages
    }

    fn histogram(&self, scratch: &mut Scratch, row: u32) -> Histogram {
        scratch.histogram(
            self.state.matrix().row(row as usize),
            self.state.viable(),
            self.state.setup().all_green().value(),
        )
    }

    fn stage_value(&self, scratch: &mut Scratch, row: u32, mode: ScoreMode, use_fds: bool) -> StageValue {
        let h = self.histogram(scratch, row);
        let value = self.row_score(&h, row, mode, use_fds);
        StageValue {
            degenerate: self.is_degenerate(&h, row),
            value,
        }
    }

    fn is_degenerate(&self, h: &Histogram, row: u32) -> bool {
        if h.is_degenerate() {
            return true;
        }
        match (self.prior, self.state.setup().column_of_row(row as usize)) {
            (Some(prior), Some(col)) if h.has_all_green => {
                let rest = prior.mass(self.state.viable()) - prior.weights[col];
                rest <= 0.0
            }
            _ => false,
        }
    }

    fn row_score(&self, h: &Histogram, row: u32, mode: ScoreMode, use_fds: bool) -> f64 {
        if h.is_degenerate() {
            return 0.0;
        }
        match (mode, self.prior) {
            (ScoreMode::Finite(p), Some(prior)) => {
                let w = weighted_histogram(self.state, row as usize, prior)
                    .expect("prior mass checked when the ranker was built");
                let all_green = self.state.setup().all_green();
                let win = w
                    .iter()
                    .find(|x| x.0 == all_green)
                    .map(|x| x.1)
                    .unwrap_or(0.0);
                if win >= 1.0 {
                    return 0.0;
                }
                let lengths = if use_fds {
                    fds::adjusted_lengths(self.state, row as usize, self.cache)
                } else {
                    h.buckets.iter().map(|b| (b.0, b.1 as f64)).collect()
                };
                let mut terms = Vec::with_capacity(lengths.len());
                for (code, l) in lengths {
                    if let Ok(i) = w.binary_search_by_key(&code, |x| x.0) {
                        terms.push((w[i].1, l));
                    }
                }
                power_sum(terms.into_iter(), p) / (1.0 - win)
            }
            _ if use_fds => fds::score_fds_with(self.state, row as usize, h, mode, self.cache),
            _ => score(h, mode),
        }
    }

    /// Splits `rows` into tie classes, best class first. Rows inside a class
    /// keep ascending row order.
    fn partition(&self, rows: Vec<u32>, stage: Stage) -> Vec<Vec<u32>> {
        match stage {
            Stage::InViable => {
                let (inside, outside): (Vec<u32>, Vec<u32>) =
                    rows.into_iter().partition(|&r| self.in_viable(r));
                [inside, outside].into_iter().filter(|c| !c.is_empty()).collect()
            }
            Stage::ExpectedGy | Stage::ExpectedG => {
                let mut keyed: Vec<(u64, u32)> = rows
                    .into_iter()
                    .map(|r| {
                        let (gy, g) = color_sums(self.state, r as usize);
                        (if matches!(stage, Stage::ExpectedGy) { gy } else { g }, r)
                    })
                    .collect();
                keyed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                group_by_key(keyed, |a, b| a == b)
            }
            Stage::Score { mode, fds } => self.partition_score(rows, mode, fds),
        }
    }

    fn partition_score(&self, rows: Vec<u32>, mode: ScoreMode, use_fds: bool) -> Vec<Vec<u32>> {
        let word_length = self.state.setup().word_length();
        let values: Vec<(u32, StageValue)> = if rows.len() > 64 {
            rows.par_iter()
                .map_init(
                    || Scratch::new(word_length),
                    |s, &r| (r, self.stage_value(s, r, mode, use_fds)),
                )
                .collect()
        } else {
            let mut s = Scratch::new(word_length);
            rows.iter()
                .map(|&r| (r, self.stage_value(&mut s, r, mode, use_fds)))
                .collect()
        };

        let mut classes = Vec::new();
        let degenerate: Vec<u32> = values
            .iter()
            .filter(|v| v.1.degenerate)
            .map(|v| v.0)
            .collect();
        if !degenerate.is_empty() {
            classes.push(degenerate);
        }

        // Oriented so that smaller is better.
        let sign = if mode.maximizes() { -1.0 } else { 1.0 };
        let mut keyed: Vec<(f64, u32)> = values
            .iter()
            .filter(|v| !v.1.degenerate)
            .map(|v| (sign * v.1.value, v.0))
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let exact = !use_fds && self.prior.is_none();
        match (mode, exact) {
            (ScoreMode::PosInf | ScoreMode::NegInf, true) => {
                classes.extend(group_by_key(keyed, |a, b| a == b));
            }
            (ScoreMode::Finite(_), true) if mode.integer_exponent().is_some() => {
                let e = mode.integer_exponent().unwrap() + 1;
                let mut scratch = Scratch::new(word_length);
                for block in group_by_key(keyed, |a, b| near(*a, *b, NEAR_TIE)) {
                    if block.len() == 1 {
                        classes.push(block);
                        continue;
                    }
                    let mut exact_keyed: Vec<(BigRational, u32)> = block
                        .into_iter()
                        .map(|r| {
                            let h = self.histogram(&mut scratch, r);
                            let v = exact_score(&h, e);
                            (if mode.maximizes() { -v } else { v }, r)
                        })
                        .collect();
                    exact_keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
                    classes.extend(group_by_key(exact_keyed, |a, b| a == b));
                }
            }
            _ => classes.extend(group_by_anchor(keyed, TIE_TOLERANCE)),
        }
        for class in &mut classes {
            class.sort_unstable();
        }
        classes
    }

    /// Appends rows in ranked order until `need` rows are collected.
    fn refine(&self, rows: Vec<u32>, stages: &[Stage], need: usize, out: &mut Vec<u32>) {
        if out.len() >= need {
            return;
        }
        if rows.len() <= 1 || stages.is_empty() {
            let mut rows = rows;
            rows.sort_unstable();
            let room = need - out.len();
            out.extend(rows.into_iter().take(room));
            return;
        }
        for class in self.partition(rows, stages[0]) {
            self.refine(class, &stages[1..], need, out);
            if out.len() >= need {
                break;
            }
        }
    }

    fn report(&self, row: u32) -> ScoreReport {
        let mut scratch = Scratch::new(self.state.setup().word_length());
        let h = self.histogram(&mut scratch, row);
        let (expected_gy, expected_g) = expected_colors(self.state, row as usize);
        ScoreReport {
            row: row as usize,
            word: self.state.setup().guess_word(row as usize).clone(),
            score: self.row_score(&h, row, self.policy.mode, self.policy.use_fds),
            in_viable: self.in_viable(row),
            expected_gy,
            expected_g,
        }
    }
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Groups consecutive items whose keys satisfy `same` pairwise (neighbours).
fn group_by_key<K>(items: Vec<(K, u32)>, same: impl Fn(&K, &K) -> bool) -> Vec<Vec<u32>> {
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut last: Option<K> = None;
    for (k, r) in items {
        match &last {
            Some(prev) if same(prev, &k) => groups.last_mut().unwrap().push(r),
            _ => groups.push(vec![r]),
        }
        last = Some(k);
    }
    groups
}

/// Groups sorted float keys into classes within `tol` of each class's first key.
fn group_by_anchor(items: Vec<(f64, u32)>, tol: f64) -> Vec<Vec<u32>> {
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut anchor = f64::NAN;
    for (k, r) in items {
        if !groups.is_empty() && near(anchor, k, tol) {
            groups.last_mut().unwrap().push(r);
        } else {
            anchor = k;
            groups.push(vec![r]);
        }
    }
    groups
}

/// `sum_c L_c^e / denominator` as an exact rational.
fn exact_score(h: &Histogram, e: i32) -> BigRational {
    let mut sum = BigRational::zero();
    for &(_, n) in &h.buckets {
        let base = BigInt::from(n);
        let term = if e >= 0 {
            BigRational::from_integer(num_traits::pow(base, e as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(base, (-e) as usize))
        };
        sum += term;
    }
    sum / BigRational::from_integer(BigInt::from(h.denominator()))
}

/// Ranked guesses, best first; `top_k = None` ranks every guess row.
pub fn rank_guesses(state: &GameState<'_>, policy: &Policy, top_k: Option<usize>) -> Vec<ScoreReport> {
    let cache = FdsCache::new(state.mode());
    rank_guesses_with(state, policy, top_k, &cache)
}

/// `rank_guesses` sharing an FDS classification cache across calls.
pub fn rank_guesses_with(
    state: &GameState<'_>,
    policy: &Policy,
    top_k: Option<usize>,
    cache: &FdsCache,
) -> Vec<ScoreReport> {
    let ranker = Ranker::new(state, policy, cache);
    let rows: Vec<u32> = state.guess_rows().to_vec();
    let need = top_k.unwrap_or(rows.len()).min(rows.len());
    let mut ordered = Vec::with_capacity(need);
    ranker.refine(rows, &ranker.stages(), need, &mut ordered);
    ordered.into_iter().map(|r| ranker.report(r)).collect()
}

/// The policy's next guess row.
pub fn select_guess(state: &GameState<'_>, policy: &Policy) -> usize {
    let cache = FdsCache::new(state.mode());
    select_guess_with(state, policy, &cache)
}

pub fn select_guess_with(state: &GameState<'_>, policy: &Policy, cache: &FdsCache) -> usize {
    let ranker = Ranker::new(state, policy, cache);
    let mut ordered = Vec::with_capacity(1);
    ranker.refine(state.guess_rows().to_vec(), &ranker.stages(), 1, &mut ordered);
    ordered[0] as usize
}

/// Compares two scores under a mode's orientation (`Less` = better).
pub fn compare_scores(mode: ScoreMode, a: f64, b: f64) -> Ordering {
    if mode.maximizes() {
        b.total_cmp(&a)
    } else {
        a.total_cmp(&b)
    }
}
