//! The two-phase agnostic booster.
//!
//! Phase one calls the weak learner on every size-m0 index vector into the
//! first half of the training sequence, M times per round for R rounds, with
//! per-call seeds derived from a root seed. Phase two returns the empirical
//! risk minimizer over sign-averages of T pool members on the second half.
//!
//! The subsample loop is intentionally redundant for deterministic learners
//! (the r-loop re-derives fresh seeds but revisits the same subsamples); it
//! is kept because the per-round independence of seeds is what the repeat
//! amplification relies on.
//!
//! Both phases are exponential by design, so a budget caps the weak-learner
//! call count and the combination count and fails fast with the exact number.

use std::collections::HashSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, VotingClassifier};
use crate::seed::Seed;
use crate::weak_learners::WeakLearner;

/// Loop sizes for one run: R rounds, M repeats per subsample, T members in
/// the output combination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub rounds: u64,
    pub repeats: u64,
    pub combination_size: u64,
    pub theta: f64,
    pub d_star: u64,
}

/// `ceil(ln(n) / theta^2)`. Raw closed form, no validation.
pub fn round_count(n: u64, theta: f64) -> u64 {
    ((n as f64).ln() / (theta * theta)).ceil() as u64
}

/// `ceil(ln(5 R / delta) / ln(1 / delta0))`. Raw closed form, no validation.
pub fn repeat_count(rounds: u64, delta: f64, delta0: f64) -> u64 {
    ((5.0 * rounds as f64 / delta).ln() / (1.0 / delta0).ln()).ceil() as u64
}

/// `ceil(min(ln(n)/theta^2, 260^2 (4 d* + 2) / theta^2))`. Raw closed form.
pub fn combination_size(n: u64, theta: f64, d_star: u64) -> u64 {
    let t2 = theta * theta;
    let by_rounds = (n as f64).ln() / t2;
    let by_dual = 260.0f64 * 260.0 * (4.0 * d_star as f64 + 2.0) / t2;
    by_rounds.min(by_dual).ceil() as u64
}

/// Validate parameters and compute the run schedule.
pub fn schedule_params(
    n: usize,
    theta: f64,
    delta: f64,
    delta0: f64,
    d_star: u64,
) -> Result<Schedule> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::OddDatasetLength(n));
    }
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "theta must be in (0, 1/2), got {theta}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta0 must be in (0, 1), got {delta0}"
        )));
    }
    if d_star == 0 {
        return Err(Error::InvalidParameter(
            "dual VC dimension must be positive".into(),
        ));
    }
    let rounds = round_count(n as u64, theta);
    let repeats = repeat_count(rounds, delta, delta0);
    let t = combination_size(n as u64, theta, d_star);
    Ok(Schedule {
        rounds,
        repeats,
        combination_size: t,
        theta,
        d_star,
    })
}

/// Caps on the two exponential phases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub weak_calls: u64,
    pub combinations: u64,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            weak_calls: 100_000_000,
            combinations: 100_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DedupMode {
    Off,
    ExactTable,
}

/// How subsample index vectors are enumerated. Ordered tuples is the faithful
/// default; sorted multisets collapse order and are valid only for learners
/// that declare order-insensitivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsampleMode {
    OrderedTuples,
    SortedMultisets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Full enumeration of T-multisets; the only mode with the ERM guarantee.
    Exhaustive,
    /// Greedy forward selection; a heuristic escape hatch, not used by the
    /// acceptance suite.
    Greedy,
}

/// A pool entry with its provenance: round r (1-based), repeat m (1-based),
/// the subsample index vector (0-based positions into S1), and the seed the
/// weak learner received.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PooledHypothesis {
    pub hypothesis: Hypothesis,
    pub round: u64,
    pub repeat: u64,
    pub subsample: Vec<usize>,
    pub seed: Seed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisPool {
    pub entries: Vec<PooledHypothesis>,
    pub dedup: DedupMode,
}

impl HypothesisPool {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Keep the first occurrence of each full-domain value vector. Requires
    /// tabulated hypotheses.
    pub fn deduplicate_exact(&self) -> Result<HypothesisPool> {
        let mut seen: HashSet<&[i8]> = HashSet::new();
        let mut keep = Vec::new();
        for (i, entry) in self.entries.iter().enumerate() {
            match &entry.hypothesis {
                Hypothesis::Tabulated { values } => {
                    if seen.insert(values.as_slice()) {
                        keep.push(i);
                    }
                }
                Hypothesis::Stump { .. } => {
                    return Err(Error::InvalidParameter(
                        "exact-table dedup needs tabulated hypotheses".into(),
                    ))
                }
            }
        }
        Ok(HypothesisPool {
            entries: keep.iter().map(|&i| self.entries[i].clone()).collect(),
            dedup: DedupMode::ExactTable,
        })
    }
}

pub(crate) fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

fn decode_tuple(mut block: u64, base: usize, len: usize) -> Vec<usize> {
    // Big-endian digits, so block order equals lexicographic tuple order.
    let mut out = vec![0usize; len];
    for slot in (0..len).rev() {
        out[slot] = (block % base as u64) as usize;
        block /= base as u64;
    }
    out
}

/// Call the weak learner on every (round, subsample, repeat) triple and
/// collect the returned hypotheses with provenance. Entry order is the nested
/// loop order (r outermost, then the index vectors in lexicographic order,
/// then m), independent of how many workers run the calls.
pub fn build_pool(
    s1: &Dataset,
    learner: &dyn WeakLearner,
    sched: &Schedule,
    m0: usize,
    seed_root: Seed,
    budget: &Budget,
    subsamples: SubsampleMode,
) -> Result<HypothesisPool> {
    if s1.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if m0 == 0 {
        return Err(Error::InvalidParameter("m0 must be positive".into()));
    }
    let half = s1.len() as u128;

    let index_vectors: Option<Vec<Vec<usize>>> = match subsamples {
        SubsampleMode::OrderedTuples => None,
        SubsampleMode::SortedMultisets => {
            if !learner.order_insensitive() {
                return Err(Error::InvalidParameter(
                    "sorted-multiset subsampling needs an order-insensitive learner".into(),
                ));
            }
            Some(enumerate_combinations(s1.len(), m0).collect())
        }
    };
    let vectors_per_round: u128 = match &index_vectors {
        None => {
            let mut acc: u128 = 1;
            for _ in 0..m0 {
                acc = acc
                    .checked_mul(half)
                    .ok_or_else(|| Error::BudgetExceeded {
                        kind: "weak-learner call",
                        required: format!("more than 2^128 ({half}^{m0} index vectors)"),
                        budget: budget.weak_calls,
                    })?;
            }
            acc
        }
        Some(v) => v.len() as u128,
    };

    let total = (sched.rounds as u128)
        .checked_mul(sched.repeats as u128)
        .and_then(|x| x.checked_mul(vectors_per_round))
        .ok_or_else(|| Error::BudgetExceeded {
            kind: "weak-learner call",
            required: "more than 2^128".into(),
            budget: budget.weak_calls,
        })?;
    if total > budget.weak_calls as u128 {
        return Err(Error::BudgetExceeded {
            kind: "weak-learner call",
            required: total.to_string(),
            budget: budget.weak_calls,
        });
    }

    let per_round = (sched.repeats as u128 * vectors_per_round) as u64;
    let entries: Result<Vec<PooledHypothesis>> = (0..total as u64)
        .into_par_iter()
        .map(|flat| {
            let round = flat / per_round + 1;
            let rest = flat % per_round;
            let block = rest / sched.repeats;
            let repeat = rest % sched.repeats + 1;
            let subsample = match &index_vectors {
                None => decode_tuple(block, s1.len(), m0),
                Some(v) => v[block as usize].clone(),
            };
            let mut parts = Vec::with_capacity(2 + m0);
            parts.push(round);
            parts.push(repeat);
            parts.extend(subsample.iter().map(|&i| i as u64));
            let seed = seed_root.derive(&parts);
            let hypothesis = learner.call(&s1.restrict(&subsample)?, seed)?;
            Ok(PooledHypothesis {
                hypothesis,
                round,
                repeat,
                subsample,
                seed,
            })
        })
        .collect();

    Ok(HypothesisPool {
        entries: entries?,
        dedup: DedupMode::Off,
    })
}

/// All sorted T-multisets of `{0, .., pool_size-1}`, in lexicographic order.
/// Yields `C(pool_size + t - 1, t)` index vectors.
pub fn enumerate_combinations(pool_size: usize, t: usize) -> MultisetCombinations {
    let next = if pool_size == 0 || t == 0 {
        None
    } else {
        Some(vec![0usize; t])
    };
    MultisetCombinations {
        next,
        max_index: pool_size.saturating_sub(1),
    }
}

pub struct MultisetCombinations {
    next: Option<Vec<usize>>,
    max_index: usize,
}

impl Iterator for MultisetCombinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        while i > 0 {
            i -= 1;
            if succ[i] < self.max_index {
                let v = succ[i] + 1;
                for slot in succ.iter_mut().skip(i) {
                    *slot = v;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(current)
    }
}

/// The winning combination from phase two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Sorted pool-index multiset; ties resolve to the lexicographically
    /// smallest.
    pub indices: Vec<usize>,
    pub mistakes: u64,
    pub loss: f64,
    /// Number of candidate multisets scored.
    pub combinations: u64,
}

fn prediction_matrix(pool: &HypothesisPool, s2: &Dataset) -> Result<(Vec<Vec<i8>>, Vec<i8>)> {
    let mut preds = Vec::with_capacity(pool.len());
    for entry in &pool.entries {
        let mut row = Vec::with_capacity(s2.len());
        for e in s2.iter() {
            row.push(entry.hypothesis.evaluate(&e.point)?.value());
        }
        preds.push(row);
    }
    let labels = s2.iter().map(|e| e.label.value()).collect();
    Ok((preds, labels))
}

fn mistakes_of_sums(sums: &[i64], labels: &[i8]) -> u64 {
    sums.iter()
        .zip(labels)
        .filter(|(&sum, &y)| {
            let pred: i8 = if sum >= 0 { 1 } else { -1 };
            pred != y
        })
        .count() as u64
}

struct ShardBest {
    mistakes: u64,
    indices: Vec<usize>,
    leaves: u64,
}

#[allow(clippy::too_many_arguments)]
fn dfs_shard(
    preds: &[Vec<i8>],
    labels: &[i8],
    t: usize,
    first: usize,
    sums: &mut Vec<i64>,
    stack: &mut Vec<usize>,
    best: &mut Option<ShardBest>,
    leaves: &mut u64,
) {
    let depth = stack.len();
    if depth == t {
        *leaves += 1;
        let mistakes = mistakes_of_sums(sums, labels);
        // Candidates arrive in lexicographic order, so strict improvement
        // keeps the lex-smallest among ties.
        if best.as_ref().is_none_or(|b| mistakes < b.mistakes) {
            *best = Some(ShardBest {
                mistakes,
                indices: stack.clone(),
                leaves: 0,
            });
        }
        return;
    }
    let start = stack.last().copied().unwrap_or(first);
    for i in start..preds.len() {
        for (sum, &p) in sums.iter_mut().zip(&preds[i]) {
            *sum += i64::from(p);
        }
        stack.push(i);
        dfs_shard(preds, labels, t, first, sums, stack, best, leaves);
        stack.pop();
        for (sum, &p) in sums.iter_mut().zip(&preds[i]) {
            *sum -= i64::from(p);
        }
    }
}

/// Exhaustive ERM over sign-averages of T pool members on the validation
/// half. The enumeration is partitioned by the smallest member index; shard
/// minima reduce by (mistake count, lexicographic indices), so the result is
/// independent of the partitioning and of the worker count.
pub fn erm_select(pool: &HypothesisPool, t: usize, s2: &Dataset) -> Result<Selection> {
    if pool.is_empty() {
        return Err(Error::EmptyClass);
    }
    if s2.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if t == 0 {
        return Err(Error::InvalidParameter("combination size must be >= 1".into()));
    }
    let (preds, labels) = prediction_matrix(pool, s2)?;

    let shards: Vec<ShardBest> = (0..pool.len())
        .into_par_iter()
        .map(|first| {
            let mut sums = vec![0i64; labels.len()];
            let mut stack = Vec::with_capacity(t);
            let mut best: Option<ShardBest> = None;
            let mut leaves = 0u64;
            // Seed the shard with its first member, then extend from there.
            for (sum, &p) in sums.iter_mut().zip(&preds[first]) {
                *sum += i64::from(p);
            }
            stack.push(first);
            dfs_shard(&preds, labels.as_slice(), t, first, &mut sums, &mut stack, &mut best, &mut leaves);
            let mut best = best.expect("every shard has at least one leaf");
            best.leaves = leaves;
            best
        })
        .collect();

    let combinations: u64 = shards.iter().map(|s| s.leaves).sum();
    let winner = shards
        .into_iter()
        .min_by(|a, b| {
            a.mistakes
                .cmp(&b.mistakes)
                .then_with(|| a.indices.cmp(&b.indices))
        })
        .expect("nonempty pool");

    Ok(Selection {
        mistakes: winner.mistakes,
        loss: winner.mistakes as f64 / labels.len() as f64,
        indices: winner.indices,
        combinations,
    })
}

/// Greedy forward selection of T members (heuristic; no ERM guarantee).
pub fn greedy_select(pool: &HypothesisPool, t: usize, s2: &Dataset) -> Result<Selection> {
    if pool.is_empty() {
        return Err(Error::EmptyClass);
    }
    if s2.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if t == 0 {
        return Err(Error::InvalidParameter("combination size must be >= 1".into()));
    }
    let (preds, labels) = prediction_matrix(pool, s2)?;
    let mut sums = vec![0i64; labels.len()];
    let mut indices = Vec::with_capacity(t);
    let mut scored = 0u64;
    for _ in 0..t {
        let mut best: Option<(u64, usize)> = None;
        for (i, row) in preds.iter().enumerate() {
            let trial: Vec<i64> = sums
                .iter()
                .zip(row)
                .map(|(&s, &p)| s + i64::from(p))
                .collect();
            let mistakes = mistakes_of_sums(&trial, &labels);
            scored += 1;
            if best.is_none_or(|(b, _)| mistakes < b) {
                best = Some((mistakes, i));
            }
        }
        let (_, pick) = best.expect("nonempty pool");
        for (sum, &p) in sums.iter_mut().zip(&preds[pick]) {
            *sum += i64::from(p);
        }
        indices.push(pick);
    }
    indices.sort_unstable();
    let mistakes = mistakes_of_sums(&sums, &labels);
    Ok(Selection {
        indices,
        mistakes,
        loss: mistakes as f64 / labels.len() as f64,
        combinations: scored,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub delta: f64,
    pub delta0: f64,
    pub m0: usize,
    pub theta: f64,
    pub d_star: u64,
    pub seed_root: Seed,
    pub budget: Budget,
    pub dedup: DedupMode,
    pub subsamples: SubsampleMode,
    pub search: SearchMode,
}

impl BoostConfig {
    pub fn new(delta: f64, delta0: f64, m0: usize, theta: f64, d_star: u64, seed_root: Seed) -> BoostConfig {
        BoostConfig {
            delta,
            delta0,
            m0,
            theta,
            d_star,
            seed_root,
            budget: Budget::default(),
            dedup: DedupMode::Off,
            subsamples: SubsampleMode::OrderedTuples,
            search: SearchMode::Exhaustive,
        }
    }
}

/// Everything a run did, for cost accounting and replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub n: usize,
    pub rounds: u64,
    pub repeats: u64,
    pub combination_size: u64,
    pub pool_size_raw: usize,
    pub pool_size: usize,
    pub weak_calls: u64,
    pub combinations: u64,
    pub selected: Vec<usize>,
    pub validation_mistakes: u64,
    pub validation_loss: f64,
    pub wall_ms: u64,
}

#[derive(Clone, Debug)]
pub struct BoostOutcome {
    pub voter: VotingClassifier,
    pub report: RunReport,
    pub pool: HypothesisPool,
}

/// The full pipeline: split, pool, (optional) dedup, budget-checked
/// combination search, and the winning voter with its run report.
pub fn agnostic_boost(
    s: &Dataset,
    learner: &dyn WeakLearner,
    cfg: &BoostConfig,
) -> Result<BoostOutcome> {
    let started = Instant::now();
    let sched = schedule_params(s.len(), cfg.theta, cfg.delta, cfg.delta0, cfg.d_star)?;
    let (s1, s2) = s.split_halves()?;

    let raw_pool = build_pool(
        &s1,
        learner,
        &sched,
        cfg.m0,
        cfg.seed_root,
        &cfg.budget,
        cfg.subsamples,
    )?;
    let weak_calls = raw_pool.len() as u64;
    let pool_size_raw = raw_pool.len();
    let pool = match cfg.dedup {
        DedupMode::Off => raw_pool,
        DedupMode::ExactTable => raw_pool.deduplicate_exact()?,
    };

    let t = sched.combination_size as usize;
    if cfg.search == SearchMode::Exhaustive {
        let combos = binomial_u128((pool.len() + t - 1) as u128, t as u128)
            .ok_or_else(|| Error::BudgetExceeded {
                kind: "combination",
                required: "more than 2^128".into(),
                budget: cfg.budget.combinations,
            })?;
        if combos > cfg.budget.combinations as u128 {
            return Err(Error::BudgetExceeded {
                kind: "combination",
                required: combos.to_string(),
                budget: cfg.budget.combinations,
            });
        }
    }

    let selection = match cfg.search {
        SearchMode::Exhaustive => erm_select(&pool, t, &s2)?,
        SearchMode::Greedy => greedy_select(&pool, t, &s2)?,
    };

    let members: Vec<Hypothesis> = selection
        .indices
        .iter()
        .map(|&i| pool.entries[i].hypothesis.clone())
        .collect();
    let voter = VotingClassifier::new(members)?;

    let report = RunReport {
        n: s.len(),
        rounds: sched.rounds,
        repeats: sched.repeats,
        combination_size: sched.combination_size,
        pool_size_raw,
        pool_size: pool.len(),
        weak_calls,
        combinations: selection.combinations,
        selected: selection.indices.clone(),
        validation_mistakes: selection.mistakes,
        validation_loss: selection.loss,
        wall_ms: started.elapsed().as_millis() as u64,
    };

    Ok(BoostOutcome {
        voter,
        report,
        pool,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Example, Label, Point};
    use crate::vc::TabulatedClass;
    use crate::weak_learners::ErmWeakLearner;

    #[test]
    fn schedule_matches_the_closed_forms() {
        let sched = schedule_params(100, 0.25, 0.1, 0.5, 1).unwrap();
        assert_eq!(sched.rounds, 74);
        assert_eq!(sched.repeats, 12);
        assert_eq!(sched.combination_size, 74);
    }

    #[test]
    fn raw_round_count_at_half() {
        // The closed form itself, outside the validated range.
        assert_eq!(round_count(8, 0.5), 9);
    }

    #[test]
    fn repeats_blow_up_as_delta0_approaches_one() {
        assert_eq!(repeat_count(9, 0.1, 0.99), 608);
    }

    #[test]
    fn schedule_rejects_bad_parameters() {
        assert!(matches!(
            schedule_params(7, 0.25, 0.1, 0.5, 1),
            Err(Error::OddDatasetLength(7))
        ));
        assert!(schedule_params(8, 0.5, 0.1, 0.5, 1).is_err());
        assert!(schedule_params(8, 0.0, 0.1, 0.5, 1).is_err());
        assert!(schedule_params(8, 0.25, 0.1, 0.5, 0).is_err());
    }

    fn labeled_by(target: &Hypothesis, points: &[usize]) -> Dataset {
        points
            .iter()
            .map(|&x| {
                Example::new(
                    Point::Finite(x),
                    target.evaluate(&Point::Finite(x)).unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn pool_size_is_rounds_times_repeats_times_tuples() {
        let class = TabulatedClass::full(2).unwrap();
        let target = class.hypothesis(1).unwrap();
        let s1 = labeled_by(&target, &[0, 1, 0, 1]);
        let learner = ErmWeakLearner::new(class).unwrap();
        let sched = Schedule {
            rounds: 9,
            repeats: 2,
            combination_size: 3,
            theta: 0.45,
            d_star: 1,
        };
        let pool = build_pool(
            &s1,
            &learner,
            &sched,
            1,
            Seed(5),
            &Budget::default(),
            SubsampleMode::OrderedTuples,
        )
        .unwrap();
        assert_eq!(pool.len(), 9 * 2 * 4);
        // Provenance ranges.
        assert!(pool.entries.iter().all(|e| (1..=9).contains(&e.round)));
        assert!(pool.entries.iter().all(|e| (1..=2).contains(&e.repeat)));
        assert!(pool.entries.iter().all(|e| e.subsample.len() == 1));
    }

    #[test]
    fn zero_m0_is_rejected() {
        let class = TabulatedClass::full(1).unwrap();
        let s1 = labeled_by(&class.hypothesis(0).unwrap(), &[0]);
        let learner = ErmWeakLearner::new(class).unwrap();
        let sched = Schedule {
            rounds: 1,
            repeats: 1,
            combination_size: 1,
            theta: 0.45,
            d_star: 1,
        };
        assert!(build_pool(
            &s1,
            &learner,
            &sched,
            0,
            Seed(5),
            &Budget::default(),
            SubsampleMode::OrderedTuples
        )
        .is_err());
    }

    #[test]
    fn budget_error_names_the_count() {
        let class = TabulatedClass::full(2).unwrap();
        let s1 = labeled_by(&class.hypothesis(0).unwrap(), &[0, 1]);
        let learner = ErmWeakLearner::new(class).unwrap();
        let sched = Schedule {
            rounds: 10,
            repeats: 10,
            combination_size: 3,
            theta: 0.45,
            d_star: 1,
        };
        let budget = Budget {
            weak_calls: 100,
            combinations: 100,
        };
        match build_pool(
            &s1,
            &learner,
            &sched,
            2,
            Seed(5),
            &budget,
            SubsampleMode::OrderedTuples,
        ) {
            Err(Error::BudgetExceeded { required, .. }) => assert_eq!(required, "400"),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn constant_learner_dedups_to_one() {
        let class = TabulatedClass::new(2, vec![vec![1, 1]]).unwrap();
        let s1 = labeled_by(&class.hypothesis(0).unwrap(), &[0, 1]);
        let learner = ErmWeakLearner::new(class).unwrap();
        let sched = Schedule {
            rounds: 3,
            repeats: 2,
            combination_size: 2,
            theta: 0.45,
            d_star: 1,
        };
        let pool = build_pool(
            &s1,
            &learner,
            &sched,
            1,
            Seed(5),
            &Budget::default(),
            SubsampleMode::OrderedTuples,
        )
        .unwrap();
        assert_eq!(pool.len(), 12);
        let deduped = pool.deduplicate_exact().unwrap();
        assert_eq!(deduped.len(), 1);
    }

    #[test]
    fn multiset_enumeration_counts_and_order() {
        let all: Vec<Vec<usize>> = enumerate_combinations(4, 3).collect();
        assert_eq!(all.len(), 20);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all, "lexicographic order and uniqueness");

        let singles: Vec<Vec<usize>> = enumerate_combinations(5, 1).collect();
        assert_eq!(singles, vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);

        let lone: Vec<Vec<usize>> = enumerate_combinations(1, 4).collect();
        assert_eq!(lone, vec![vec![0, 0, 0, 0]]);
    }

    fn pool_of(rows: &[Vec<i8>]) -> HypothesisPool {
        let entries = rows
            .iter()
            .enumerate()
            .map(|(i, row)| PooledHypothesis {
                hypothesis: Hypothesis::tabulated(row.clone()).unwrap(),
                round: 1,
                repeat: 1,
                subsample: vec![i],
                seed: Seed(0),
            })
            .collect();
        HypothesisPool {
            entries,
            dedup: DedupMode::Off,
        }
    }

    #[test]
    fn singleton_search_finds_the_true_labeling() {
        let pool = pool_of(&[vec![1, -1, 1, -1], vec![1, 1, 1, 1]]);
        let target = pool.entries[0].hypothesis.clone();
        let s2 = labeled_by(&target, &[0, 1, 2, 3]);
        let sel = erm_select(&pool, 1, &s2).unwrap();
        assert_eq!(sel.indices, vec![0]);
        assert_eq!(sel.mistakes, 0);
        assert_eq!(sel.combinations, 2);
    }

    #[test]
    fn identical_hypotheses_tie_to_all_zeros() {
        let row = vec![1, 1, -1, -1];
        let pool = pool_of(&[row.clone(), row.clone(), row]);
        let target = pool.entries[0].hypothesis.clone();
        let s2 = labeled_by(&target, &[0, 1, 2, 3]);
        let sel = erm_select(&pool, 2, &s2).unwrap();
        assert_eq!(sel.indices, vec![0, 0]);
        assert_eq!(sel.combinations, 6);
    }

    #[test]
    fn pairing_complementary_mistakes_wins() {
        // h_a wrong on example 1 only, h_b wrong on example 2 only, h_c wrong
        // everywhere; the tied votes of {a, b} resolve to +1 and fix both.
        let pool = pool_of(&[
            vec![1, -1, 1, 1],
            vec![1, 1, -1, 1],
            vec![-1, -1, -1, -1],
        ]);
        let s2: Dataset = (0..4)
            .map(|x| Example::new(Point::Finite(x), Label::PLUS))
            .collect();
        let sel = erm_select(&pool, 2, &s2).unwrap();
        assert_eq!(sel.combinations, 6);

        // Independent check against plain enumeration.
        let mut oracle: Option<(u64, Vec<usize>)> = None;
        for combo in enumerate_combinations(3, 2) {
            let voter = VotingClassifier::new(
                combo
                    .iter()
                    .map(|&i| pool.entries[i].hypothesis.clone())
                    .collect(),
            )
            .unwrap();
            let mistakes = crate::metrics::empirical_mistakes(&s2, &voter).unwrap();
            if oracle.as_ref().is_none_or(|(b, _)| mistakes < *b) {
                oracle = Some((mistakes, combo));
            }
        }
        let (oracle_mistakes, oracle_indices) = oracle.unwrap();
        assert_eq!(sel.mistakes, oracle_mistakes);
        assert_eq!(sel.indices, oracle_indices);
        assert_eq!(sel.indices, vec![0, 1]);
        assert_eq!(sel.mistakes, 0);
    }

    #[test]
    fn boost_runs_end_to_end_on_a_constant_target() {
        let class = TabulatedClass::full(2).unwrap();
        let target = class.hypothesis(0).unwrap(); // all minus
        let s = labeled_by(&target, &[0, 1, 0, 1, 1, 0, 1, 0]);
        let learner = ErmWeakLearner::new(class).unwrap();
        let mut cfg = BoostConfig::new(0.1, 0.5, 1, 0.45, 1, Seed(13));
        cfg.dedup = DedupMode::ExactTable;
        let outcome = agnostic_boost(&s, &learner, &cfg).unwrap();
        assert_eq!(outcome.report.validation_mistakes, 0);
        for x in 0..2 {
            assert_eq!(
                outcome.voter.evaluate(&Point::Finite(x)).unwrap().0,
                Label::MINUS
            );
        }
        // Cost accounting: R * M * (n/2)^(m0).
        let expected = outcome.report.rounds * outcome.report.repeats * 4;
        assert_eq!(outcome.report.weak_calls, expected);
    }

    #[test]
    fn boost_with_a_stubborn_learner_returns_its_answer() {
        struct Stubborn(Hypothesis);
        impl WeakLearner for Stubborn {
            fn call(&self, _: &Dataset, _: Seed) -> Result<Hypothesis> {
                Ok(self.0.clone())
            }
            fn describe(&self) -> String {
                "constant".into()
            }
        }
        let wrong = Hypothesis::tabulated(vec![1, 1]).unwrap();
        let target = Hypothesis::tabulated(vec![-1, -1]).unwrap();
        let s = labeled_by(&target, &[0, 1, 0, 1]);
        let mut cfg = BoostConfig::new(0.1, 0.5, 1, 0.45, 1, Seed(13));
        cfg.dedup = DedupMode::ExactTable;
        let outcome = agnostic_boost(&s, &Stubborn(wrong.clone()), &cfg).unwrap();
        for x in 0..2 {
            assert_eq!(
                outcome.voter.evaluate(&Point::Finite(x)).unwrap().0,
                wrong.evaluate(&Point::Finite(x)).unwrap()
            );
        }
        assert_eq!(outcome.report.validation_mistakes, 2);
    }

    #[test]
    fn odd_input_is_rejected() {
        let class = TabulatedClass::full(1).unwrap();
        let target = class.hypothesis(0).unwrap();
        let s = labeled_by(&target, &[0, 0, 0]);
        let learner = ErmWeakLearner::new(class).unwrap();
        let cfg = BoostConfig::new(0.1, 0.5, 1, 0.45, 1, Seed(13));
        assert!(matches!(
            agnostic_boost(&s, &learner, &cfg),
            Err(Error::OddDatasetLength(3))
        ));
    }

    #[test]
    fn sorted_multiset_mode_shrinks_the_pool() {
        let class = TabulatedClass::full(2).unwrap();
        let target = class.hypothesis(1).unwrap();
        let s1 = labeled_by(&target, &[0, 1, 0]);
        let learner = ErmWeakLearner::new(class).unwrap();
        let sched = Schedule {
            rounds: 2,
            repeats: 2,
            combination_size: 2,
            theta: 0.45,
            d_star: 1,
        };
        let tuples = build_pool(
            &s1,
            &learner,
            &sched,
            2,
            Seed(5),
            &Budget::default(),
            SubsampleMode::OrderedTuples,
        )
        .unwrap();
        let multisets = build_pool(
            &s1,
            &learner,
            &sched,
            2,
            Seed(5),
            &Budget::default(),
            SubsampleMode::SortedMultisets,
        )
        .unwrap();
        assert_eq!(tuples.len(), 2 * 2 * 9);
        assert_eq!(multisets.len(), 2 * 2 * 6);
    }
}
