//! Equal-weight margin boosting.
//!
//! Rounds are driven by a provider callback rather than a weak learner: each
//! round must hand back a hypothesis with weighted error at most `1/2 - theta`
//! under the current distribution (checked, tolerance 1e-12), the weights are
//! reweighted exponentially with the fixed factor `alpha(theta)`, and the
//! output is the plain average of the received hypotheses. After
//! `ceil(ln(2n)/theta^2)` successful rounds the average has zero margin loss
//! at level `theta/2` on the whole input.
//!
//! `simulate_within_pool` drives the same loop with per-round argmin over a
//! hypothesis pool, reporting the first round (if any) where the pool has
//! nothing meeting the edge.

use serde::{Deserialize, Serialize};

use crate::booster::HypothesisPool;
use crate::data::{Dataset, EmpiricalDistribution};
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, VotingClassifier};
use crate::metrics::{margin_loss, weighted_err, MARGIN_TOLERANCE};

/// The reweighting factor `1/2 ln((1/2 + theta) / (1/2 - theta))`.
pub fn alpha(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "theta must be in (0, 1/2), got {theta}"
        )));
    }
    Ok(0.5 * ((0.5 + theta) / (0.5 - theta)).ln())
}

/// Rounds needed for the zero-margin-loss guarantee: `ceil(ln(2n)/theta^2)`.
pub fn required_rounds(n: usize, theta: f64) -> u64 {
    ((2.0 * n as f64).ln() / (theta * theta)).ceil() as u64
}

/// The bound every per-round normalizer satisfies when the edge condition
/// holds: `2 sqrt((1/2 - theta)(1/2 + theta))`.
pub fn z_bound(theta: f64) -> f64 {
    2.0 * ((0.5 - theta) * (0.5 + theta)).sqrt()
}

/// One round's exponential reweighting. Returns the next distribution
/// (renormalized to stop floating-point drift) and the normalizer
/// `Z = sum_i D_i exp(-alpha y_i h(x_i))`.
pub fn update_distribution(
    d: &EmpiricalDistribution,
    h: &Hypothesis,
    s: &Dataset,
    alpha: f64,
) -> Result<(EmpiricalDistribution, f64)> {
    if d.len() != s.len() {
        return Err(Error::InvalidDistribution(format!(
            "{} weights for {} examples",
            d.len(),
            s.len()
        )));
    }
    let mut updated = Vec::with_capacity(d.len());
    let mut z = 0.0;
    for (e, &w) in s.iter().zip(d.weights()) {
        let margin = e.label.as_f64() * h.evaluate(&e.point)?.as_f64();
        let factor = (-alpha * margin).exp();
        if !factor.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite reweighting factor exp({})",
                -alpha * margin
            )));
        }
        let weight = w * factor;
        z += weight;
        updated.push(weight);
    }
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "normalizer {z} is not positive and finite"
        )));
    }
    for w in &mut updated {
        *w /= z;
    }
    let total: f64 = updated.iter().sum();
    for w in &mut updated {
        *w /= total;
    }
    Ok((EmpiricalDistribution::new(updated)?, z))
}

/// One completed round of the loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostRound {
    pub hypothesis: Hypothesis,
    pub alpha: f64,
    pub z: f64,
    pub weighted_err: f64,
    pub distribution_after: EmpiricalDistribution,
}

#[derive(Clone, Debug)]
pub struct MarginBoostRun {
    pub voter: VotingClassifier,
    pub rounds: Vec<BoostRound>,
    /// Margin loss of the final average at level theta/2 on the input.
    pub margin_loss_half_theta: f64,
    /// Whether the round count met `ceil(ln(2n)/theta^2)`, i.e. whether the
    /// zero-loss guarantee applies.
    pub meets_round_bound: bool,
}

/// Run `rounds` rounds, pulling each hypothesis from `provider(round, D_r)`.
/// A provider answer with weighted error above `1/2 - theta` is a typed error
/// naming the round (1-based) and the achieved error.
pub fn run(
    s: &Dataset,
    theta: f64,
    rounds: usize,
    mut provider: impl FnMut(usize, &EmpiricalDistribution) -> Result<Hypothesis>,
) -> Result<MarginBoostRun> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if rounds == 0 {
        return Err(Error::InvalidParameter("need at least one round".into()));
    }
    let a = alpha(theta)?;
    let limit = 0.5 - theta;
    let mut dist = EmpiricalDistribution::uniform(s.len())?;
    let mut trace = Vec::with_capacity(rounds);
    let mut members = Vec::with_capacity(rounds);

    for round in 1..=rounds {
        let h = provider(round, &dist)?;
        let err = weighted_err(s, &dist, &h)?;
        if err > limit + MARGIN_TOLERANCE {
            return Err(Error::EdgeViolation {
                round,
                achieved: err,
                limit,
            });
        }
        let (next, z) = update_distribution(&dist, &h, s, a)?;
        trace.push(BoostRound {
            hypothesis: h.clone(),
            alpha: a,
            z,
            weighted_err: err,
            distribution_after: next.clone(),
        });
        members.push(h);
        dist = next;
    }

    let voter = VotingClassifier::new(members)?;
    let margin_loss_half_theta = margin_loss(s, &voter, theta / 2.0)?;
    Ok(MarginBoostRun {
        voter,
        rounds: trace,
        margin_loss_half_theta,
        meets_round_bound: rounds as u64 >= required_rounds(s.len(), theta),
    })
}

/// Outcome of driving the loop with per-round argmin over a pool.
#[derive(Clone, Debug)]
pub struct PoolSimulation {
    pub success: bool,
    /// The voter, when every round found a hypothesis meeting the edge.
    pub voter: Option<VotingClassifier>,
    /// 1-based round where the pool failed the edge condition, if any.
    pub failing_round: Option<usize>,
    pub rounds: Vec<BoostRound>,
}

/// At each round pick the pool hypothesis with the smallest weighted error
/// (ties to the lowest pool index); fail, without erroring, as soon as the
/// best available error exceeds `1/2 - theta`.
pub fn simulate_within_pool(
    s_target: &Dataset,
    theta: f64,
    rounds: usize,
    pool: &HypothesisPool,
) -> Result<PoolSimulation> {
    if pool.is_empty() {
        return Err(Error::EmptyClass);
    }
    if s_target.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let a = alpha(theta)?;
    let limit = 0.5 - theta;
    let mut dist = EmpiricalDistribution::uniform(s_target.len())?;
    let mut trace = Vec::new();
    let mut members = Vec::new();

    for round in 1..=rounds {
        let mut best: Option<(f64, usize)> = None;
        for (i, entry) in pool.entries.iter().enumerate() {
            let err = weighted_err(s_target, &dist, &entry.hypothesis)?;
            if best.is_none_or(|(b, _)| err < b) {
                best = Some((err, i));
            }
        }
        let (err, index) = best.expect("nonempty pool");
        if err > limit + MARGIN_TOLERANCE {
            return Ok(PoolSimulation {
                success: false,
                voter: None,
                failing_round: Some(round),
                rounds: trace,
            });
        }
        let h = pool.entries[index].hypothesis.clone();
        let (next, z) = update_distribution(&dist, &h, s_target, a)?;
        trace.push(BoostRound {
            hypothesis: h.clone(),
            alpha: a,
            z,
            weighted_err: err,
            distribution_after: next.clone(),
        });
        members.push(h);
        dist = next;
    }

    Ok(PoolSimulation {
        success: true,
        voter: Some(VotingClassifier::new(members)?),
        failing_round: None,
        rounds: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::booster::{DedupMode, PooledHypothesis};
    use crate::data::{Example, Label, Point};
    use crate::seed::Seed;
    use crate::vc::TabulatedClass;

    fn plus_dataset(n: usize) -> Dataset {
        (0..n)
            .map(|i| Example::new(Point::Finite(i), Label::PLUS))
            .collect()
    }

    #[test]
    fn alpha_closed_forms() {
        assert!((alpha(0.3).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((alpha(0.25).unwrap() - 0.5 * 3.0f64.ln()).abs() < 1e-15);
        let tiny = alpha(1e-9).unwrap();
        assert!((tiny / 2e-9 - 1.0).abs() < 1e-6);
        assert!(alpha(0.5).is_err());
        assert!(alpha(0.0).is_err());
    }

    #[test]
    fn correct_everywhere_leaves_the_distribution_alone() {
        let s = plus_dataset(3);
        let h = Hypothesis::tabulated(vec![1, 1, 1]).unwrap();
        let d = EmpiricalDistribution::uniform(3).unwrap();
        let a = alpha(0.3).unwrap();
        let (next, z) = update_distribution(&d, &h, &s, a).unwrap();
        assert!((z - (-a).exp()).abs() < 1e-15);
        for (&w, &v) in next.weights().iter().zip(d.weights()) {
            assert!((w - v).abs() < 1e-15);
        }
    }

    #[test]
    fn half_right_update_by_hand() {
        // n = 2 uniform, h correct on example 0 only, alpha = ln 2: the
        // factors are (1/2, 2), so Z = 1/4 + 1 and the new weights are
        // (0.2, 0.8).
        let s: Dataset = vec![
            Example::new(Point::Finite(0), Label::PLUS),
            Example::new(Point::Finite(1), Label::MINUS),
        ]
        .into_iter()
        .collect();
        let h = Hypothesis::tabulated(vec![1, 1]).unwrap();
        let d = EmpiricalDistribution::uniform(2).unwrap();
        let (next, z) = update_distribution(&d, &h, &s, std::f64::consts::LN_2).unwrap();
        assert!((z - 1.25).abs() < 1e-15);
        assert!((next.weights()[0] - 0.2).abs() < 1e-15);
        assert!((next.weights()[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn z_meets_its_bound_with_equality_at_the_edge() {
        // err exactly 1/2 - theta under uniform weights.
        let theta = 0.25f64;
        let s = plus_dataset(4);
        let h = Hypothesis::tabulated(vec![-1, 1, 1, 1]).unwrap();
        let d = EmpiricalDistribution::uniform(4).unwrap();
        let (_, z) = update_distribution(&d, &h, &s, alpha(theta).unwrap()).unwrap();
        assert!((z - z_bound(theta)).abs() < 1e-12);
        assert!((z_bound(theta) - 0.866025403784438).abs() < 1e-12);
    }

    #[test]
    fn single_example_boosting_is_immediate() {
        let s = plus_dataset(1);
        let correct = Hypothesis::tabulated(vec![1]).unwrap();
        let rounds = required_rounds(1, 0.4);
        assert_eq!(rounds, 5);
        let run = run(&s, 0.4, rounds as usize, |_, _| Ok(correct.clone())).unwrap();
        assert_eq!(run.margin_loss_half_theta, 0.0);
        assert!(run.meets_round_bound);
    }

    #[test]
    fn theta_half_is_rejected() {
        let s = plus_dataset(4);
        let correct = Hypothesis::tabulated(vec![1, 1, 1, 1]).unwrap();
        assert!(run(&s, 0.5, 4, |_, _| Ok(correct.clone())).is_err());
    }

    #[test]
    fn edge_violation_names_the_round() {
        let s = plus_dataset(2);
        let wrong = Hypothesis::tabulated(vec![-1, -1]).unwrap();
        match run(&s, 0.3, 3, |_, _| Ok(wrong.clone())) {
            Err(Error::EdgeViolation { round: 1, achieved, .. }) => {
                assert!((achieved - 1.0).abs() < 1e-15);
            }
            other => panic!("expected edge violation, got {other:?}"),
        }
    }

    #[test]
    fn exhaustive_provider_reaches_zero_margin_loss() {
        let class = TabulatedClass::full(2).unwrap();
        let target = class.hypothesis(2).unwrap();
        let s: Dataset = [0, 1, 0, 1]
            .iter()
            .map(|&x| {
                Example::new(
                    Point::Finite(x),
                    target.evaluate(&Point::Finite(x)).unwrap(),
                )
            })
            .collect();
        let theta = 0.45;
        let rounds = required_rounds(s.len(), theta);
        assert_eq!(rounds, 11);
        let outcome = run(&s, theta, rounds as usize, |_, dist| {
            let mut best: Option<(f64, usize)> = None;
            for i in 0..class.len() {
                let h = class.hypothesis(i)?;
                let err = weighted_err(&s, dist, &h)?;
                if best.is_none_or(|(b, _)| err < b) {
                    best = Some((err, i));
                }
            }
            class.hypothesis(best.unwrap().1)
        })
        .unwrap();
        assert_eq!(outcome.margin_loss_half_theta, 0.0);
        for round in &outcome.rounds {
            assert!(round.z <= z_bound(theta) + 1e-12);
            let total: f64 = round.distribution_after.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    fn pool_of(rows: &[Vec<i8>]) -> HypothesisPool {
        HypothesisPool {
            entries: rows
                .iter()
                .map(|row| PooledHypothesis {
                    hypothesis: Hypothesis::tabulated(row.clone()).unwrap(),
                    round: 1,
                    repeat: 1,
                    subsample: vec![0],
                    seed: Seed(0),
                })
                .collect(),
            dedup: DedupMode::Off,
        }
    }

    #[test]
    fn pool_with_the_exact_labeling_succeeds() {
        let s = plus_dataset(4);
        let pool = pool_of(&[vec![-1, -1, -1, -1], vec![1, 1, 1, 1]]);
        let theta = 0.3;
        let rounds = required_rounds(4, theta) as usize;
        let sim = simulate_within_pool(&s, theta, rounds, &pool).unwrap();
        assert!(sim.success);
        let voter = sim.voter.unwrap();
        assert_eq!(margin_loss(&s, &voter, theta / 2.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_pool_fails_on_mixed_labels() {
        let s: Dataset = vec![
            Example::new(Point::Finite(0), Label::PLUS),
            Example::new(Point::Finite(1), Label::MINUS),
        ]
        .into_iter()
        .collect();
        let pool = pool_of(&[vec![1, 1]]);
        let sim = simulate_within_pool(&s, 0.1, 5, &pool).unwrap();
        assert!(!sim.success);
        assert_eq!(sim.failing_round, Some(1));
        assert!(sim.voter.is_none());
    }
}
