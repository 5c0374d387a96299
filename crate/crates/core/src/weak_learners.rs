//! Pluggable weak learners.
//!
//! A weak learner is a deterministic function of `(sample, seed)` returning a
//! hypothesis from its declared base class. The sample is an ordered sequence,
//! so learners may be order-sensitive; the two exhaustive learners here are
//! not, and say so, which lets the booster collapse order-equivalent
//! subsamples when asked to.

use rand::Rng;

use crate::data::{Dataset, FiniteDistribution, Point};
use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::metrics::population_corr;
use crate::seed::Seed;
use crate::vc::TabulatedClass;

/// The quadruple describing a weak-learning guarantee: with probability at
/// least `1 - delta0` over an m0-sample, the returned hypothesis has
/// correlation at least `gamma0 * sup_f corr(f) - eps0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakLearnerParams {
    pub gamma0: f64,
    pub eps0: f64,
    pub delta0: f64,
    pub m0: usize,
}

impl WeakLearnerParams {
    pub fn new(gamma0: f64, eps0: f64, delta0: f64, m0: usize) -> Result<WeakLearnerParams> {
        if !(gamma0 > 0.0 && gamma0 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 must be in (0, 1], got {gamma0}"
            )));
        }
        if !(0.0..1.0).contains(&eps0) {
            return Err(Error::InvalidParameter(format!(
                "eps0 must be in [0, 1), got {eps0}"
            )));
        }
        if gamma0 <= eps0 {
            return Err(Error::InvalidParameter(format!(
                "need gamma0 > eps0 for a non-trivial learner, got {gamma0} <= {eps0}"
            )));
        }
        if !(delta0 > 0.0 && delta0 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta0 must be in (0, 1), got {delta0}"
            )));
        }
        if m0 == 0 {
            return Err(Error::InvalidParameter("m0 must be positive".into()));
        }
        Ok(WeakLearnerParams {
            gamma0,
            eps0,
            delta0,
            m0,
        })
    }

    /// The boosting margin `(gamma0 - eps0) / 2`.
    pub fn theta(&self) -> f64 {
        (self.gamma0 - self.eps0) / 2.0
    }
}

pub trait WeakLearner: Send + Sync {
    /// Deterministic in `(sample, seed)`.
    fn call(&self, sample: &Dataset, seed: Seed) -> Result<Hypothesis>;

    fn describe(&self) -> String;

    /// True when the returned hypothesis cannot depend on sample order.
    fn order_insensitive(&self) -> bool {
        false
    }
}

/// Exact empirical risk minimization over a finite tabulated class; ties go
/// to the lowest class index and the seed is ignored.
pub struct ErmWeakLearner {
    class: TabulatedClass,
}

impl ErmWeakLearner {
    pub fn new(class: TabulatedClass) -> Result<ErmWeakLearner> {
        if class.is_empty() {
            return Err(Error::EmptyClass);
        }
        Ok(ErmWeakLearner { class })
    }

    pub fn class(&self) -> &TabulatedClass {
        &self.class
    }
}

impl WeakLearner for ErmWeakLearner {
    fn call(&self, sample: &Dataset, _seed: Seed) -> Result<Hypothesis> {
        if sample.is_empty() {
            return Err(Error::EmptyDataset);
        }
        // Compare by integer agreement counts; corr = (2 agree - m) / m.
        let mut best: Option<(i64, usize)> = None;
        for (idx, row) in self.class.rows().iter().enumerate() {
            let mut agree = 0i64;
            for e in sample.iter() {
                let x = e.point.finite_index().ok_or_else(|| {
                    Error::RepresentationMismatch(
                        "tabulated ERM needs finite-domain points".into(),
                    )
                })?;
                let v = *row.get(x).ok_or(Error::IndexOutOfRange {
                    index: x,
                    len: row.len(),
                })?;
                if v == e.label.value() {
                    agree += 1;
                }
            }
            if best.is_none_or(|(best_agree, _)| agree > best_agree) {
                best = Some((agree, idx));
            }
        }
        let (_, idx) = best.expect("nonempty class");
        self.class.hypothesis(idx)
    }

    fn describe(&self) -> String {
        format!("erm over {} tabulated hypotheses", self.class.len())
    }

    fn order_insensitive(&self) -> bool {
        true
    }
}

/// Exhaustive decision-stump search over all (feature, midpoint threshold,
/// polarity) candidates, with -inf/+inf sentinel thresholds. Ties go to the
/// lexicographically smallest (feature, threshold, polarity).
pub struct StumpWeakLearner;

impl StumpWeakLearner {
    /// The candidate threshold grid for one feature's observed values.
    pub fn candidate_thresholds(mut values: Vec<f64>) -> Vec<f64> {
        values.sort_by(|a, b| a.total_cmp(b));
        values.dedup();
        let mut out = vec![f64::NEG_INFINITY];
        for pair in values.windows(2) {
            out.push((pair[0] + pair[1]) / 2.0);
        }
        out.push(f64::INFINITY);
        out
    }
}

impl WeakLearner for StumpWeakLearner {
    fn call(&self, sample: &Dataset, _seed: Seed) -> Result<Hypothesis> {
        if sample.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let dim = match &sample.get(0).unwrap().point {
            Point::Features(fs) => fs.len(),
            Point::Finite(_) => {
                return Err(Error::RepresentationMismatch(
                    "stump learner needs feature-vector points".into(),
                ))
            }
        };
        if dim == 0 {
            return Err(Error::InvalidParameter("points have no features".into()));
        }

        let mut best: Option<(i64, usize, f64, i8)> = None;
        for feature in 0..dim {
            let mut values = Vec::with_capacity(sample.len());
            for e in sample.iter() {
                match &e.point {
                    Point::Features(fs) => {
                        values.push(*fs.get(feature).ok_or(Error::IndexOutOfRange {
                            index: feature,
                            len: fs.len(),
                        })?);
                    }
                    Point::Finite(_) => {
                        return Err(Error::RepresentationMismatch(
                            "mixed point representations in sample".into(),
                        ))
                    }
                }
            }
            for &threshold in &Self::candidate_thresholds(values.clone()) {
                for polarity in [-1i8, 1] {
                    let mut agree = 0i64;
                    for (e, &v) in sample.iter().zip(&values) {
                        let sign: i8 = if v - threshold >= 0.0 { 1 } else { -1 };
                        let pred = sign * polarity;
                        if pred == e.label.value() {
                            agree += 1;
                        }
                    }
                    // Candidates are visited in (feature, threshold, polarity)
                    // order, so a strict improvement keeps the lex-smallest.
                    if best.is_none_or(|(b, ..)| agree > b) {
                        best = Some((agree, feature, threshold, polarity));
                    }
                }
            }
        }
        let (_, feature, threshold, polarity) = best.expect("nonempty candidate grid");
        Hypothesis::stump(feature, threshold, polarity)
    }

    fn describe(&self) -> String {
        "exhaustive threshold stumps".into()
    }

    fn order_insensitive(&self) -> bool {
        true
    }
}

/// Wraps a learner and, with probability `delta0` under the seed stream,
/// returns a fixed bad hypothesis instead. Exercises the repeat-amplification
/// of the booster's inner loop.
pub struct FaultyWeakLearner {
    inner: Box<dyn WeakLearner>,
    delta0: f64,
    bad: Hypothesis,
}

impl FaultyWeakLearner {
    pub fn new(
        inner: Box<dyn WeakLearner>,
        delta0: f64,
        bad: Hypothesis,
    ) -> Result<FaultyWeakLearner> {
        if !(0.0..=1.0).contains(&delta0) {
            return Err(Error::InvalidParameter(format!(
                "failure rate must be in [0, 1], got {delta0}"
            )));
        }
        Ok(FaultyWeakLearner { inner, delta0, bad })
    }
}

impl WeakLearner for FaultyWeakLearner {
    fn call(&self, sample: &Dataset, seed: Seed) -> Result<Hypothesis> {
        let coin: f64 = seed.derive(&[u64::from(b'f')]).rng().gen();
        if coin < self.delta0 {
            Ok(self.bad.clone())
        } else {
            self.inner.call(sample, seed)
        }
    }

    fn describe(&self) -> String {
        format!(
            "{} failing with rate {}",
            self.inner.describe(),
            self.delta0
        )
    }

    fn order_insensitive(&self) -> bool {
        self.inner.order_insensitive()
    }
}

/// Monte Carlo check of the weak-learning guarantee: draw `trials` samples of
/// size `m0` from `d`, and return the fraction where the learner's population
/// correlation falls below `gamma0 * sup_f corr(f) - eps0`. The supremum is
/// computed exactly by enumerating the finite reference class.
pub fn check_weak_guarantee(
    learner: &dyn WeakLearner,
    reference: &TabulatedClass,
    d: &FiniteDistribution,
    params: &WeakLearnerParams,
    trials: usize,
    seed: Seed,
) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::EmptyClass);
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let mut sup = f64::NEG_INFINITY;
    for i in 0..reference.len() {
        sup = sup.max(population_corr(d, &reference.hypothesis(i)?)?);
    }
    let threshold = params.gamma0 * sup - params.eps0;

    let mut failures = 0usize;
    for trial in 0..trials {
        let sample = d.sample(params.m0, seed.derive(&[trial as u64, 0]));
        let w = learner.call(&sample, seed.derive(&[trial as u64, 1]))?;
        if population_corr(d, &w)? < threshold {
            failures += 1;
        }
    }
    Ok(failures as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Atom, Example, Label};

    fn finite_sample(pairs: &[(usize, i8)]) -> Dataset {
        pairs
            .iter()
            .map(|&(x, y)| Example::new(Point::Finite(x), Label::new(y).unwrap()))
            .collect()
    }

    fn feature_sample(pairs: &[(&[f64], i8)]) -> Dataset {
        pairs
            .iter()
            .map(|&(fs, y)| Example::new(Point::Features(fs.to_vec()), Label::new(y).unwrap()))
            .collect()
    }

    #[test]
    fn erm_recovers_the_labeling_hypothesis() {
        let class = TabulatedClass::full(3).unwrap();
        let target = class.hypothesis(3).unwrap();
        let sample: Dataset = (0..3)
            .map(|x| {
                Example::new(
                    Point::Finite(x),
                    target.evaluate(&Point::Finite(x)).unwrap(),
                )
            })
            .collect();
        let chosen = ErmWeakLearner::new(class)
            .unwrap()
            .call(&sample, Seed(0))
            .unwrap();
        assert_eq!(chosen, target);
        assert_eq!(
            crate::metrics::empirical_corr(&sample, &chosen).unwrap(),
            1.0
        );
    }

    #[test]
    fn erm_single_example_prefers_low_index() {
        let class = TabulatedClass::new(1, vec![vec![1], vec![-1]]).unwrap();
        let learner = ErmWeakLearner::new(class).unwrap();
        let chosen = learner
            .call(&finite_sample(&[(0, 1)]), Seed(0))
            .unwrap();
        assert_eq!(chosen, Hypothesis::tabulated(vec![1]).unwrap());
    }

    #[test]
    fn erm_breaks_ties_by_class_index() {
        // Indices 2 and 5 both agree with the sample; 0 and 1 do not.
        let rows = vec![
            vec![-1, -1],
            vec![-1, 1],
            vec![1, 1],
            vec![-1, -1],
            vec![1, -1],
            vec![1, 1],
        ];
        let class = TabulatedClass::new(2, rows).unwrap();
        let learner = ErmWeakLearner::new(class).unwrap();
        let chosen = learner
            .call(&finite_sample(&[(0, 1), (1, 1)]), Seed(9))
            .unwrap();
        assert_eq!(chosen, Hypothesis::tabulated(vec![1, 1]).unwrap());
    }

    #[test]
    fn stump_separates_two_points() {
        let learner = StumpWeakLearner;
        let sample = feature_sample(&[(&[0.0], -1), (&[1.0], 1)]);
        let chosen = learner.call(&sample, Seed(0)).unwrap();
        assert_eq!(chosen, Hypothesis::stump(0, 0.5, 1).unwrap());
        assert_eq!(
            crate::metrics::empirical_corr(&sample, &chosen).unwrap(),
            1.0
        );
    }

    #[test]
    fn stump_all_positive_returns_lex_smallest_constant() {
        let learner = StumpWeakLearner;
        let sample = feature_sample(&[(&[3.0, 0.0], 1), (&[5.0, 2.0], 1)]);
        let chosen = learner.call(&sample, Seed(0)).unwrap();
        assert_eq!(chosen, Hypothesis::stump(0, f64::NEG_INFINITY, 1).unwrap());
        assert_eq!(
            crate::metrics::empirical_corr(&sample, &chosen).unwrap(),
            1.0
        );
    }

    #[test]
    fn stump_on_alternating_data_gets_half_correlation() {
        let learner = StumpWeakLearner;
        let sample = feature_sample(&[(&[0.0], 1), (&[1.0], -1), (&[2.0], 1), (&[3.0], -1)]);
        let chosen = learner.call(&sample, Seed(0)).unwrap();
        let corr = crate::metrics::empirical_corr(&sample, &chosen).unwrap();
        assert_eq!(corr, 0.5);
    }

    #[test]
    fn faulty_rates_zero_and_one() {
        let class = TabulatedClass::full(2).unwrap();
        let bad = Hypothesis::tabulated(vec![-1, -1]).unwrap();
        let sample = finite_sample(&[(0, 1), (1, 1)]);

        let inner = Box::new(ErmWeakLearner::new(class.clone()).unwrap());
        let never = FaultyWeakLearner::new(inner, 0.0, bad.clone()).unwrap();
        let inner2 = Box::new(ErmWeakLearner::new(class).unwrap());
        let always = FaultyWeakLearner::new(inner2, 1.0, bad.clone()).unwrap();

        for k in 0..20 {
            let seed = Seed(k);
            assert_ne!(never.call(&sample, seed).unwrap(), bad);
            assert_eq!(always.call(&sample, seed).unwrap(), bad);
        }
    }

    #[test]
    fn faulty_rate_half_over_many_seeds() {
        let class = TabulatedClass::full(1).unwrap();
        let bad = Hypothesis::tabulated(vec![-1]).unwrap();
        let inner = Box::new(ErmWeakLearner::new(class).unwrap());
        let learner = FaultyWeakLearner::new(inner, 0.5, bad.clone()).unwrap();
        let sample = finite_sample(&[(0, 1)]);
        let root = Seed(2024);
        let mut bad_count = 0usize;
        for k in 0..10_000u64 {
            if learner.call(&sample, root.derive(&[k])).unwrap() == bad {
                bad_count += 1;
            }
        }
        let fraction = bad_count as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&fraction), "fraction {fraction}");
    }

    #[test]
    fn calls_replay_deterministically() {
        let class = TabulatedClass::full(2).unwrap();
        let bad = Hypothesis::tabulated(vec![1, -1]).unwrap();
        let learner = FaultyWeakLearner::new(
            Box::new(ErmWeakLearner::new(class).unwrap()),
            0.3,
            bad,
        )
        .unwrap();
        let sample = finite_sample(&[(0, -1), (1, 1)]);
        for k in 0..50 {
            let seed = Seed(k);
            assert_eq!(
                learner.call(&sample, seed).unwrap(),
                learner.call(&sample, seed).unwrap()
            );
        }
    }

    #[test]
    fn guarantee_holds_for_a_point_mass() {
        let class = TabulatedClass::full(1).unwrap();
        let d = FiniteDistribution::new(
            1,
            vec![Atom { x: 0, y: Label::PLUS, p: 1.0 }],
        )
        .unwrap();
        let learner = ErmWeakLearner::new(class.clone()).unwrap();
        let params = WeakLearnerParams::new(1.0, 0.1, 0.5, 3).unwrap();
        let rate = check_weak_guarantee(&learner, &class, &d, &params, 200, Seed(5)).unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn guarantee_fails_for_a_constant_wrong_learner() {
        struct Stubborn(Hypothesis);
        impl WeakLearner for Stubborn {
            fn call(&self, _: &Dataset, _: Seed) -> Result<Hypothesis> {
                Ok(self.0.clone())
            }
            fn describe(&self) -> String {
                "constant".into()
            }
        }
        let class = TabulatedClass::full(1).unwrap();
        let d = FiniteDistribution::new(
            1,
            vec![Atom { x: 0, y: Label::PLUS, p: 1.0 }],
        )
        .unwrap();
        let wrong = Stubborn(Hypothesis::tabulated(vec![-1]).unwrap());
        let params = WeakLearnerParams::new(1.0, 0.1, 0.5, 3).unwrap();
        let rate = check_weak_guarantee(&wrong, &class, &d, &params, 100, Seed(5)).unwrap();
        assert_eq!(rate, 1.0);
    }
}
