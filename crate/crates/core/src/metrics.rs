//! Loss, correlation, and margin primitives.
//!
//! Empirical quantities are exact rationals (mistake counts over n), and
//! correlation is computed as the exact complement `1 - 2 err` so the
//! identity holds bit-for-bit. Margin comparisons are inclusive (`<=`) with
//! an absolute tolerance of 1e-12, guarding parametric backends; averages of
//! +-1 values are exact dyadic rationals anyway.

use crate::data::{Dataset, EmpiricalDistribution, FiniteDistribution, Label, Point};
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, VotingClassifier, WeightedVoter};

pub const MARGIN_TOLERANCE: f64 = 1e-12;

/// Anything that labels points.
pub trait Classifier {
    fn classify(&self, x: &Point) -> Result<Label>;
}

/// Anything producing a real-valued vote; margins are `y * score(x)`.
pub trait Scorer {
    fn score(&self, x: &Point) -> Result<f64>;
}

impl Classifier for Hypothesis {
    fn classify(&self, x: &Point) -> Result<Label> {
        self.evaluate(x)
    }
}

impl Classifier for VotingClassifier {
    fn classify(&self, x: &Point) -> Result<Label> {
        Ok(self.evaluate(x)?.0)
    }
}

impl Scorer for Hypothesis {
    fn score(&self, x: &Point) -> Result<f64> {
        Ok(self.evaluate(x)?.as_f64())
    }
}

impl Scorer for VotingClassifier {
    fn score(&self, x: &Point) -> Result<f64> {
        Ok(self.evaluate(x)?.1)
    }
}

impl Scorer for WeightedVoter {
    fn score(&self, x: &Point) -> Result<f64> {
        self.raw_value(x)
    }
}

impl<T: Classifier + ?Sized> Classifier for &T {
    fn classify(&self, x: &Point) -> Result<Label> {
        (**self).classify(x)
    }
}

impl<T: Scorer + ?Sized> Scorer for &T {
    fn score(&self, x: &Point) -> Result<f64> {
        (**self).score(x)
    }
}

/// Empirical misclassification rate, `(# mistakes) / n`.
pub fn empirical_err<C: Classifier + ?Sized>(s: &Dataset, g: &C) -> Result<f64> {
    Ok(empirical_mistakes(s, g)? as f64 / s.len() as f64)
}

/// The integer mistake count behind `empirical_err`.
pub fn empirical_mistakes<C: Classifier + ?Sized>(s: &Dataset, g: &C) -> Result<u64> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut mistakes = 0u64;
    for e in s.iter() {
        if g.classify(&e.point)? != e.label {
            mistakes += 1;
        }
    }
    Ok(mistakes)
}

/// Exact misclassification mass under a finite distribution.
pub fn population_err<C: Classifier + ?Sized>(d: &FiniteDistribution, g: &C) -> Result<f64> {
    let mut mass = 0.0;
    for atom in &d.atoms {
        if g.classify(&Point::Finite(atom.x))? != atom.y {
            mass += atom.p;
        }
    }
    Ok(mass)
}

/// `E[y g(x)]` over a dataset; equals `1 - 2 err` exactly.
pub fn empirical_corr<C: Classifier + ?Sized>(s: &Dataset, g: &C) -> Result<f64> {
    Ok(1.0 - 2.0 * empirical_err(s, g)?)
}

/// `E[y g(x)]` under a finite distribution; equals `1 - 2 err` exactly.
pub fn population_corr<C: Classifier + ?Sized>(d: &FiniteDistribution, g: &C) -> Result<f64> {
    Ok(1.0 - 2.0 * population_err(d, g)?)
}

/// Misclassification mass under reweighted dataset positions.
pub fn weighted_err<C: Classifier + ?Sized>(
    s: &Dataset,
    weights: &EmpiricalDistribution,
    g: &C,
) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if weights.len() != s.len() {
        return Err(Error::InvalidDistribution(format!(
            "{} weights for {} examples",
            weights.len(),
            s.len()
        )));
    }
    let mut mass = 0.0;
    for (e, &w) in s.iter().zip(weights.weights()) {
        if g.classify(&e.point)? != e.label {
            mass += w;
        }
    }
    Ok(mass)
}

/// Fraction of examples with margin `y g(x) <= lambda` (inclusive, with
/// absolute tolerance 1e-12).
pub fn margin_loss<G: Scorer + ?Sized>(s: &Dataset, g: &G, lambda: f64) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "margin level must be nonnegative, got {lambda}"
        )));
    }
    let mut hits = 0usize;
    for e in s.iter() {
        let margin = e.label.as_f64() * g.score(&e.point)?;
        if margin <= lambda + MARGIN_TOLERANCE {
            hits += 1;
        }
    }
    Ok(hits as f64 / s.len() as f64)
}

/// Distinct margin values `y g(x)` with multiplicities, ascending.
pub fn margin_histogram<G: Scorer + ?Sized>(s: &Dataset, g: &G) -> Result<Vec<(f64, usize)>> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut margins = Vec::with_capacity(s.len());
    for e in s.iter() {
        margins.push(e.label.as_f64() * g.score(&e.point)?);
    }
    margins.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for m in margins {
        match out.last_mut() {
            Some((v, c)) if *v == m => *c += 1,
            _ => out.push((m, 1)),
        }
    }
    Ok(out)
}
