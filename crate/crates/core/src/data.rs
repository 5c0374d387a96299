//! Domain types: labels, points, datasets, and finite distributions.
//!
//! All types here are immutable values after construction and safe to share
//! across threads. Datasets are ordered sequences (duplicates allowed) and
//! indexed from 0; file formats and error messages use 0-based indices too.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::Seed;

/// A binary label, +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub struct Label(i8);

impl Label {
    pub const PLUS: Label = Label(1);
    pub const MINUS: Label = Label(-1);

    pub fn new(value: i8) -> Result<Label> {
        match value {
            1 => Ok(Label::PLUS),
            -1 => Ok(Label::MINUS),
            other => Err(Error::InvalidParameter(format!(
                "label must be +1 or -1, got {other}"
            ))),
        }
    }

    /// sign(x) with the sign(0) = +1 convention.
    pub fn sign_of(x: f64) -> Label {
        if x >= 0.0 {
            Label::PLUS
        } else {
            Label::MINUS
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    pub fn flipped(self) -> Label {
        Label(-self.0)
    }
}

impl TryFrom<i8> for Label {
    type Error = Error;
    fn try_from(value: i8) -> Result<Label> {
        Label::new(value)
    }
}

impl From<Label> for i8 {
    fn from(label: Label) -> i8 {
        label.0
    }
}

/// A point is either an index into a finite domain or a real feature vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Finite(usize),
    Features(Vec<f64>),
}

impl Point {
    pub fn finite_index(&self) -> Option<usize> {
        match self {
            Point::Finite(i) => Some(*i),
            Point::Features(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub point: Point,
    pub label: Label,
}

impl Example {
    pub fn new(point: Point, label: Label) -> Example {
        Example { point, label }
    }
}

/// An ordered training sequence; duplicates are permitted.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    examples: Vec<Example>,
}

impl Dataset {
    pub fn new(examples: Vec<Example>) -> Dataset {
        Dataset { examples }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Example> {
        self.examples.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Example> {
        self.examples.iter()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    /// The subsequence indexed by `indices` (0-based), preserving order and
    /// multiplicity of the index vector.
    pub fn restrict(&self, indices: &[usize]) -> Result<Dataset> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            let example = self.examples.get(i).ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.examples.len(),
            })?;
            out.push(example.clone());
        }
        Ok(Dataset::new(out))
    }

    /// Split into first and second halves; the length must be even.
    pub fn split_halves(&self) -> Result<(Dataset, Dataset)> {
        if !self.examples.len().is_multiple_of(2) {
            return Err(Error::OddDatasetLength(self.examples.len()));
        }
        let mid = self.examples.len() / 2;
        Ok((
            Dataset::new(self.examples[..mid].to_vec()),
            Dataset::new(self.examples[mid..].to_vec()),
        ))
    }
}

impl FromIterator<Example> for Dataset {
    fn from_iter<I: IntoIterator<Item = Example>>(iter: I) -> Dataset {
        Dataset::new(iter.into_iter().collect())
    }
}

pub const DISTRIBUTION_SUM_TOLERANCE: f64 = 1e-12;

/// An explicit probability table over `(point, label)` pairs on a finite
/// domain `{0, .., domain_size-1}`. Enables exact population quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    pub domain_size: usize,
    pub atoms: Vec<Atom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: usize,
    pub y: Label,
    pub p: f64,
}

impl FiniteDistribution {
    pub fn new(domain_size: usize, atoms: Vec<Atom>) -> Result<FiniteDistribution> {
        let mut total = 0.0;
        for atom in &atoms {
            if atom.x >= domain_size {
                return Err(Error::InvalidDistribution(format!(
                    "atom point {} outside domain of size {domain_size}",
                    atom.x
                )));
            }
            if !(0.0..=1.0).contains(&atom.p) {
                return Err(Error::InvalidDistribution(format!(
                    "atom probability {} outside [0, 1]",
                    atom.p
                )));
            }
            total += atom.p;
        }
        if (total - 1.0).abs() > DISTRIBUTION_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "atom probabilities sum to {total}, expected 1"
            )));
        }
        Ok(FiniteDistribution { domain_size, atoms })
    }

    /// `n` i.i.d. draws by seeded inverse-CDF over the atoms.
    pub fn sample(&self, n: usize, seed: Seed) -> Dataset {
        let mut cumulative = Vec::with_capacity(self.atoms.len());
        let mut acc = 0.0;
        for atom in &self.atoms {
            acc += atom.p;
            cumulative.push(acc);
        }
        let mut rng = seed.rng();
        let mut examples = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.gen();
            // Zero-probability atoms are skipped by the strict comparison.
            let idx = cumulative.partition_point(|&c| c <= u);
            let atom = &self.atoms[idx.min(self.atoms.len() - 1)];
            examples.push(Example::new(Point::Finite(atom.x), atom.y));
        }
        Dataset::new(examples)
    }
}

/// Nonnegative weights over the positions of a dataset, summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    weights: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(weights: Vec<f64>) -> Result<EmpiricalDistribution> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        let mut total = 0.0;
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "weight {w} is negative or non-finite"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > DISTRIBUTION_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(EmpiricalDistribution { weights })
    }

    pub fn uniform(n: usize) -> Result<EmpiricalDistribution> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(EmpiricalDistribution {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagged(points: &[usize], labels: &[i8]) -> Dataset {
        points
            .iter()
            .zip(labels)
            .map(|(&x, &y)| Example::new(Point::Finite(x), Label::new(y).unwrap()))
            .collect()
    }

    #[test]
    fn restrict_follows_index_vector() {
        let s = tagged(&[10, 11, 12], &[1, -1, 1]);
        let r = s.restrict(&[2, 0, 0]).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.get(0).unwrap().point, Point::Finite(12));
        assert_eq!(r.get(1).unwrap().point, Point::Finite(10));
        assert_eq!(r.get(2).unwrap().point, Point::Finite(10));
    }

    #[test]
    fn restrict_empty_and_identity() {
        let s = tagged(&[0, 1, 2], &[1, 1, -1]);
        assert!(s.restrict(&[]).unwrap().is_empty());
        let identity: Vec<usize> = (0..s.len()).collect();
        assert_eq!(s.restrict(&identity).unwrap(), s);
    }

    #[test]
    fn restrict_rejects_out_of_range() {
        let s = tagged(&[0], &[1]);
        assert!(matches!(
            s.restrict(&[1]),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn split_requires_even_length() {
        let s = tagged(&[0, 1, 2], &[1, 1, -1]);
        assert!(matches!(s.split_halves(), Err(Error::OddDatasetLength(3))));
        let even = tagged(&[0, 1], &[1, -1]);
        let (a, b) = even.split_halves().unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(b.get(0).unwrap().point, Point::Finite(1));
    }

    #[test]
    fn label_rejects_other_values() {
        assert!(Label::new(0).is_err());
        assert!(Label::new(2).is_err());
        assert_eq!(Label::sign_of(0.0), Label::PLUS);
        assert_eq!(Label::sign_of(-1e-300), Label::MINUS);
    }

    #[test]
    fn distribution_validates_mass() {
        let atoms = vec![
            Atom { x: 0, y: Label::PLUS, p: 0.5 },
            Atom { x: 1, y: Label::MINUS, p: 0.4 },
        ];
        assert!(FiniteDistribution::new(2, atoms).is_err());
    }

    #[test]
    fn point_mass_sampling_is_constant() {
        let d = FiniteDistribution::new(
            3,
            vec![
                Atom { x: 2, y: Label::MINUS, p: 1.0 },
                Atom { x: 0, y: Label::PLUS, p: 0.0 },
            ],
        )
        .unwrap();
        let s = d.sample(50, Seed(3));
        assert!(s
            .iter()
            .all(|e| e.point == Point::Finite(2) && e.label == Label::MINUS));
    }

    #[test]
    fn sampling_replays_per_seed() {
        let d = FiniteDistribution::new(
            2,
            vec![
                Atom { x: 0, y: Label::PLUS, p: 0.3 },
                Atom { x: 1, y: Label::MINUS, p: 0.7 },
            ],
        )
        .unwrap();
        assert_eq!(d.sample(64, Seed(9)), d.sample(64, Seed(9)));
        assert_ne!(d.sample(64, Seed(9)), d.sample(64, Seed(10)));
    }

    #[test]
    fn empirical_distribution_checks() {
        assert!(EmpiricalDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(EmpiricalDistribution::new(vec![0.6, 0.5]).is_err());
        assert!(EmpiricalDistribution::new(vec![-0.1, 1.1]).is_err());
        let u = EmpiricalDistribution::uniform(4).unwrap();
        assert_eq!(u.weights(), &[0.25; 4]);
    }
}
