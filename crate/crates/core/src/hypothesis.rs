//! Hypothesis backends and voting classifiers.
//!
//! Two backends: a tabulated value vector over a finite domain (required for
//! exact VC computations and exact population error) and a threshold stump
//! over real feature vectors. A class is a homogeneous list of one backend.

use serde::{Deserialize, Serialize};

use crate::data::{Label, Point};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// Explicit value vector over a finite domain; entry `i` is h(i).
    Tabulated { values: Vec<i8> },
    /// `polarity * sign(x[feature] - threshold)` with sign(0) = +1.
    Stump {
        feature: usize,
        #[serde(with = "stump_threshold")]
        threshold: f64,
        polarity: i8,
    },
}

impl Hypothesis {
    pub fn tabulated(values: Vec<i8>) -> Result<Hypothesis> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty value table".into()));
        }
        for &v in &values {
            if v != 1 && v != -1 {
                return Err(Error::InvalidParameter(format!(
                    "table entries must be +1 or -1, got {v}"
                )));
            }
        }
        Ok(Hypothesis::Tabulated { values })
    }

    pub fn stump(feature: usize, threshold: f64, polarity: i8) -> Result<Hypothesis> {
        if polarity != 1 && polarity != -1 {
            return Err(Error::InvalidParameter(format!(
                "stump polarity must be +1 or -1, got {polarity}"
            )));
        }
        if threshold.is_nan() {
            return Err(Error::InvalidParameter("stump threshold is NaN".into()));
        }
        Ok(Hypothesis::Stump {
            feature,
            threshold,
            polarity,
        })
    }

    pub fn evaluate(&self, x: &Point) -> Result<Label> {
        match (self, x) {
            (Hypothesis::Tabulated { values }, Point::Finite(i)) => {
                let v = *values.get(*i).ok_or(Error::IndexOutOfRange {
                    index: *i,
                    len: values.len(),
                })?;
                Label::new(v)
            }
            (
                Hypothesis::Stump {
                    feature,
                    threshold,
                    polarity,
                },
                Point::Features(fs),
            ) => {
                let value = *fs.get(*feature).ok_or(Error::IndexOutOfRange {
                    index: *feature,
                    len: fs.len(),
                })?;
                let sign = Label::sign_of(value - threshold);
                Ok(if *polarity == 1 { sign } else { sign.flipped() })
            }
            (Hypothesis::Tabulated { .. }, Point::Features(_)) => Err(
                Error::RepresentationMismatch("tabulated hypothesis on a feature vector".into()),
            ),
            (Hypothesis::Stump { .. }, Point::Finite(_)) => Err(Error::RepresentationMismatch(
                "stump hypothesis on a finite-domain index".into(),
            )),
        }
    }
}

/// Unweighted average of `T >= 1` hypotheses composed with sign.
///
/// The member list is kept as-is (repetition allowed) so provenance survives
/// to the output; evaluation is sign of the mean member prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VotingClassifier {
    members: Vec<Hypothesis>,
}

impl VotingClassifier {
    pub fn new(members: Vec<Hypothesis>) -> Result<VotingClassifier> {
        if members.is_empty() {
            return Err(Error::EmptyVoter);
        }
        Ok(VotingClassifier { members })
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// The label and the raw average `(1/T) sum h_i(x)`.
    pub fn evaluate(&self, x: &Point) -> Result<(Label, f64)> {
        let mut total = 0i64;
        for h in &self.members {
            total += i64::from(h.evaluate(x)?.value());
        }
        let raw = total as f64 / self.members.len() as f64;
        Ok((Label::sign_of(raw), raw))
    }
}

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Convex combination of hypotheses; the pruning input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedVoter {
    pairs: Vec<(Hypothesis, f64)>,
}

impl WeightedVoter {
    pub fn new(pairs: Vec<(Hypothesis, f64)>) -> Result<WeightedVoter> {
        if pairs.is_empty() {
            return Err(Error::EmptyVoter);
        }
        let mut total = 0.0;
        for (_, w) in &pairs {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "voter weight {w} is negative or non-finite"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "voter weights sum to {total}, expected 1"
            )));
        }
        Ok(WeightedVoter { pairs })
    }

    pub fn pairs(&self) -> &[(Hypothesis, f64)] {
        &self.pairs
    }

    /// The weighted real-valued vote `sum_h alpha_h h(x)`.
    pub fn raw_value(&self, x: &Point) -> Result<f64> {
        let mut acc = 0.0;
        for (h, w) in &self.pairs {
            acc += w * h.evaluate(x)?.as_f64();
        }
        Ok(acc)
    }
}

/// Stump thresholds may be the -inf/+inf sentinels, which plain JSON cannot
/// carry; those serialize as the strings "-inf"/"inf".
mod stump_threshold {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_f64(*value)
        } else if *value > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }

    struct ThresholdVisitor;

    impl Visitor<'_> for ThresholdVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or \"inf\"/\"-inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("bad threshold string {other:?}"))),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        deserializer.deserialize_any(ThresholdVisitor)
    }
}
