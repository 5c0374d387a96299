//! Agnostic boosting at desk scale.
//!
//! The library is organized around a two-phase booster: an exhaustive pool of
//! weak hypotheses is built by calling a pluggable weak learner on every
//! size-`m0` subsample of the first half of the training sequence, and the
//! final classifier is the empirical risk minimizer over sign-averages of `T`
//! pool members on the second half. Around that sit an equal-weight margin
//! booster, brute-force VC/dual-VC machinery with a margin-based voter
//! pruner, closed-form generalization-bound evaluators, and a synthetic
//! experiment harness with exact population-error evaluation.

pub mod bounds;
pub mod booster;
pub mod data;
pub mod error;
pub mod harness;
pub mod hypothesis;
pub mod io;
pub mod margin_boost;
pub mod metrics;
pub mod seed;
pub mod vc;
pub mod weak_learners;

pub use error::{Error, Result};

pub use data::{Dataset, EmpiricalDistribution, Example, FiniteDistribution, Label, Point};
pub use hypothesis::{Hypothesis, VotingClassifier, WeightedVoter};
pub use metrics::{Classifier, Scorer};
pub use seed::Seed;
