//! Closed-form evaluators for the generalization bounds and cost counts.
//!
//! Every evaluator returns its value even when vacuous (above one); a
//! `vacuous` flag rides along so callers can report that honestly. The
//! logarithm used throughout is `clamped_ln(x) = ln(max(x, e))`, which is
//! exactly `ln` for `x >= e` and 1 below.
//!
//! Cost counts are exact big integers: the subsample loop is `n^m0`-sized by
//! design and overflows fixed-width arithmetic quickly.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::booster::{repeat_count, round_count};
use crate::error::{Error, Result};
use crate::vc::average_class_vc_bound;

/// `ln(max(x, e))`.
pub fn clamped_ln(x: f64) -> f64 {
    x.max(std::f64::consts::E).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    /// True when the bound exceeds one and so says nothing.
    pub vacuous: bool,
}

impl BoundValue {
    fn of(value: f64) -> BoundValue {
        BoundValue {
            value,
            vacuous: value > 1.0,
        }
    }
}

/// Uniform error bound over a VC class from its empirical loss:
/// `L + sqrt(18 L (d ln(20en/d) + ln(1/delta)) / n)
///    + 15 (d ln(20en/d) + ln(1/delta)) / n`.
pub fn maurer_pontil_bound(l_emp: f64, d: u64, n: u64, delta: f64) -> BoundValue {
    let nf = n as f64;
    let complexity = d as f64 * clamped_ln(20.0 * std::f64::consts::E * nf / d as f64)
        + (1.0 / delta).ln();
    let value = l_emp + (18.0 * l_emp * complexity / nf).sqrt() + 15.0 * complexity / nf;
    BoundValue::of(value.max(0.0))
}

/// Single-hypothesis deviation bound from the population loss:
/// `L + sqrt(2 L ln(1/delta) / (3n)) + 2 ln(1/delta) / n`.
pub fn bernstein_bound(l_pop: f64, n: u64, delta: f64) -> BoundValue {
    let nf = n as f64;
    let log_term = (1.0 / delta).ln();
    BoundValue::of(l_pop + (2.0 * l_pop * log_term / (3.0 * nf)).sqrt() + 2.0 * log_term / nf)
}

/// Two-sided uniform convergence over a VC class:
/// `62 sqrt((2d+1)/n) + sqrt(2 ln(1/delta) / n)`.
pub fn uniform_convergence_bound(d: u64, n: u64, delta: f64) -> BoundValue {
    let nf = n as f64;
    BoundValue::of(
        62.0 * ((2.0 * d as f64 + 1.0) / nf).sqrt() + (2.0 * (1.0 / delta).ln() / nf).sqrt(),
    )
}

/// Rademacher complexity of a VC class on n points: `31 sqrt(d/n)`.
pub fn rademacher_vc_bound(d: u64, n: u64) -> BoundValue {
    BoundValue::of(31.0 * (d as f64 / n as f64).sqrt())
}

/// The headline error bound together with the combination size and averaged
/// class dimension it was evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainBound {
    pub value: f64,
    pub t: u64,
    pub d_prime: f64,
    pub vacuous: bool,
}

/// `err* + 10 sqrt(err* (d' ln(10en/d') + ln(5/delta)) / n)
///       + 182 (d' ln(10en/d') + 4 ln(5/delta)) / n`
/// with `d' = 4 T d ln(4eT)` and
/// `T = ceil(min(ln(n)/theta^2, 260^2 (4 d* + 2)/theta^2))`.
///
/// The linear term carries `4 ln(5/delta)` while the square-root term carries
/// `ln(5/delta)`; the asymmetry is deliberate and matches the source formula.
pub fn main_theorem_bound(
    err_star: f64,
    d: u64,
    d_star: u64,
    theta: f64,
    n: u64,
    delta: f64,
) -> Result<MainBound> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "theta must be in (0, 1/2), got {theta}"
        )));
    }
    if !(0.0..=1.0).contains(&err_star) {
        return Err(Error::InvalidParameter(format!(
            "err* must be in [0, 1], got {err_star}"
        )));
    }
    if n == 0 || d == 0 || d_star == 0 || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(
            "need n, d, d* >= 1 and delta in (0, 1]".into(),
        ));
    }
    let t = crate::booster::combination_size(n, theta, d_star);
    let d_prime = average_class_vc_bound(t, d);
    let nf = n as f64;
    let gamma = d_prime * clamped_ln(10.0 * std::f64::consts::E * nf / d_prime);
    let log_term = (5.0 / delta).ln();
    let value = err_star
        + 10.0 * (err_star * (gamma + log_term) / nf).sqrt()
        + 182.0 * (gamma + 4.0 * log_term) / nf;
    Ok(MainBound {
        value,
        t,
        d_prime,
        vacuous: value > 1.0,
    })
}

/// Exact weak-learner call count `R * M * (n/2)^m0`.
pub fn weak_call_count(n: u64, m0: u32, theta: f64, delta: f64, delta0: f64) -> Result<BigUint> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::OddDatasetLength(n as usize));
    }
    if m0 == 0 {
        return Err(Error::InvalidParameter("m0 must be positive".into()));
    }
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "theta must be in (0, 1/2), got {theta}"
        )));
    }
    let rounds = round_count(n, theta);
    let repeats = repeat_count(rounds, delta, delta0);
    Ok(BigUint::from(rounds) * BigUint::from(repeats) * BigUint::from(n / 2).pow(m0))
}

/// Exact combination count `C(pool + T - 1, T)`.
pub fn combination_count(pool_size: u64, t: u64) -> BigUint {
    if pool_size == 0 || t == 0 {
        return BigUint::one();
    }
    let n = pool_size + t - 1;
    let k = t.min(n - t);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// The sample-size threshold and excess-error floor of the lower bound, with
/// caller-supplied constants. The constants are existential: the source gives
/// no numeric values, so defaults of 1 only sketch shapes, not sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    /// `C3 d / (gamma0^2 L (1 - 2L)^2)`.
    pub min_m: f64,
    /// `sqrt(C4 L d / (gamma0^2 m ln(2/gamma0)))` where `err* = L`.
    pub excess: f64,
}

pub fn lower_bound_eval(
    d: u64,
    gamma0: f64,
    err_star: f64,
    m: u64,
    c3: f64,
    c4: f64,
) -> Result<LowerBound> {
    if !(err_star > 0.0 && err_star < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "the lower bound needs err* in (0, 1/2), got {err_star}"
        )));
    }
    if !(gamma0 > 0.0 && gamma0 <= 1.0) || d == 0 || m == 0 {
        return Err(Error::InvalidParameter(
            "need gamma0 in (0, 1], d >= 1, m >= 1".into(),
        ));
    }
    let g2 = gamma0 * gamma0;
    let min_m = c3 * d as f64 / (g2 * err_star * (1.0 - 2.0 * err_star).powi(2));
    let excess = (c4 * err_star * d as f64 / (g2 * m as f64 * (2.0 / gamma0).ln())).sqrt();
    Ok(LowerBound { min_m, excess })
}
