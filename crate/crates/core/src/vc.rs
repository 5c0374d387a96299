//! Exhaustive VC machinery: shattering, VC and dual VC by brute force, the
//! averaged-class VC bound, and margin-based voter pruning.
//!
//! Everything here is exact and exponential; hard caps (domain <= 24 points,
//! pattern sets <= 2^30) raise typed errors instead of approximating.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};

use crate::booster::{binomial_u128, enumerate_combinations};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, VotingClassifier, WeightedVoter};
use crate::metrics::MARGIN_TOLERANCE;
use crate::seed::Seed;

pub const SHATTER_POINT_CAP: usize = 30;
pub const EXACT_DOMAIN_CAP: usize = 24;
pub const DUAL_HYPOTHESIS_CAP: usize = 1 << 16;
pub const MATERIALIZE_COMBINATION_CAP: u128 = 1_000_000;
pub const MATERIALIZE_DOMAIN_CAP: usize = 16;

/// A finite hypothesis class as an explicit value matrix: one row of +-1
/// entries per hypothesis, one column per domain point.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedClass {
    domain_size: usize,
    hypotheses: Vec<Vec<i8>>,
}

impl TabulatedClass {
    pub fn new(domain_size: usize, hypotheses: Vec<Vec<i8>>) -> Result<TabulatedClass> {
        if domain_size == 0 {
            return Err(Error::InvalidParameter("domain must be nonempty".into()));
        }
        for row in &hypotheses {
            if row.len() != domain_size {
                return Err(Error::InvalidParameter(format!(
                    "hypothesis row of length {} in a class over {domain_size} points",
                    row.len()
                )));
            }
            if row.iter().any(|&v| v != 1 && v != -1) {
                return Err(Error::InvalidParameter(
                    "hypothesis entries must be +1 or -1".into(),
                ));
            }
        }
        Ok(TabulatedClass {
            domain_size,
            hypotheses,
        })
    }

    /// All 2^domain_size functions, enumerated by binary counting: hypothesis
    /// `i` maps point `x` to +1 iff bit `x` of `i` is set. Index 0 is the
    /// all-minus function.
    pub fn full(domain_size: usize) -> Result<TabulatedClass> {
        if domain_size == 0 || domain_size > 20 {
            return Err(Error::CapExceeded(format!(
                "full class over {domain_size} points"
            )));
        }
        let count = 1usize << domain_size;
        let mut hypotheses = Vec::with_capacity(count);
        for i in 0..count {
            let row = (0..domain_size)
                .map(|x| if (i >> x) & 1 == 1 { 1 } else { -1 })
                .collect();
            hypotheses.push(row);
        }
        TabulatedClass::new(domain_size, hypotheses)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.hypotheses
    }

    pub fn row(&self, i: usize) -> Option<&[i8]> {
        self.hypotheses.get(i).map(Vec::as_slice)
    }

    pub fn hypothesis(&self, i: usize) -> Result<Hypothesis> {
        let row = self.hypotheses.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.hypotheses.len(),
        })?;
        Hypothesis::tabulated(row.clone())
    }

    fn distinct_rows(&self) -> Vec<&[i8]> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for row in &self.hypotheses {
            if seen.insert(row.as_slice()) {
                out.push(row.as_slice());
            }
        }
        out
    }
}

/// Result of a brute-force VC computation.
#[derive(Clone, Debug, PartialEq)]
pub struct VcReport {
    pub dimension: usize,
    /// A shattered point set of maximal size found.
    pub witness: Vec<usize>,
    /// True when the search was truncated by the caller's cap, so the
    /// dimension is only a lower bound.
    pub capped: bool,
}

fn check_shattered(rows: &[&[i8]], points: &[usize]) -> bool {
    let k = points.len();
    if k == 0 {
        return true;
    }
    let needed: u64 = 1 << k;
    if (rows.len() as u64) < needed {
        return false;
    }
    let mut seen = vec![0u64; needed.div_ceil(64) as usize];
    let mut found = 0u64;
    for row in rows {
        let mut pattern = 0usize;
        for (bit, &p) in points.iter().enumerate() {
            if row[p] == 1 {
                pattern |= 1 << bit;
            }
        }
        let word = pattern / 64;
        let mask = 1u64 << (pattern % 64);
        if seen[word] & mask == 0 {
            seen[word] |= mask;
            found += 1;
            if found == needed {
                return true;
            }
        }
    }
    false
}

/// Does the class realize all 2^k labelings of `points`?
pub fn shatters(class: &TabulatedClass, points: &[usize]) -> Result<bool> {
    if points.len() > SHATTER_POINT_CAP {
        return Err(Error::CapExceeded(format!(
            "shattering check on {} points (cap {SHATTER_POINT_CAP})",
            points.len()
        )));
    }
    let mut distinct = HashSet::new();
    for &p in points {
        if p >= class.domain_size {
            return Err(Error::IndexOutOfRange {
                index: p,
                len: class.domain_size,
            });
        }
        if !distinct.insert(p) {
            return Err(Error::InvalidParameter(format!(
                "duplicate point {p} in shattering set"
            )));
        }
    }
    Ok(check_shattered(&class.distinct_rows(), points))
}

fn for_each_subset(domain: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    // Lexicographic k-subsets of {0, .., domain-1}; `f` returns true to stop.
    if k > domain {
        return false;
    }
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        if f(&subset) {
            return true;
        }
        // Advance to the next subset.
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if subset[i] != i + domain - k {
                break;
            }
            if i == 0 {
                return false;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Exact VC dimension by increasing-size subset search, truncated at `cap`.
pub fn vc_dim(class: &TabulatedClass, cap: usize) -> Result<VcReport> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if class.domain_size > EXACT_DOMAIN_CAP {
        return Err(Error::CapExceeded(format!(
            "exact VC on a domain of {} points (cap {EXACT_DOMAIN_CAP})",
            class.domain_size
        )));
    }
    let rows = class.distinct_rows();
    let limit = cap.min(class.domain_size);
    let mut report = VcReport {
        dimension: 0,
        witness: Vec::new(),
        capped: false,
    };
    for k in 1..=limit {
        // A class with fewer than 2^k distinct rows cannot shatter k points.
        if (rows.len() as u128) < (1u128 << k) {
            return Ok(report);
        }
        let mut found: Option<Vec<usize>> = None;
        for_each_subset(class.domain_size, k, |subset| {
            if check_shattered(&rows, subset) {
                found = Some(subset.to_vec());
                true
            } else {
                false
            }
        });
        match found {
            Some(witness) => {
                report.dimension = k;
                report.witness = witness;
            }
            None => return Ok(report),
        }
    }
    report.capped = limit < class.domain_size;
    Ok(report)
}

/// The dual class: one hypothesis per original point, tabulated over the
/// original hypothesis list (the transpose of the value matrix).
pub fn dual_class(class: &TabulatedClass) -> Result<TabulatedClass> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if class.len() > DUAL_HYPOTHESIS_CAP {
        return Err(Error::CapExceeded(format!(
            "dual of a class with {} hypotheses (cap {DUAL_HYPOTHESIS_CAP})",
            class.len()
        )));
    }
    let mut transposed = vec![vec![0i8; class.len()]; class.domain_size];
    for (j, row) in class.hypotheses.iter().enumerate() {
        for (x, &v) in row.iter().enumerate() {
            transposed[x][j] = v;
        }
    }
    TabulatedClass::new(class.len(), transposed)
}

/// `4 T d ln(4eT)`, an upper bound on the VC dimension of sign-composed
/// T-wise averages of a VC-dimension-d class.
pub fn average_class_vc_bound(t: u64, d: u64) -> f64 {
    let tf = t as f64;
    4.0 * tf * d as f64 * (4.0 * std::f64::consts::E * tf).ln()
}

/// Materialize sign(C^(T)) as a tabulated class: one value vector per sorted
/// T-multiset of hypotheses, in lexicographic multiset order.
pub fn materialize_sign_averages(class: &TabulatedClass, t: usize) -> Result<TabulatedClass> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if t == 0 {
        return Err(Error::InvalidParameter("averages need T >= 1".into()));
    }
    let mut rows = Vec::new();
    for multiset in enumerate_combinations(class.len(), t) {
        let mut sums = vec![0i64; class.domain_size];
        for &i in &multiset {
            for (x, &v) in class.hypotheses[i].iter().enumerate() {
                sums[x] += i64::from(v);
            }
        }
        let row = sums
            .iter()
            .map(|&s| if s >= 0 { 1i8 } else { -1i8 })
            .collect();
        rows.push(row);
    }
    TabulatedClass::new(class.domain_size, rows)
}

/// Brute-force the VC dimension of sign(C^(T)) and compare against the
/// closed-form bound `4 T d ln(4eT)` where `d = VCdim(C)`.
pub fn verify_average_class_vc(
    class: &TabulatedClass,
    t: usize,
    cap: usize,
) -> Result<(VcReport, f64, bool)> {
    if class.domain_size > MATERIALIZE_DOMAIN_CAP {
        return Err(Error::CapExceeded(format!(
            "averaged-class check on a domain of {} points (cap {MATERIALIZE_DOMAIN_CAP})",
            class.domain_size
        )));
    }
    let combos = binomial_u128((class.len() + t - 1) as u128, t as u128)
        .ok_or_else(|| Error::CapExceeded("combination count overflows".into()))?;
    if combos > MATERIALIZE_COMBINATION_CAP {
        return Err(Error::CapExceeded(format!(
            "{combos} multisets to materialize (cap {MATERIALIZE_COMBINATION_CAP})"
        )));
    }
    let base = vc_dim(class, class.domain_size)?;
    let averaged = materialize_sign_averages(class, t)?;
    let computed = vc_dim(&averaged, cap)?;
    let bound = average_class_vc_bound(t as u64, base.dimension as u64);
    let ok = (computed.dimension as f64) <= bound;
    Ok((computed, bound, ok))
}

/// The pruned-voter size `ceil(130^2 (4 d* + 2) / theta^2)`.
pub fn pruning_size(theta: f64, d_star: u64) -> Result<u64> {
    if theta.is_nan() || theta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "pruning needs theta > 0, got {theta}"
        )));
    }
    Ok((130.0f64 * 130.0 * (4.0 * d_star as f64 + 2.0) / (theta * theta)).ceil() as u64)
}

/// Prune a weighted voter with margins >= theta on `s` down to an equal
/// weight combination of `l` of its members with strictly positive margins.
///
/// Members are sampled i.i.d. proportionally to their weights until an
/// attempt succeeds; the attempt count is returned alongside the voter so
/// callers can bound it.
pub fn prune_voter(
    v: &WeightedVoter,
    s: &Dataset,
    theta: f64,
    l: usize,
    seed: Seed,
    max_attempts: usize,
) -> Result<(VotingClassifier, usize)> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if l == 0 || max_attempts == 0 {
        return Err(Error::InvalidParameter(
            "pruning needs L >= 1 and at least one attempt".into(),
        ));
    }
    if theta.is_nan() || theta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "pruning needs theta > 0, got {theta}"
        )));
    }

    // Signed member-vs-example agreement matrix, and the margin precondition.
    let pairs = v.pairs();
    let mut agreement = vec![vec![0i8; s.len()]; pairs.len()];
    for (j, (h, _)) in pairs.iter().enumerate() {
        for (i, e) in s.iter().enumerate() {
            agreement[j][i] = h.evaluate(&e.point)?.value() * e.label.value();
        }
    }
    for (i, e) in s.iter().enumerate() {
        let margin = e.label.as_f64() * v.raw_value(&e.point)?;
        if margin < theta - MARGIN_TOLERANCE {
            return Err(Error::MarginBelowTheta {
                index: i,
                margin,
                theta,
            });
        }
    }

    let weights: Vec<f64> = pairs.iter().map(|(_, w)| *w).collect();
    let sampler = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidParameter(format!("bad voter weights: {e}")))?;
    let mut rng = seed.rng();

    let mut draws: Vec<u32> = Vec::with_capacity(l);
    for attempt in 1..=max_attempts {
        draws.clear();
        let mut counts = vec![0i64; pairs.len()];
        for _ in 0..l {
            let j = sampler.sample(&mut rng);
            draws.push(j as u32);
            counts[j] += 1;
        }
        let good = (0..s.len()).all(|i| {
            let total: i64 = counts
                .iter()
                .zip(&agreement)
                .map(|(&c, row)| c * i64::from(row[i]))
                .sum();
            total > 0
        });
        if good {
            let members = draws
                .iter()
                .map(|&j| pairs[j as usize].0.clone())
                .collect();
            return Ok((VotingClassifier::new(members)?, attempt));
        }
    }
    Err(Error::MaxAttemptsExceeded { max_attempts })
}
