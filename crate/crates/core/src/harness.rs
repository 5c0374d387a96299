//! Synthetic distributions and the experiment harness.
//!
//! Distributions are realizable-plus-noise: a target from the reference class
//! labels each point, and the label flips independently with rate eta, so the
//! best-in-class error is exactly eta when the full class is the reference.
//! Population error is always computed by atom enumeration, never estimated;
//! Monte Carlo appears only in tests as a cross-check.
//!
//! Trials fan out from a root seed by hashing (n, trial), run independently
//! (possibly in parallel), and are gathered in (n, trial) order, so the
//! result table is byte-identical across worker counts. Wall time is kept in
//! the rows but deliberately left out of the canonical CSV for that reason.

use std::io::Write;
use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::booster::{agnostic_boost, BoostConfig};
use crate::bounds::{main_theorem_bound, weak_call_count};
use crate::data::{Atom, Dataset, FiniteDistribution};
use crate::error::{Error, Result};
use crate::metrics::{population_err, Classifier};
use crate::seed::Seed;
use crate::vc::TabulatedClass;
use crate::weak_learners::ErmWeakLearner;

/// A realizable-plus-noise distribution in data form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub domain_size: usize,
    /// Index of the target hypothesis in the reference class.
    pub target_index: usize,
    /// Label flip rate, in [0, 1/2).
    pub noise_rate: f64,
    /// Marginal over domain points; must sum to one.
    pub marginal: Vec<f64>,
}

impl SyntheticSpec {
    pub fn uniform(domain_size: usize, target_index: usize, noise_rate: f64) -> SyntheticSpec {
        SyntheticSpec {
            domain_size,
            target_index,
            noise_rate,
            marginal: vec![1.0 / domain_size as f64; domain_size],
        }
    }
}

/// Atoms `(x, f*(x), (1-eta) p_x)` and `(x, -f*(x), eta p_x)`, so the target
/// has population error exactly eta.
pub fn make_distribution(
    spec: &SyntheticSpec,
    reference: &TabulatedClass,
) -> Result<FiniteDistribution> {
    if spec.domain_size != reference.domain_size() {
        return Err(Error::InvalidParameter(format!(
            "spec domain {} vs class domain {}",
            spec.domain_size,
            reference.domain_size()
        )));
    }
    if !(0.0..0.5).contains(&spec.noise_rate) {
        return Err(Error::InvalidParameter(format!(
            "noise rate must be in [0, 1/2), got {}",
            spec.noise_rate
        )));
    }
    if spec.marginal.len() != spec.domain_size {
        return Err(Error::InvalidParameter(format!(
            "{} marginal weights for {} points",
            spec.marginal.len(),
            spec.domain_size
        )));
    }
    let target = reference
        .row(spec.target_index)
        .ok_or(Error::IndexOutOfRange {
            index: spec.target_index,
            len: reference.len(),
        })?;
    let mut atoms = Vec::with_capacity(2 * spec.domain_size);
    for (x, &p) in spec.marginal.iter().enumerate() {
        let y = crate::data::Label::new(target[x])?;
        atoms.push(Atom {
            x,
            y,
            p: (1.0 - spec.noise_rate) * p,
        });
        atoms.push(Atom {
            x,
            y: y.flipped(),
            p: spec.noise_rate * p,
        });
    }
    FiniteDistribution::new(spec.domain_size, atoms)
}

/// Exact population error by atom enumeration.
pub fn exact_population_err<C: Classifier + ?Sized>(
    d: &FiniteDistribution,
    g: &C,
) -> Result<f64> {
    population_err(d, g)
}

/// Seeded i.i.d. sample of size n.
pub fn sample_dataset(d: &FiniteDistribution, n: usize, seed: Seed) -> Dataset {
    d.sample(n, seed)
}

/// Best-in-class population error by exhaustive minimization over the finite
/// reference class (the desk-scale stand-in for an infimum).
pub fn err_star(d: &FiniteDistribution, reference: &TabulatedClass) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::EmptyClass);
    }
    let mut best = f64::INFINITY;
    for i in 0..reference.len() {
        best = best.min(population_err(d, &reference.hypothesis(i)?)?);
    }
    Ok(best)
}

/// One boost run inside a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub err_pop: f64,
    pub err_star: f64,
    pub excess: f64,
    pub bound_value: f64,
    pub weak_calls: u64,
    pub combos: u64,
    pub wall_ms: u64,
}

/// Sweep configuration: boost parameters plus the n-grid and trial count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub delta: f64,
    pub delta0: f64,
    pub m0: usize,
    pub theta: f64,
    pub budget: crate::booster::Budget,
    pub dedup: crate::booster::DedupMode,
}

/// Error-versus-n sweep: for each (n, trial), sample, boost, evaluate exact
/// population error and the matching bound. Rows come back in (n, trial)
/// order regardless of how trials were scheduled.
pub fn run_curve(
    spec: &SyntheticSpec,
    reference: &TabulatedClass,
    cfg: &CurveConfig,
) -> Result<Vec<ExperimentRow>> {
    let d = make_distribution(spec, reference)?;
    let best = err_star(&d, reference)?;
    let dim = crate::vc::vc_dim(reference, reference.domain_size())?.dimension as u64;
    let dual = crate::vc::vc_dim(
        &crate::vc::dual_class(reference)?,
        reference.len(),
    )?
    .dimension as u64;

    for &n in &cfg.n_grid {
        if n < 2 || n % 2 != 0 {
            return Err(Error::OddDatasetLength(n));
        }
    }

    let jobs: Vec<(usize, usize)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();

    let rows: Result<Vec<ExperimentRow>> = jobs
        .into_par_iter()
        .map(|(n, trial)| {
            let trial_seed = Seed(cfg.seed).derive(&[n as u64, trial as u64]);
            let sample = d.sample(n, trial_seed);
            let started = Instant::now();
            let boost_cfg = BoostConfig {
                delta: cfg.delta,
                delta0: cfg.delta0,
                m0: cfg.m0,
                theta: cfg.theta,
                d_star: dual,
                seed_root: trial_seed.derive(&[1]),
                budget: cfg.budget,
                dedup: cfg.dedup,
                subsamples: crate::booster::SubsampleMode::OrderedTuples,
                search: crate::booster::SearchMode::Exhaustive,
            };
            let learner = ErmWeakLearner::new(reference.clone())?;
            let outcome = agnostic_boost(&sample, &learner, &boost_cfg)?;
            let err_pop = population_err(&d, &outcome.voter)?;
            let bound = main_theorem_bound(best, dim, dual, cfg.theta, n as u64, cfg.delta)?;
            debug_assert_eq!(
                weak_call_count(n as u64, cfg.m0 as u32, cfg.theta, cfg.delta, cfg.delta0)
                    .ok()
                    .and_then(|c| c.to_u64()),
                Some(outcome.report.weak_calls)
            );
            Ok(ExperimentRow {
                n,
                trial,
                seed: trial_seed.value(),
                err_pop,
                err_star: best,
                excess: err_pop - best,
                bound_value: bound.value,
                weak_calls: outcome.report.weak_calls,
                combos: outcome.report.combinations,
                wall_ms: started.elapsed().as_millis() as u64,
            })
        })
        .collect();
    rows
}

/// Canonical CSV for a sweep. Deterministic by construction: wall time is
/// omitted and floats use the shortest round-trip form.
pub fn write_curve_csv<W: Write>(rows: &[ExperimentRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "n,trial,seed,err_pop,err_star,excess,bound_value,weak_calls,combos"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.trial,
            r.seed,
            r.err_pop,
            r.err_star,
            r.excess,
            r.bound_value,
            r.weak_calls,
            r.combos
        )?;
    }
    Ok(())
}

pub fn curve_csv_string(rows: &[ExperimentRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_curve_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::MalformedFile(e.to_string()))
}

pub fn read_curve_csv(text: &str) -> Result<Vec<ExperimentRow>> {
    let mut rows = Vec::new();
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| {
        Error::MalformedFile("empty results file".into())
    })?;
    let expected = "n,trial,seed,err_pop,err_star,excess,bound_value,weak_calls,combos";
    if header.trim() != expected {
        return Err(Error::MalformedFile(format!(
            "unexpected header {header:?}"
        )));
    }
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::MalformedFile(format!(
                "line {}: expected 9 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_err = |what: &str| Error::MalformedFile(format!("line {}: bad {what}", lineno + 2));
        rows.push(ExperimentRow {
            n: fields[0].parse().map_err(|_| parse_err("n"))?,
            trial: fields[1].parse().map_err(|_| parse_err("trial"))?,
            seed: fields[2].parse().map_err(|_| parse_err("seed"))?,
            err_pop: fields[3].parse().map_err(|_| parse_err("err_pop"))?,
            err_star: fields[4].parse().map_err(|_| parse_err("err_star"))?,
            excess: fields[5].parse().map_err(|_| parse_err("excess"))?,
            bound_value: fields[6].parse().map_err(|_| parse_err("bound_value"))?,
            weak_calls: fields[7].parse().map_err(|_| parse_err("weak_calls"))?,
            combos: fields[8].parse().map_err(|_| parse_err("combos"))?,
            wall_ms: 0,
        });
    }
    Ok(rows)
}

/// How often the per-run excess exceeded the bound. The guarantee is
/// per-run with failure probability delta, so violations at about that rate
/// are legitimate; this reports rather than asserts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub rows: usize,
    pub violations: usize,
    pub violation_rate: f64,
}

pub fn check_bound(rows: &[ExperimentRow]) -> BoundCheck {
    let violations = rows
        .iter()
        .filter(|r| r.excess > r.bound_value + 1e-12)
        .count();
    BoundCheck {
        rows: rows.len(),
        violations,
        violation_rate: if rows.is_empty() {
            0.0
        } else {
            violations as f64 / rows.len() as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Label, Point};
    use crate::hypothesis::Hypothesis;
    use rand::Rng;

    fn full_class() -> TabulatedClass {
        TabulatedClass::full(4).unwrap()
    }

    #[test]
    fn noiseless_spec_is_realizable() {
        let spec = SyntheticSpec::uniform(4, 3, 0.0);
        let d = make_distribution(&spec, &full_class()).unwrap();
        assert_eq!(err_star(&d, &full_class()).unwrap(), 0.0);
        let target = full_class().hypothesis(3).unwrap();
        assert_eq!(population_err(&d, &target).unwrap(), 0.0);
    }

    #[test]
    fn noise_rate_is_the_target_error() {
        let spec = SyntheticSpec::uniform(4, 5, 0.1);
        let d = make_distribution(&spec, &full_class()).unwrap();
        let target = full_class().hypothesis(5).unwrap();
        assert!((population_err(&d, &target).unwrap() - 0.1).abs() < 1e-12);
        // Against the full class the best error equals the noise rate.
        assert!((err_star(&d, &full_class()).unwrap() - 0.1).abs() < 1e-12);
        let anti = full_class().hypothesis(10).unwrap(); // bitwise complement of 5
        assert!((population_err(&d, &anti).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = SyntheticSpec::uniform(4, 0, 0.5);
        assert!(make_distribution(&spec, &full_class()).is_err());
        spec.noise_rate = 0.1;
        spec.target_index = 99;
        assert!(make_distribution(&spec, &full_class()).is_err());
    }

    #[test]
    fn label_frequency_tracks_the_noise_rate() {
        let spec = SyntheticSpec::uniform(2, 3, 0.25);
        let class = TabulatedClass::full(2).unwrap();
        let d = make_distribution(&spec, &class).unwrap();
        // Target is all-plus (index 3), so minus labels appear at rate eta.
        let s = d.sample(100_000, Seed(77));
        let minus = s.iter().filter(|e| e.label == Label::MINUS).count();
        let freq = minus as f64 / 100_000.0;
        assert!((0.24..=0.26).contains(&freq), "freq {freq}");
    }

    #[test]
    fn population_err_matches_monte_carlo() {
        let spec = SyntheticSpec::uniform(4, 6, 0.15);
        let d = make_distribution(&spec, &full_class()).unwrap();
        let g = Hypothesis::tabulated(vec![1, -1, 1, 1]).unwrap();
        let exact = exact_population_err(&d, &g).unwrap();

        let draws = 100_000usize;
        let mut rng = Seed(123).rng();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for atom in &d.atoms {
            acc += atom.p;
            cumulative.push(acc);
        }
        let mut mistakes = 0usize;
        for _ in 0..draws {
            let u: f64 = rng.gen();
            let idx = cumulative.partition_point(|&c| c <= u).min(d.atoms.len() - 1);
            let atom = &d.atoms[idx];
            if g.evaluate(&Point::Finite(atom.x)).unwrap() != atom.y {
                mistakes += 1;
            }
        }
        let estimate = mistakes as f64 / draws as f64;
        let sigma = (exact * (1.0 - exact) / draws as f64).sqrt();
        assert!(
            (estimate - exact).abs() <= 3.0 * sigma,
            "estimate {estimate} vs exact {exact}"
        );
    }

    fn tiny_cfg(n_grid: Vec<usize>, trials: usize) -> CurveConfig {
        CurveConfig {
            n_grid,
            trials,
            seed: 7,
            delta: 0.1,
            delta0: 0.5,
            m0: 1,
            theta: 0.45,
            budget: crate::booster::Budget::default(),
            dedup: crate::booster::DedupMode::ExactTable,
        }
    }

    #[test]
    fn zero_trials_gives_a_bare_header() {
        let spec = SyntheticSpec::uniform(4, 0, 0.0);
        let rows = run_curve(&spec, &full_class(), &tiny_cfg(vec![8], 0)).unwrap();
        assert!(rows.is_empty());
        let text = curve_csv_string(&rows).unwrap();
        assert_eq!(
            text,
            "n,trial,seed,err_pop,err_star,excess,bound_value,weak_calls,combos\n"
        );
    }

    #[test]
    fn realizable_sweep_has_zero_excess() {
        let spec = SyntheticSpec::uniform(4, 0, 0.0);
        let rows = run_curve(&spec, &full_class(), &tiny_cfg(vec![8], 4)).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert_eq!(row.err_pop, 0.0);
            assert_eq!(row.excess, 0.0);
        }
    }

    #[test]
    fn csv_round_trips() {
        let spec = SyntheticSpec::uniform(4, 0, 0.15);
        let rows = run_curve(&spec, &full_class(), &tiny_cfg(vec![8], 3)).unwrap();
        let text = curve_csv_string(&rows).unwrap();
        let back = read_curve_csv(&text).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.n, b.n);
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.err_pop, b.err_pop);
            assert_eq!(a.bound_value, b.bound_value);
        }
        let check = check_bound(&back);
        assert_eq!(check.rows, 3);
    }
}
