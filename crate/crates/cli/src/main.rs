//! `agnoboost` command line: boosting runs, the margin booster, VC tooling,
//! bound evaluators, and experiment sweeps.
//!
//! Exit codes: 0 on completion, 2 on a budget error, 3 on an I/O or format
//! error, 1 on any other failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use agnoboost::booster::{
    agnostic_boost, BoostConfig, Budget, DedupMode, SearchMode, SubsampleMode,
};
use agnoboost::bounds;
use agnoboost::error::Error;
use agnoboost::harness;
use agnoboost::io;
use agnoboost::margin_boost;
use agnoboost::metrics::{margin_histogram, weighted_err};
use agnoboost::seed::Seed;
use agnoboost::vc;
use agnoboost::weak_learners::{ErmWeakLearner, FaultyWeakLearner, StumpWeakLearner, WeakLearner};

#[derive(Parser)]
#[command(name = "agnoboost", about = "Agnostic boosting toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the two-phase booster on a dataset.
    Boost(BoostArgs),
    /// Run equal-weight margin boosting with an exhaustive provider.
    Adaboost(AdaboostArgs),
    /// VC machinery: dimensions, dual classes, bounds, pruning.
    #[command(subcommand)]
    Vc(VcCommand),
    /// Closed-form bound evaluators; each takes a JSON object.
    Bounds(BoundsArgs),
    /// Synthetic experiment sweeps.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerKind {
    Erm,
    Stump,
    Faulty,
}

#[derive(Clone, Copy, ValueEnum)]
enum DedupArg {
    Exact,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Exhaustive,
    Greedy,
}

#[derive(Args)]
struct BoostArgs {
    /// Training sequence CSV (header x,y or f0,..,y).
    #[arg(long)]
    data: PathBuf,
    /// Tabulated class JSON; required for the erm and faulty learners.
    #[arg(long)]
    class: Option<PathBuf>,
    #[arg(long)]
    m0: usize,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    delta: f64,
    /// Weak learner failure probability (also the faulty learner's rate).
    #[arg(long)]
    delta0: f64,
    /// Dual VC dimension of the base class.
    #[arg(long)]
    dstar: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "off")]
    dedup: DedupArg,
    /// Cap on weak-learner calls and on combinations.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    #[arg(long = "weak-learner", value_enum, default_value = "erm")]
    weak_learner: LearnerKind,
    /// Class index of the hypothesis the faulty learner returns on failure.
    #[arg(long = "bad-hypothesis-index")]
    bad_hypothesis_index: Option<usize>,
    /// Collapse order-equivalent subsamples (order-insensitive learners only).
    #[arg(long = "multiset-subsamples", default_value_t = false)]
    multiset_subsamples: bool,
    #[arg(long, value_enum, default_value = "exhaustive")]
    search: SearchArg,
    /// Where to write the voter JSON (stdout when omitted).
    #[arg(long = "voter-out")]
    voter_out: Option<PathBuf>,
    /// Where to write the run report JSON (stdout when omitted).
    #[arg(long = "report-out")]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct AdaboostArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    class: PathBuf,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    rounds: usize,
    /// Per-round CSV (round, weighted error, alpha, Z); stdout when omitted.
    #[arg(long = "rounds-out")]
    rounds_out: Option<PathBuf>,
    /// Margin histogram CSV (margin, count); stdout when omitted.
    #[arg(long = "margins-out")]
    margins_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VcCommand {
    /// Exact VC dimension of a tabulated class.
    Dim {
        #[arg(long)]
        class: PathBuf,
        /// Truncate the subset search at this size.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// The dual class (transpose), written as class JSON.
    Dual {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The averaged-class VC bound 4 T d ln(4eT).
    Avgbound {
        #[arg(long = "T")]
        t: u64,
        #[arg(long)]
        d: u64,
    },
    /// Prune a weighted voter with margins >= theta down to L members.
    Prune {
        #[arg(long)]
        voter: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long = "max-attempts", default_value_t = 64)]
        max_attempts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Maurer,
    Bernstein,
    Uc,
    Rademacher,
    Main,
    Lower,
    Cost,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(value_enum)]
    kind: BoundKind,
    /// Evaluator inputs as a JSON object.
    #[arg(long)]
    json: String,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Error-versus-n sweep against the headline bound.
    Curve {
        /// Synthetic distribution spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Reference/base class JSON.
        #[arg(long)]
        class: PathBuf,
        /// Comma-separated even sample sizes.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.45)]
        theta: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        delta0: f64,
        #[arg(long, default_value_t = 1)]
        m0: usize,
        #[arg(long, value_enum, default_value = "exact")]
        dedup: DedupArg,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Re-read a results CSV and report bound violations.
    CheckBound {
        #[arg(long)]
        results: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::BudgetExceeded { .. } => ExitCode::from(2),
                Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::MalformedFile(_) => {
                    ExitCode::from(3)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Boost(args) => run_boost(args),
        Command::Adaboost(args) => run_adaboost(args),
        Command::Vc(cmd) => run_vc(cmd),
        Command::Bounds(args) => run_bounds(args),
        Command::Experiment(cmd) => run_experiment(cmd),
    }
}

fn run_boost(args: BoostArgs) -> Result<(), Error> {
    let data = io::read_dataset_csv(&args.data)?;
    let class = match &args.class {
        Some(path) => Some(io::load_tabulated_class(path)?),
        None => None,
    };
    let learner: Box<dyn WeakLearner> = match args.weak_learner {
        LearnerKind::Erm => {
            let class = class.clone().ok_or_else(|| {
                Error::InvalidParameter("the erm learner needs --class".into())
            })?;
            Box::new(ErmWeakLearner::new(class)?)
        }
        LearnerKind::Stump => Box::new(StumpWeakLearner),
        LearnerKind::Faulty => {
            let class = class.clone().ok_or_else(|| {
                Error::InvalidParameter("the faulty learner needs --class".into())
            })?;
            let bad_index = args.bad_hypothesis_index.ok_or_else(|| {
                Error::InvalidParameter("the faulty learner needs --bad-hypothesis-index".into())
            })?;
            let bad = class.hypothesis(bad_index)?;
            let inner = Box::new(ErmWeakLearner::new(class)?);
            Box::new(FaultyWeakLearner::new(inner, args.delta0, bad)?)
        }
    };

    let cfg = BoostConfig {
        delta: args.delta,
        delta0: args.delta0,
        m0: args.m0,
        theta: args.theta,
        d_star: args.dstar,
        seed_root: Seed(args.seed),
        budget: Budget {
            weak_calls: args.budget,
            combinations: args.budget,
        },
        dedup: match args.dedup {
            DedupArg::Exact => DedupMode::ExactTable,
            DedupArg::Off => DedupMode::Off,
        },
        subsamples: if args.multiset_subsamples {
            SubsampleMode::SortedMultisets
        } else {
            SubsampleMode::OrderedTuples
        },
        search: match args.search {
            SearchArg::Exhaustive => SearchMode::Exhaustive,
            SearchArg::Greedy => SearchMode::Greedy,
        },
    };

    let outcome = agnostic_boost(&data, learner.as_ref(), &cfg)?;
    let voter_text = io::voter_json(&outcome)?;
    let report_text = serde_json::to_string_pretty(&outcome.report)?;
    emit(&args.voter_out, &(voter_text + "\n"))?;
    emit(&args.report_out, &(report_text + "\n"))?;
    Ok(())
}

fn run_adaboost(args: AdaboostArgs) -> Result<(), Error> {
    let data = io::read_dataset_csv(&args.data)?;
    let class = io::load_tabulated_class(&args.class)?;
    let outcome = margin_boost::run(&data, args.theta, args.rounds, |_, dist| {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..class.len() {
            let err = weighted_err(&data, dist, &class.hypothesis(i)?)?;
            if best.is_none_or(|(b, _)| err < b) {
                best = Some((err, i));
            }
        }
        class.hypothesis(best.expect("nonempty class").1)
    })?;

    let mut rounds_csv = String::from("round,weighted_err,alpha,z\n");
    for (i, round) in outcome.rounds.iter().enumerate() {
        rounds_csv.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            round.weighted_err,
            round.alpha,
            round.z
        ));
    }
    emit(&args.rounds_out, &rounds_csv)?;

    let mut margins_csv = String::from("margin,count\n");
    for (margin, count) in margin_histogram(&data, &outcome.voter)? {
        margins_csv.push_str(&format!("{margin},{count}\n"));
    }
    emit(&args.margins_out, &margins_csv)?;
    eprintln!(
        "margin loss at theta/2: {} (round bound met: {})",
        outcome.margin_loss_half_theta, outcome.meets_round_bound
    );
    Ok(())
}

fn run_vc(cmd: VcCommand) -> Result<(), Error> {
    match cmd {
        VcCommand::Dim { class, cap } => {
            let class = io::load_tabulated_class(&class)?;
            let cap = cap.unwrap_or(class.domain_size());
            let report = vc::vc_dim(&class, cap)?;
            println!(
                "{}",
                json!({
                    "dimension": report.dimension,
                    "witness": report.witness,
                    "capped": report.capped,
                })
            );
        }
        VcCommand::Dual { class, out } => {
            let class = io::load_tabulated_class(&class)?;
            let dual = vc::dual_class(&class)?;
            match out {
                Some(path) => io::save_tabulated_class(&dual, &path)?,
                None => println!(
                    "{}",
                    json!({"domain_size": dual.domain_size(), "hypotheses": dual.rows()})
                ),
            }
        }
        VcCommand::Avgbound { t, d } => {
            println!("{}", json!({"bound": vc::average_class_vc_bound(t, d)}));
        }
        VcCommand::Prune {
            voter,
            data,
            theta,
            l,
            seed,
            max_attempts,
            out,
        } => {
            let voter = io::load_weighted_voter(&voter)?;
            let data = io::read_dataset_csv(&data)?;
            let (pruned, attempts) =
                vc::prune_voter(&voter, &data, theta, l, Seed(seed), max_attempts)?;
            eprintln!("pruned to {} members in {attempts} attempt(s)", pruned.size());
            match out {
                Some(path) => io::save_voter_plain(&pruned, &path)?,
                None => println!("{}", json!({"members": pruned.size(), "attempts": attempts})),
            }
        }
    }
    Ok(())
}

fn field_f64(v: &serde_json::Value, key: &str) -> Result<f64, Error> {
    v.get(key)
        .and_then(|x| x.as_f64())
        .ok_or_else(|| Error::InvalidParameter(format!("missing numeric field {key:?}")))
}

fn field_u64(v: &serde_json::Value, key: &str) -> Result<u64, Error> {
    v.get(key)
        .and_then(|x| x.as_u64())
        .ok_or_else(|| Error::InvalidParameter(format!("missing integer field {key:?}")))
}

fn run_bounds(args: BoundsArgs) -> Result<(), Error> {
    let input: serde_json::Value = serde_json::from_str(&args.json)?;
    let output = match args.kind {
        BoundKind::Maurer => {
            let b = bounds::maurer_pontil_bound(
                field_f64(&input, "l_emp")?,
                field_u64(&input, "d")?,
                field_u64(&input, "n")?,
                field_f64(&input, "delta")?,
            );
            json!({"value": b.value, "vacuous": b.vacuous})
        }
        BoundKind::Bernstein => {
            let b = bounds::bernstein_bound(
                field_f64(&input, "l_pop")?,
                field_u64(&input, "n")?,
                field_f64(&input, "delta")?,
            );
            json!({"value": b.value, "vacuous": b.vacuous})
        }
        BoundKind::Uc => {
            let b = bounds::uniform_convergence_bound(
                field_u64(&input, "d")?,
                field_u64(&input, "n")?,
                field_f64(&input, "delta")?,
            );
            json!({"value": b.value, "vacuous": b.vacuous})
        }
        BoundKind::Rademacher => {
            let b = bounds::rademacher_vc_bound(
                field_u64(&input, "d")?,
                field_u64(&input, "n")?,
            );
            json!({"value": b.value, "vacuous": b.vacuous})
        }
        BoundKind::Main => {
            let b = bounds::main_theorem_bound(
                field_f64(&input, "err_star")?,
                field_u64(&input, "d")?,
                field_u64(&input, "d_star")?,
                field_f64(&input, "theta")?,
                field_u64(&input, "n")?,
                field_f64(&input, "delta")?,
            )?;
            json!({"value": b.value, "t": b.t, "d_prime": b.d_prime, "vacuous": b.vacuous})
        }
        BoundKind::Lower => {
            let c3 = input.get("c3").and_then(|x| x.as_f64()).unwrap_or(1.0);
            let c4 = input.get("c4").and_then(|x| x.as_f64()).unwrap_or(1.0);
            let b = bounds::lower_bound_eval(
                field_u64(&input, "d")?,
                field_f64(&input, "gamma0")?,
                field_f64(&input, "err_star")?,
                field_u64(&input, "m")?,
                c3,
                c4,
            )?;
            json!({
                "min_m": b.min_m,
                "excess": b.excess,
                "note": "c3 and c4 are existential constants; values other than the defaults are the caller's claim",
            })
        }
        BoundKind::Cost => {
            let calls = bounds::weak_call_count(
                field_u64(&input, "n")?,
                field_u64(&input, "m0")? as u32,
                field_f64(&input, "theta")?,
                field_f64(&input, "delta")?,
                field_f64(&input, "delta0")?,
            )?;
            let combos = match (input.get("pool"), input.get("t")) {
                (Some(p), Some(t)) => Some(
                    bounds::combination_count(
                        p.as_u64().ok_or_else(|| {
                            Error::InvalidParameter("pool must be an integer".into())
                        })?,
                        t.as_u64().ok_or_else(|| {
                            Error::InvalidParameter("t must be an integer".into())
                        })?,
                    )
                    .to_string(),
                ),
                _ => None,
            };
            json!({"weak_calls": calls.to_string(), "combinations": combos})
        }
    };
    println!("{output}");
    Ok(())
}

fn run_experiment(cmd: ExperimentCommand) -> Result<(), Error> {
    match cmd {
        ExperimentCommand::Curve {
            spec,
            class,
            n,
            trials,
            seed,
            out,
            theta,
            delta,
            delta0,
            m0,
            dedup,
            budget,
        } => {
            let spec: harness::SyntheticSpec = serde_json::from_str(&fs::read_to_string(&spec)?)?;
            let class = io::load_tabulated_class(&class)?;
            let cfg = harness::CurveConfig {
                n_grid: n,
                trials,
                seed,
                delta,
                delta0,
                m0,
                theta,
                budget: Budget {
                    weak_calls: budget,
                    combinations: budget,
                },
                dedup: match dedup {
                    DedupArg::Exact => DedupMode::ExactTable,
                    DedupArg::Off => DedupMode::Off,
                },
            };
            let rows = harness::run_curve(&spec, &class, &cfg)?;
            fs::write(&out, harness::curve_csv_string(&rows)?)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        ExperimentCommand::CheckBound { results } => {
            let rows = harness::read_curve_csv(&fs::read_to_string(&results)?)?;
            let check = harness::check_bound(&rows);
            println!("{}", serde_json::to_string_pretty(&check)?);
        }
    }
    Ok(())
}
