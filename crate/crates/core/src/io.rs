//! File formats.
//!
//! Dataset CSV: header `x,y` for finite-domain data (x is a 0-based domain
//! index) or `f0,...,f{r-1},y` for feature vectors; labels are -1 or 1.
//! Tabulated class JSON: `{"domain_size": N, "hypotheses": [[1,-1,...],..]}`.
//! Finite distribution JSON: `{"atoms": [{"x": i, "y": 1, "p": 0.25}, ...]}`.
//! Voters serialize with their member hypotheses and, when they came out of
//! a boost run, per-member provenance.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::booster::BoostOutcome;
use crate::data::{Atom, Dataset, Example, FiniteDistribution, Label, Point};
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, VotingClassifier, WeightedVoter};
use crate::seed::Seed;
use crate::vc::TabulatedClass;

pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    parse_dataset_csv(&fs::read_to_string(path)?)
}

pub fn parse_dataset_csv(text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let columns: Vec<&str> = headers.iter().collect();

    let finite = columns == ["x", "y"];
    if !finite {
        let feature_like = columns.len() >= 2
            && columns.last() == Some(&"y")
            && columns[..columns.len() - 1]
                .iter()
                .enumerate()
                .all(|(i, c)| *c == format!("f{i}"));
        if !feature_like {
            return Err(Error::MalformedFile(format!(
                "dataset header must be x,y or f0,..,f{{r-1}},y; got {columns:?}"
            )));
        }
    }

    let mut examples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        if record.len() != columns.len() {
            return Err(Error::MalformedFile(format!(
                "row {row}: {} fields, expected {}",
                record.len(),
                columns.len()
            )));
        }
        let label_text = record.get(record.len() - 1).unwrap();
        let label_value: i8 = label_text
            .parse()
            .map_err(|_| Error::MalformedFile(format!("row {row}: bad label {label_text:?}")))?;
        let label = Label::new(label_value)?;
        let point = if finite {
            let x: usize = record
                .get(0)
                .unwrap()
                .parse()
                .map_err(|_| Error::MalformedFile(format!("row {row}: bad domain index")))?;
            Point::Finite(x)
        } else {
            let mut features = Vec::with_capacity(record.len() - 1);
            for j in 0..record.len() - 1 {
                let v: f64 = record.get(j).unwrap().parse().map_err(|_| {
                    Error::MalformedFile(format!("row {row}: bad feature f{j}"))
                })?;
                features.push(v);
            }
            Point::Features(features)
        };
        examples.push(Example::new(point, label));
    }
    Ok(Dataset::new(examples))
}

pub fn write_dataset_csv(s: &Dataset, path: &Path) -> Result<()> {
    fs::write(path, dataset_csv_string(s)?)?;
    Ok(())
}

pub fn dataset_csv_string(s: &Dataset) -> Result<String> {
    let mut out = String::new();
    let finite = match s.get(0).map(|e| &e.point) {
        None | Some(Point::Finite(_)) => true,
        Some(Point::Features(_)) => false,
    };
    if finite {
        out.push_str("x,y\n");
        for e in s.iter() {
            match &e.point {
                Point::Finite(x) => {
                    out.push_str(&format!("{x},{}\n", e.label.value()));
                }
                Point::Features(_) => {
                    return Err(Error::RepresentationMismatch(
                        "mixed point representations in dataset".into(),
                    ))
                }
            }
        }
    } else {
        let dim = match &s.get(0).unwrap().point {
            Point::Features(fs) => fs.len(),
            Point::Finite(_) => unreachable!(),
        };
        let header: Vec<String> = (0..dim).map(|i| format!("f{i}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",y\n");
        for e in s.iter() {
            match &e.point {
                Point::Features(fs) if fs.len() == dim => {
                    let fields: Vec<String> = fs.iter().map(|v| v.to_string()).collect();
                    out.push_str(&fields.join(","));
                    out.push_str(&format!(",{}\n", e.label.value()));
                }
                _ => {
                    return Err(Error::RepresentationMismatch(
                        "inconsistent feature dimensions in dataset".into(),
                    ))
                }
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct TabulatedClassFile {
    domain_size: usize,
    hypotheses: Vec<Vec<i8>>,
}

pub fn load_tabulated_class(path: &Path) -> Result<TabulatedClass> {
    let file: TabulatedClassFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    TabulatedClass::new(file.domain_size, file.hypotheses)
}

pub fn save_tabulated_class(class: &TabulatedClass, path: &Path) -> Result<()> {
    let file = TabulatedClassFile {
        domain_size: class.domain_size(),
        hypotheses: class.rows().to_vec(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    atoms: Vec<Atom>,
}

/// Load a finite distribution; the domain size is the largest point index
/// plus one.
pub fn load_distribution(path: &Path) -> Result<FiniteDistribution> {
    let file: DistributionFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    let domain_size = file
        .atoms
        .iter()
        .map(|a| a.x + 1)
        .max()
        .ok_or_else(|| Error::MalformedFile("distribution has no atoms".into()))?;
    FiniteDistribution::new(domain_size, file.atoms)
}

pub fn save_distribution(d: &FiniteDistribution, path: &Path) -> Result<()> {
    let file = DistributionFile {
        atoms: d.atoms.clone(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Where a voter member came from: its pool entry and the call that made it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberProvenance {
    pub pool_index: usize,
    pub round: u64,
    pub repeat: u64,
    pub subsample: Vec<usize>,
    pub seed: Seed,
}

#[derive(Serialize, Deserialize)]
struct VoterFile {
    members: Vec<Hypothesis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Vec<MemberProvenance>>,
}

pub fn voter_json(outcome: &BoostOutcome) -> Result<String> {
    let provenance = outcome
        .report
        .selected
        .iter()
        .map(|&i| {
            let entry = &outcome.pool.entries[i];
            MemberProvenance {
                pool_index: i,
                round: entry.round,
                repeat: entry.repeat,
                subsample: entry.subsample.clone(),
                seed: entry.seed,
            }
        })
        .collect();
    let file = VoterFile {
        members: outcome.voter.members().to_vec(),
        provenance: Some(provenance),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn save_voter_plain(voter: &VotingClassifier, path: &Path) -> Result<()> {
    let file = VoterFile {
        members: voter.members().to_vec(),
        provenance: None,
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_voter(path: &Path) -> Result<VotingClassifier> {
    let file: VoterFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    for member in &file.members {
        validate_hypothesis(member)?;
    }
    VotingClassifier::new(file.members)
}

#[derive(Serialize, Deserialize)]
struct WeightedVoterFile {
    pairs: Vec<WeightedPair>,
}

#[derive(Serialize, Deserialize)]
struct WeightedPair {
    hypothesis: Hypothesis,
    weight: f64,
}

pub fn load_weighted_voter(path: &Path) -> Result<WeightedVoter> {
    let file: WeightedVoterFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    let mut pairs = Vec::with_capacity(file.pairs.len());
    for p in file.pairs {
        validate_hypothesis(&p.hypothesis)?;
        pairs.push((p.hypothesis, p.weight));
    }
    WeightedVoter::new(pairs)
}

pub fn save_weighted_voter(v: &WeightedVoter, path: &Path) -> Result<()> {
    let file = WeightedVoterFile {
        pairs: v
            .pairs()
            .iter()
            .map(|(h, w)| WeightedPair {
                hypothesis: h.clone(),
                weight: *w,
            })
            .collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

fn validate_hypothesis(h: &Hypothesis) -> Result<()> {
    // Re-run the constructor checks that derived deserialization skips.
    match h {
        Hypothesis::Tabulated { values } => {
            Hypothesis::tabulated(values.clone())?;
        }
        Hypothesis::Stump {
            feature,
            threshold,
            polarity,
        } => {
            Hypothesis::stump(*feature, *threshold, *polarity)?;
        }
    }
    Ok(())
}
