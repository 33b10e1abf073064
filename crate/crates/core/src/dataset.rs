//! Fitting datasets: circuits with their observed outcome distributions, a
//! calibration snapshot and a train/validate split. Stored on disk as a
//! directory of schema files plus a manifest.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::{parse_calibration, serialize_calibration, CalibrationError, DeviceCalibration};
use crate::circuit::{parse_circuit, serialize_circuit, Circuit, CircuitError};
use crate::simulator::{bitstring, Counts, CountsError, ProbDist};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Circuit {
        path: PathBuf,
        #[source]
        source: CircuitError,
    },
    #[error("{path}: {source}")]
    Calibration {
        path: PathBuf,
        #[source]
        source: CalibrationError,
    },
    #[error("{path}: {source}")]
    Counts {
        path: PathBuf,
        #[source]
        source: CountsError,
    },
    #[error("circuit `{circuit}` measures {measured} qubits but its observation has {observed} bits")]
    Width {
        circuit: String,
        measured: usize,
        observed: usize,
    },
    #[error("duplicate circuit name `{0}`")]
    DuplicateName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validate,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validate => "validate",
        })
    }
}

/// Splits by measured-qubit count: up to `train_max_qubits` trains, the rest validates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRule {
    pub train_max_qubits: usize,
}

impl Default for SplitRule {
    fn default() -> Self {
        Self { train_max_qubits: 6 }
    }
}

impl SplitRule {
    pub fn assign(&self, c: &Circuit) -> Split {
        if c.measured_qubits().len() <= self.train_max_qubits {
            Split::Train
        } else {
            Split::Validate
        }
    }
}

/// An observed distribution: sampled counts, or an exact distribution
/// standing in for the infinite-shot limit.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    Counts(Counts),
    Exact(ProbDist),
}

impl Observation {
    pub fn probabilities(&self) -> Cow<'_, [f64]> {
        match self {
            Observation::Counts(c) => Cow::Owned(c.frequencies()),
            Observation::Exact(p) => Cow::Borrowed(&p.probs),
        }
    }

    pub fn num_bits(&self) -> usize {
        match self {
            Observation::Counts(c) => c.width(),
            Observation::Exact(p) => p.num_bits(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ObservationDoc {
    Counts(Counts),
    Exact { probabilities: BTreeMap<String, f64> },
}

impl Observation {
    fn to_json(&self) -> String {
        let doc = match self {
            Observation::Counts(c) => ObservationDoc::Counts(c.clone()),
            Observation::Exact(p) => ObservationDoc::Exact {
                probabilities: p
                    .probs
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (bitstring(i, p.num_bits()), v))
                    .collect(),
            },
        };
        serde_json::to_string_pretty(&doc).expect("observation serializes")
    }

    fn from_json(json: &str, qubits: Vec<usize>) -> Result<Self, String> {
        match serde_json::from_str::<ObservationDoc>(json).map_err(|e| e.to_string())? {
            ObservationDoc::Counts(c) => Ok(Observation::Counts(c)),
            ObservationDoc::Exact { probabilities } => {
                let width = qubits.len();
                let mut probs = vec![0.0; 1 << width];
                for (k, v) in probabilities {
                    if k.len() != width {
                        return Err(format!("bitstring `{k}` does not have width {width}"));
                    }
                    let i = usize::from_str_radix(&k, 2).map_err(|e| e.to_string())?;
                    probs[i] = v;
                }
                Ok(Observation::Exact(ProbDist::new(qubits, probs)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub circuit: Circuit,
    pub observed: Observation,
    pub split: Split,
    pub family: String,
}

/// Circuits, observations and the calibration they were taken under.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub calibration: DeviceCalibration,
    pub entries: Vec<DatasetEntry>,
}

impl Dataset {
    pub fn new(calibration: DeviceCalibration, entries: Vec<DatasetEntry>) -> Result<Self, DatasetError> {
        let mut names = std::collections::BTreeSet::new();
        for e in &entries {
            if !names.insert(e.circuit.name()) {
                return Err(DatasetError::DuplicateName(e.circuit.name().to_owned()));
            }
            let measured = e.circuit.measured_qubits().len();
            if measured != e.observed.num_bits() {
                return Err(DatasetError::Width {
                    circuit: e.circuit.name().to_owned(),
                    measured,
                    observed: e.observed.num_bits(),
                });
            }
        }
        Ok(Self { calibration, entries })
    }

    pub fn split(&self, split: Split) -> Vec<&DatasetEntry> {
        self.entries.iter().filter(|e| e.split == split).collect()
    }

    pub fn train(&self) -> Vec<&DatasetEntry> {
        self.split(Split::Train)
    }

    pub fn validate(&self) -> Vec<&DatasetEntry> {
        self.split(Split::Validate)
    }

    /// Re-labels every entry with `rule`.
    pub fn resplit(&mut self, rule: SplitRule) {
        for e in &mut self.entries {
            e.split = rule.assign(&e.circuit);
        }
    }

    pub fn save(&self, dir: &Path) -> Result<(), DatasetError> {
        create_dir(&dir.join("circuits"))?;
        create_dir(&dir.join("observed"))?;
        write(&dir.join("calibration.json"), &serialize_calibration(&self.calibration))?;
        let mut manifest = Manifest::default();
        for e in &self.entries {
            let name = e.circuit.name();
            let circuit = format!("circuits/{name}.json");
            let observed = format!("observed/{name}.json");
            write(&dir.join(&circuit), &serialize_circuit(&e.circuit))?;
            write(&dir.join(&observed), &e.observed.to_json())?;
            manifest.entries.push(ManifestEntry {
                name: name.to_owned(),
                family: e.family.clone(),
                num_qubits: e.circuit.num_qubits(),
                seed: e.circuit.meta().get("seed").and_then(|s| s.parse().ok()),
                split: e.split,
                circuit,
                observed: Some(observed),
            });
        }
        write(
            &dir.join("manifest.json"),
            &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
        )
    }

    pub fn load(dir: &Path) -> Result<Self, DatasetError> {
        let cal_path = dir.join("calibration.json");
        let calibration = parse_calibration(&read(&cal_path)?).map_err(|source| DatasetError::Calibration {
            path: cal_path.clone(),
            source,
        })?;
        let manifest_path = dir.join("manifest.json");
        let manifest: Manifest =
            serde_json::from_str(&read(&manifest_path)?).map_err(|e| DatasetError::Format {
                path: manifest_path.clone(),
                message: e.to_string(),
            })?;
        let mut entries = Vec::with_capacity(manifest.entries.len());
        for m in manifest.entries {
            let cpath = dir.join(&m.circuit);
            let circuit = parse_circuit(&read(&cpath)?).map_err(|source| DatasetError::Circuit {
                path: cpath.clone(),
                source,
            })?;
            let opath = dir.join(m.observed.as_deref().ok_or_else(|| DatasetError::Format {
                path: manifest_path.clone(),
                message: format!("circuit `{}` has no observed distribution", m.name),
            })?);
            let observed = Observation::from_json(&read(&opath)?, circuit.measured_qubits())
                .map_err(|message| DatasetError::Format { path: opath, message })?;
            entries.push(DatasetEntry {
                circuit,
                observed,
                split: m.split,
                family: m.family,
            });
        }
        Dataset::new(calibration, entries)
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

/// Writes circuits and a circuit-only manifest (no observations).
pub fn save_circuits(dir: &Path, circuits: &[(Circuit, String, Split)]) -> Result<(), DatasetError> {
    create_dir(&dir.join("circuits"))?;
    let mut manifest = Manifest::default();
    for (c, family, split) in circuits {
        let path = format!("circuits/{}.json", c.name());
        write(&dir.join(&path), &serialize_circuit(c))?;
        manifest.entries.push(ManifestEntry {
            name: c.name().to_owned(),
            family: family.clone(),
            num_qubits: c.num_qubits(),
            seed: c.meta().get("seed").and_then(|s| s.parse().ok()),
            split: *split,
            circuit: path,
            observed: None,
        });
    }
    write(
        &dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub family: String,
    pub num_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub split: Split,
    pub circuit: String,
    /// Absent for circuit-only manifests written by the generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<String>,
}

pub(crate) fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<(), DatasetError> {
    fs::write(path, contents).map_err(|source| DatasetError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn create_dir(path: &Path) -> Result<(), DatasetError> {
    fs::create_dir_all(path).map_err(|source| DatasetError::Io {
        path: path.to_owned(),
        source,
    })
}
