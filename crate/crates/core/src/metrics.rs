//! Hellinger distance, the mean-distance training objective and the
//! calibration-based circuit fidelity estimate.

use std::borrow::Cow;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::DeviceCalibration;
use crate::circuit::{Circuit, GateTag};
use crate::dataset::DatasetEntry;
use crate::noise::{build_default_model, build_parameterized_model, ClampTally, ModelError, NoiseModel, NoiseParams};
use crate::simulator::{simulate, Counts, ProbDist, SimError, SimOptions};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("outcome spaces differ: {0} vs {1} outcomes")]
    OutcomeSpace(usize, usize),
    #[error("distribution has zero total mass")]
    EmptyDistribution,
    #[error("objective needs at least one circuit")]
    EmptyDataset,
    #[error("circuit `{circuit}`: {source}")]
    Simulation {
        circuit: String,
        #[source]
        source: SimError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no calibration for `{tag}` on qubits {qubits:?}")]
    MissingCalibration { tag: GateTag, qubits: Vec<usize> },
}

/// Anything that can be viewed as a distribution over `2^n` outcomes.
pub trait Distribution {
    fn probabilities(&self) -> Cow<'_, [f64]>;
}

impl Distribution for ProbDist {
    fn probabilities(&self) -> Cow<'_, [f64]> {
        Cow::Borrowed(&self.probs)
    }
}

impl Distribution for Counts {
    fn probabilities(&self) -> Cow<'_, [f64]> {
        Cow::Owned(self.frequencies())
    }
}

impl Distribution for [f64] {
    fn probabilities(&self) -> Cow<'_, [f64]> {
        Cow::Borrowed(self)
    }
}

impl Distribution for Vec<f64> {
    fn probabilities(&self) -> Cow<'_, [f64]> {
        Cow::Borrowed(self)
    }
}

/// `D_H = sqrt(1 - Σ sqrt(p_j q_j))` on normalized inputs, evaluated as the
/// equivalent `sqrt(½ Σ (√p_j - √q_j)²)`, which is exactly zero for equal
/// inputs and exactly symmetric.
pub fn hellinger<P: Distribution + ?Sized, Q: Distribution + ?Sized>(p: &P, q: &Q) -> Result<f64, MetricError> {
    let p = p.probabilities();
    let q = q.probabilities();
    if p.len() != q.len() {
        return Err(MetricError::OutcomeSpace(p.len(), q.len()));
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if sp <= 0.0 || sq <= 0.0 {
        return Err(MetricError::EmptyDistribution);
    }
    let sum: f64 = p
        .iter()
        .zip(q.iter())
        .map(|(&a, &b)| {
            let d = (a.max(0.0) / sp).sqrt() - (b.max(0.0) / sq).sqrt();
            d * d
        })
        .sum();
    Ok((0.5 * sum).sqrt().min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    pub per_circuit: Vec<(String, f64)>,
    pub mean: f64,
}

impl ObjectiveReport {
    /// Entries are ordered by circuit name, so the report and its mean do not
    /// depend on dataset order.
    pub fn from_values(mut per_circuit: Vec<(String, f64)>) -> Result<Self, MetricError> {
        if per_circuit.is_empty() {
            return Err(MetricError::EmptyDataset);
        }
        per_circuit.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mean = per_circuit.iter().map(|(_, v)| v).sum::<f64>() / per_circuit.len() as f64;
        Ok(Self { per_circuit, mean })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.per_circuit.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("circuit,d_h\n");
        for (n, v) in &self.per_circuit {
            s.push_str(&format!("{n},{v:.17e}\n"));
        }
        s
    }
}

/// Objective value plus the clamp events raised while building its models.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: ObjectiveReport,
    pub clamps: ClampTally,
}

/// Evaluates a model family on a set of circuits. `build` is called once per
/// distinct measured-qubit set; circuits are simulated in parallel.
pub fn evaluate_with<F>(entries: &[&DatasetEntry], opts: &SimOptions, build: F) -> Result<Evaluation, MetricError>
where
    F: Fn(&[usize]) -> Result<NoiseModel, ModelError>,
{
    if entries.is_empty() {
        return Err(MetricError::EmptyDataset);
    }
    let mut models: BTreeMap<Vec<usize>, NoiseModel> = BTreeMap::new();
    let mut clamps = ClampTally::default();
    for e in entries {
        let measured = e.circuit.measured_qubits();
        if !models.contains_key(&measured) {
            let m = build(&measured)?;
            clamps.merge(m.clamps());
            models.insert(measured, m);
        }
    }
    let per_circuit = entries
        .par_iter()
        .map(|e| {
            let model = &models[&e.circuit.measured_qubits()];
            let predicted = simulate(&e.circuit, Some(model), opts).map_err(|source| MetricError::Simulation {
                circuit: e.circuit.name().to_owned(),
                source,
            })?;
            let d = hellinger(&e.observed.probabilities()[..], &predicted)?;
            Ok((e.circuit.name().to_owned(), d))
        })
        .collect::<Result<Vec<_>, MetricError>>()?;
    Ok(Evaluation {
        report: ObjectiveReport::from_values(per_circuit)?,
        clamps,
    })
}

/// Mean Hellinger distance between the parameterized model's predictions and
/// the observed distributions.
pub fn mean_objective(
    params: &NoiseParams,
    entries: &[&DatasetEntry],
    cal: &DeviceCalibration,
    opts: &SimOptions,
) -> Result<ObjectiveReport, MetricError> {
    Ok(evaluate_with(entries, opts, |m| build_parameterized_model(params, cal, m))?.report)
}

/// The same objective under the calibration-derived default model.
pub fn default_objective(
    entries: &[&DatasetEntry],
    cal: &DeviceCalibration,
    opts: &SimOptions,
) -> Result<ObjectiveReport, MetricError> {
    Ok(evaluate_with(entries, opts, |m| build_default_model(cal, m))?.report)
}

/// `F = Π (1 - ε)` over every non-virtual gate error and every measured
/// qubit's mean readout error.
pub fn circuit_fidelity_estimate(c: &Circuit, cal: &DeviceCalibration) -> Result<f64, MetricError> {
    let missing = |tag: GateTag, qubits: &[usize]| MetricError::MissingCalibration {
        tag,
        qubits: qubits.to_vec(),
    };
    let mut f = 1.0;
    for op in c.ops() {
        let tag = op.tag();
        let eps = match tag {
            GateTag::Rz => continue,
            GateTag::Measure => cal
                .qubit(op.qubits[0])
                .ok_or_else(|| missing(tag, &op.qubits))?
                .readout_error(),
            GateTag::Cx | GateTag::Cz => cal
                .edge(op.qubits[0], op.qubits[1])
                .filter(|e| e.gate == tag)
                .ok_or_else(|| missing(tag, &op.qubits))?
                .error,
            _ => {
                cal.qubit(op.qubits[0])
                    .and_then(|q| q.gate(tag))
                    .ok_or_else(|| missing(tag, &op.qubits))?
                    .error
            }
        };
        f *= 1.0 - eps;
    }
    Ok(f)
}
