//! Gate-level circuit representation, JSON ingestion and structural statistics.
//!
//! The gate set is the IBM-style native basis `{id, rz, sx, x, cx, cz}` plus terminal
//! `measure`. Circuits are validated on construction and immutable afterwards.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tag of a gate kind, without its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateTag {
    Id,
    Rz,
    Sx,
    X,
    Cx,
    Cz,
    Measure,
}

impl GateTag {
    pub const ALL: [GateTag; 7] = [
        GateTag::Id,
        GateTag::Rz,
        GateTag::Sx,
        GateTag::X,
        GateTag::Cx,
        GateTag::Cz,
        GateTag::Measure,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateTag::Cx | GateTag::Cz => 2,
            _ => 1,
        }
    }

    pub fn is_two_qubit(self) -> bool {
        self.arity() == 2
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateTag::Id => "id",
            GateTag::Rz => "rz",
            GateTag::Sx => "sx",
            GateTag::X => "x",
            GateTag::Cx => "cx",
            GateTag::Cz => "cz",
            GateTag::Measure => "measure",
        }
    }

    pub fn parse(s: &str) -> Option<GateTag> {
        GateTag::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for GateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A gate kind. Only `rz` carries an angle (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    Id,
    Rz(f64),
    Sx,
    X,
    Cx,
    Cz,
    Measure,
}

impl GateKind {
    pub fn tag(&self) -> GateTag {
        match self {
            GateKind::Id => GateTag::Id,
            GateKind::Rz(_) => GateTag::Rz,
            GateKind::Sx => GateTag::Sx,
            GateKind::X => GateTag::X,
            GateKind::Cx => GateTag::Cx,
            GateKind::Cz => GateTag::Cz,
            GateKind::Measure => GateTag::Measure,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            GateKind::Rz(a) => Some(*a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Gate duration in seconds overriding the calibrated value.
    pub duration_override: Option<f64>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self {
            kind,
            qubits,
            duration_override: None,
        }
    }

    pub fn tag(&self) -> GateTag {
        self.kind.tag()
    }

    pub fn is_measure(&self) -> bool {
        matches!(self.kind, GateKind::Measure)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("malformed circuit JSON: {0}")]
    Json(String),
    #[error("unknown gate tag `{0}`")]
    UnknownGate(String),
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("op {op}: `{tag}` expects {expected} qubit(s), got {got}")]
    Arity {
        op: usize,
        tag: GateTag,
        expected: usize,
        got: usize,
    },
    #[error("op {op}: qubit index {qubit} out of range for {num_qubits} qubit(s)")]
    QubitOutOfRange {
        op: usize,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("op {op}: repeated qubit {qubit}")]
    RepeatedQubit { op: usize, qubit: usize },
    #[error("op {op}: rz requires an angle")]
    MissingAngle { op: usize },
    #[error("op {op}: `{tag}` does not take an angle")]
    UnexpectedAngle { op: usize, tag: GateTag },
    #[error("op {op}: non-finite angle or duration")]
    NonFinite { op: usize },
    #[error("op {op}: qubit {qubit} measured more than once")]
    DoubleMeasure { op: usize, qubit: usize },
    #[error("op {op}: gate on qubit {qubit} after its measurement")]
    GateAfterMeasure { op: usize, qubit: usize },
}

/// A validated circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    name: String,
    num_qubits: usize,
    ops: Vec<GateOp>,
    meta: BTreeMap<String, String>,
}

impl Circuit {
    pub fn new(
        name: impl Into<String>,
        num_qubits: usize,
        ops: Vec<GateOp>,
        meta: BTreeMap<String, String>,
    ) -> Result<Self, CircuitError> {
        let c = Self {
            name: name.into(),
            num_qubits,
            ops,
            meta,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    /// Measured qubits in ascending index order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self
            .ops
            .iter()
            .filter(|op| op.is_measure())
            .map(|op| op.qubits[0])
            .collect();
        m.sort_unstable();
        m
    }

    fn validate(&self) -> Result<(), CircuitError> {
        if self.num_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        let mut measured = vec![false; self.num_qubits];
        for (i, op) in self.ops.iter().enumerate() {
            let tag = op.tag();
            if op.qubits.len() != tag.arity() {
                return Err(CircuitError::Arity {
                    op: i,
                    tag,
                    expected: tag.arity(),
                    got: op.qubits.len(),
                });
            }
            for (k, &q) in op.qubits.iter().enumerate() {
                if q >= self.num_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        op: i,
                        qubit: q,
                        num_qubits: self.num_qubits,
                    });
                }
                if op.qubits[..k].contains(&q) {
                    return Err(CircuitError::RepeatedQubit { op: i, qubit: q });
                }
            }
            if let Some(a) = op.kind.angle() {
                if !a.is_finite() {
                    return Err(CircuitError::NonFinite { op: i });
                }
            }
            if let Some(d) = op.duration_override {
                if !d.is_finite() || d < 0.0 {
                    return Err(CircuitError::NonFinite { op: i });
                }
            }
            for &q in &op.qubits {
                if measured[q] {
                    return Err(if op.is_measure() {
                        CircuitError::DoubleMeasure { op: i, qubit: q }
                    } else {
                        CircuitError::GateAfterMeasure { op: i, qubit: q }
                    });
                }
            }
            if op.is_measure() {
                measured[op.qubits[0]] = true;
            }
        }
        Ok(())
    }
}

/// Incremental construction helper used by the generators.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    name: String,
    num_qubits: usize,
    ops: Vec<GateOp>,
    meta: BTreeMap<String, String>,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>, num_qubits: usize) -> Self {
        Self {
            name: name.into(),
            num_qubits,
            ops: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn op(&mut self, kind: GateKind, qubits: &[usize]) -> &mut Self {
        self.ops.push(GateOp::new(kind, qubits.to_vec()));
        self
    }

    pub fn id(&mut self, q: usize) -> &mut Self {
        self.op(GateKind::Id, &[q])
    }

    pub fn rz(&mut self, q: usize, angle: f64) -> &mut Self {
        self.op(GateKind::Rz(angle), &[q])
    }

    pub fn sx(&mut self, q: usize) -> &mut Self {
        self.op(GateKind::Sx, &[q])
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.op(GateKind::X, &[q])
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.op(GateKind::Cx, &[control, target])
    }

    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.op(GateKind::Cz, &[a, b])
    }

    /// Hadamard up to global phase: `rz(π/2) sx rz(π/2)`.
    pub fn h(&mut self, q: usize) -> &mut Self {
        use std::f64::consts::FRAC_PI_2;
        self.rz(q, FRAC_PI_2).sx(q).rz(q, FRAC_PI_2)
    }

    /// General single-qubit rotation `U3(θ, φ, λ)` up to global phase, as
    /// `rz(λ) sx rz(θ+π) sx rz(φ+π)` in time order.
    pub fn u3(&mut self, q: usize, theta: f64, phi: f64, lambda: f64) -> &mut Self {
        use std::f64::consts::PI;
        self.rz(q, lambda)
            .sx(q)
            .rz(q, theta + PI)
            .sx(q)
            .rz(q, phi + PI)
    }

    pub fn rx(&mut self, q: usize, theta: f64) -> &mut Self {
        use std::f64::consts::FRAC_PI_2;
        self.u3(q, theta, -FRAC_PI_2, FRAC_PI_2)
    }

    pub fn ry(&mut self, q: usize, theta: f64) -> &mut Self {
        self.u3(q, theta, 0.0, 0.0)
    }

    pub fn measure(&mut self, q: usize) -> &mut Self {
        self.op(GateKind::Measure, &[q])
    }

    pub fn measure_all(&mut self) -> &mut Self {
        for q in 0..self.num_qubits {
            self.measure(q);
        }
        self
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    pub fn build(&self) -> Result<Circuit, CircuitError> {
        Circuit::new(
            self.name.clone(),
            self.num_qubits,
            self.ops.clone(),
            self.meta.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CircuitStats {
    pub depth: usize,
    pub two_qubit_gates: usize,
    pub single_qubit_gates: usize,
}

/// Structural statistics. Depth uses greedy ASAP layering and counts
/// measurements; gate counts exclude them.
pub fn circuit_stats(c: &Circuit) -> CircuitStats {
    let mut level = vec![0usize; c.num_qubits()];
    let mut stats = CircuitStats::default();
    for op in c.ops() {
        let layer = op.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in &op.qubits {
            level[q] = layer;
        }
        match op.tag() {
            GateTag::Measure => {}
            t if t.is_two_qubit() => stats.two_qubit_gates += 1,
            _ => stats.single_qubit_gates += 1,
        }
    }
    stats.depth = level.into_iter().max().unwrap_or(0);
    stats
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct OpDoc {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duration_override: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CircuitDoc {
    #[serde(default)]
    name: String,
    num_qubits: usize,
    ops: Vec<OpDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    meta: BTreeMap<String, String>,
}

impl CircuitDoc {
    fn into_circuit(self) -> Result<Circuit, CircuitError> {
        let mut ops = Vec::with_capacity(self.ops.len());
        for (i, o) in self.ops.into_iter().enumerate() {
            let tag = GateTag::parse(&o.kind).ok_or(CircuitError::UnknownGate(o.kind))?;
            let kind = match (tag, o.angle) {
                (GateTag::Rz, Some(a)) => GateKind::Rz(a),
                (GateTag::Rz, None) => return Err(CircuitError::MissingAngle { op: i }),
                (tag, Some(_)) => return Err(CircuitError::UnexpectedAngle { op: i, tag }),
                (GateTag::Id, None) => GateKind::Id,
                (GateTag::Sx, None) => GateKind::Sx,
                (GateTag::X, None) => GateKind::X,
                (GateTag::Cx, None) => GateKind::Cx,
                (GateTag::Cz, None) => GateKind::Cz,
                (GateTag::Measure, None) => GateKind::Measure,
            };
            ops.push(GateOp {
                kind,
                qubits: o.qubits,
                duration_override: o.duration_override,
            });
        }
        Circuit::new(self.name, self.num_qubits, ops, self.meta)
    }

    fn from_circuit(c: &Circuit) -> Self {
        CircuitDoc {
            name: c.name.clone(),
            num_qubits: c.num_qubits,
            ops: c
                .ops
                .iter()
                .map(|op| OpDoc {
                    kind: op.tag().as_str().to_owned(),
                    qubits: op.qubits.clone(),
                    angle: op.kind.angle(),
                    duration_override: op.duration_override,
                })
                .collect(),
            meta: c.meta.clone(),
        }
    }
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CircuitDoc::from_circuit(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        CircuitDoc::deserialize(d)?
            .into_circuit()
            .map_err(serde::de::Error::custom)
    }
}

/// Parses a single circuit document.
pub fn parse_circuit(json: &str) -> Result<Circuit, CircuitError> {
    let doc: CircuitDoc =
        serde_json::from_str(json).map_err(|e| CircuitError::Json(e.to_string()))?;
    doc.into_circuit()
}

/// Parses either a single circuit document or an array of them.
pub fn parse_circuits(json: &str) -> Result<Vec<Circuit>, CircuitError> {
    let value: serde_json::Value =
        serde_json::from_str(json).map_err(|e| CircuitError::Json(e.to_string()))?;
    let docs: Vec<CircuitDoc> = if value.is_array() {
        serde_json::from_value(value).map_err(|e| CircuitError::Json(e.to_string()))?
    } else {
        vec![serde_json::from_value(value).map_err(|e| CircuitError::Json(e.to_string()))?]
    };
    docs.into_iter().map(CircuitDoc::into_circuit).collect()
}

pub fn serialize_circuit(c: &Circuit) -> String {
    serde_json::to_string_pretty(&CircuitDoc::from_circuit(c)).expect("circuit serializes")
}
