//! Device calibration snapshots, derived coherence quantities and the
//! coupling-map pair matching used by the correlated readout model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::GateTag;

#[derive(Debug, Error, PartialEq)]
pub enum CalibrationError {
    #[error("malformed calibration JSON: {0}")]
    Json(String),
    #[error("non-physical value: {0}")]
    NonPhysical(String),
    #[error("calibration lists {listed} qubits but num_qubits = {declared}")]
    QubitCount { declared: usize, listed: usize },
    #[error("edge ({0}, {1}) references an invalid qubit or repeats one")]
    BadEdge(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge gate must be cx or cz, got `{0}`")]
    EdgeGate(GateTag),
    #[error("cannot derive {0}: no gate durations of that arity")]
    NoCharacteristicTime(&'static str),
}

/// Error rate and duration of one gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateCal {
    pub error: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitCal {
    pub t1: f64,
    pub t2: f64,
    /// P(measure 1 | prepared 0).
    pub readout_p01: f64,
    /// P(measure 0 | prepared 1).
    pub readout_p10: f64,
    #[serde(default)]
    pub gates: BTreeMap<GateTag, GateCal>,
}

impl QubitCal {
    pub fn gate(&self, tag: GateTag) -> Option<&GateCal> {
        self.gates.get(&tag)
    }

    /// Mean of the two asymmetric readout error rates.
    pub fn readout_error(&self) -> f64 {
        0.5 * (self.readout_p01 + self.readout_p10)
    }

    pub fn t_phi(&self) -> f64 {
        pure_dephasing_time(self.t1, self.t2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCal {
    /// Stored as (min, max).
    pub qubits: (usize, usize),
    pub gate: GateTag,
    pub error: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceCalibration {
    num_qubits: usize,
    qubits: Vec<QubitCal>,
    edges: Vec<EdgeCal>,
    t_char_1q: f64,
    t_char_2q: f64,
}

impl DeviceCalibration {
    /// Validates a snapshot. Missing characteristic times default to the
    /// median calibrated gate duration of the matching arity (zero-duration
    /// virtual gates excluded).
    pub fn new(
        qubits: Vec<QubitCal>,
        edges: Vec<EdgeCal>,
        t_char_1q: Option<f64>,
        t_char_2q: Option<f64>,
    ) -> Result<Self, CalibrationError> {
        let n = qubits.len();
        let mut edges = edges;
        for (q, qc) in qubits.iter().enumerate() {
            check_time(qc.t1, &format!("qubit {q} t1"))?;
            check_time(qc.t2, &format!("qubit {q} t2"))?;
            check_prob(qc.readout_p01, &format!("qubit {q} readout_p01"))?;
            check_prob(qc.readout_p10, &format!("qubit {q} readout_p10"))?;
            for (tag, g) in &qc.gates {
                check_prob(g.error, &format!("qubit {q} {tag} error"))?;
                check_duration(g.duration, &format!("qubit {q} {tag} duration"))?;
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &mut edges {
            let (a, b) = e.qubits;
            if a == b || a >= n || b >= n {
                return Err(CalibrationError::BadEdge(a, b));
            }
            e.qubits = (a.min(b), a.max(b));
            if !seen.insert(e.qubits) {
                return Err(CalibrationError::DuplicateEdge(e.qubits.0, e.qubits.1));
            }
            if !e.gate.is_two_qubit() {
                return Err(CalibrationError::EdgeGate(e.gate));
            }
            check_prob(e.error, &format!("edge {a}-{b} error"))?;
            check_duration(e.duration, &format!("edge {a}-{b} duration"))?;
        }
        let t_char_1q = match t_char_1q {
            Some(t) => t,
            None => median(
                qubits
                    .iter()
                    .flat_map(|q| q.gates.values().map(|g| g.duration))
                    .filter(|&d| d > 0.0)
                    .collect(),
            )
            .ok_or(CalibrationError::NoCharacteristicTime("t_char_1q"))?,
        };
        let t_char_2q = match t_char_2q {
            Some(t) => t,
            None => median(edges.iter().map(|e| e.duration).filter(|&d| d > 0.0).collect())
                .ok_or(CalibrationError::NoCharacteristicTime("t_char_2q"))?,
        };
        check_time(t_char_1q, "t_char_1q")?;
        check_time(t_char_2q, "t_char_2q")?;
        Ok(Self {
            num_qubits: n,
            qubits,
            edges,
            t_char_1q,
            t_char_2q,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn qubits(&self) -> &[QubitCal] {
        &self.qubits
    }

    pub fn qubit(&self, q: usize) -> Option<&QubitCal> {
        self.qubits.get(q)
    }

    pub fn edges(&self) -> &[EdgeCal] {
        &self.edges
    }

    /// Edge lookup, insensitive to the order of `a` and `b`.
    pub fn edge(&self, a: usize, b: usize) -> Option<&EdgeCal> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.qubits == key)
    }

    pub fn t_char_1q(&self) -> f64 {
        self.t_char_1q
    }

    pub fn t_char_2q(&self) -> f64 {
        self.t_char_2q
    }
}

fn check_prob(p: f64, what: &str) -> Result<(), CalibrationError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CalibrationError::NonPhysical(format!("{what} = {p} not in [0, 1]")))
    }
}

fn check_time(t: f64, what: &str) -> Result<(), CalibrationError> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(CalibrationError::NonPhysical(format!("{what} = {t} must be finite and positive")))
    }
}

fn check_duration(t: f64, what: &str) -> Result<(), CalibrationError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(CalibrationError::NonPhysical(format!("{what} = {t} must be finite and non-negative")))
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Pure dephasing time from `1/T2 = 1/(2 T1) + 1/Tφ`; infinite when the
/// snapshot implies no pure dephasing (`T2 ≥ 2 T1`).
pub fn pure_dephasing_time(t1: f64, t2: f64) -> f64 {
    let rate = 1.0 / t2 - 1.0 / (2.0 * t1);
    if rate <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / rate
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GateCalDoc {
    error: f64,
    duration: f64,
}

#[derive(Serialize, Deserialize)]
struct QubitDoc {
    t1: f64,
    t2: f64,
    readout_p01: f64,
    readout_p10: f64,
    #[serde(default)]
    gates: BTreeMap<String, GateCalDoc>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    qubits: [usize; 2],
    gate: String,
    error: f64,
    duration: f64,
}

#[derive(Serialize, Deserialize)]
struct CalibrationDoc {
    num_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_char_1q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_char_2q: Option<f64>,
    qubits: Vec<QubitDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
}

fn parse_tag(s: &str) -> Result<GateTag, CalibrationError> {
    GateTag::parse(s).ok_or_else(|| CalibrationError::Json(format!("unknown gate tag `{s}`")))
}

impl CalibrationDoc {
    fn into_calibration(self) -> Result<DeviceCalibration, CalibrationError> {
        if self.qubits.len() != self.num_qubits {
            return Err(CalibrationError::QubitCount {
                declared: self.num_qubits,
                listed: self.qubits.len(),
            });
        }
        let qubits = self
            .qubits
            .into_iter()
            .map(|q| {
                let gates = q
                    .gates
                    .into_iter()
                    .map(|(k, g)| {
                        Ok((
                            parse_tag(&k)?,
                            GateCal {
                                error: g.error,
                                duration: g.duration,
                            },
                        ))
                    })
                    .collect::<Result<_, CalibrationError>>()?;
                Ok(QubitCal {
                    t1: q.t1,
                    t2: q.t2,
                    readout_p01: q.readout_p01,
                    readout_p10: q.readout_p10,
                    gates,
                })
            })
            .collect::<Result<Vec<_>, CalibrationError>>()?;
        let edges = self
            .edges
            .into_iter()
            .map(|e| {
                Ok(EdgeCal {
                    qubits: (e.qubits[0], e.qubits[1]),
                    gate: parse_tag(&e.gate)?,
                    error: e.error,
                    duration: e.duration,
                })
            })
            .collect::<Result<Vec<_>, CalibrationError>>()?;
        DeviceCalibration::new(qubits, edges, self.t_char_1q, self.t_char_2q)
    }

    fn from_calibration(c: &DeviceCalibration) -> Self {
        CalibrationDoc {
            num_qubits: c.num_qubits,
            t_char_1q: Some(c.t_char_1q),
            t_char_2q: Some(c.t_char_2q),
            qubits: c
                .qubits
                .iter()
                .map(|q| QubitDoc {
                    t1: q.t1,
                    t2: q.t2,
                    readout_p01: q.readout_p01,
                    readout_p10: q.readout_p10,
                    gates: q
                        .gates
                        .iter()
                        .map(|(t, g)| {
                            (
                                t.as_str().to_owned(),
                                GateCalDoc {
                                    error: g.error,
                                    duration: g.duration,
                                },
                            )
                        })
                        .collect(),
                })
                .collect(),
            edges: c
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    qubits: [e.qubits.0, e.qubits.1],
                    gate: e.gate.as_str().to_owned(),
                    error: e.error,
                    duration: e.duration,
                })
                .collect(),
        }
    }
}

pub fn parse_calibration(json: &str) -> Result<DeviceCalibration, CalibrationError> {
    let doc: CalibrationDoc =
        serde_json::from_str(json).map_err(|e| CalibrationError::Json(e.to_string()))?;
    doc.into_calibration()
}

pub fn serialize_calibration(c: &DeviceCalibration) -> String {
    serde_json::to_string_pretty(&CalibrationDoc::from_calibration(c))
        .expect("calibration serializes")
}

impl Serialize for DeviceCalibration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CalibrationDoc::from_calibration(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DeviceCalibration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        CalibrationDoc::deserialize(d)?
            .into_calibration()
            .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Pair matching
// ---------------------------------------------------------------------------

/// Disjoint coupled pairs plus the unmatched remainder of a measured set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMatching {
    /// Each pair stored as (min, max), in acceptance order.
    pub pairs: Vec<(usize, usize)>,
    /// Ascending.
    pub singles: Vec<usize>,
}

impl PairMatching {
    /// All measured qubits as singles; the layout of an independent readout model.
    pub fn all_singles(measured: &[usize]) -> Self {
        let mut singles = measured.to_vec();
        singles.sort_unstable();
        singles.dedup();
        Self {
            pairs: Vec::new(),
            singles,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .pairs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain(self.singles.iter().copied())
            .collect();
        all.sort_unstable();
        all
    }
}

/// Greedy maximal matching over the coupling-map edges induced on `measured`.
/// Edges are scanned in (min, max) index order; an edge is accepted iff
/// both endpoints are still unmatched.
pub fn greedy_pair_matching(cal: &DeviceCalibration, measured: &[usize]) -> PairMatching {
    let mut in_set = vec![false; cal.num_qubits()];
    for &q in measured {
        if q < in_set.len() {
            in_set[q] = true;
        }
    }
    let mut candidates: Vec<(usize, usize)> = cal
        .edges()
        .iter()
        .map(|e| e.qubits)
        .filter(|&(a, b)| in_set[a] && in_set[b])
        .collect();
    candidates.sort_unstable();
    let mut matched = vec![false; cal.num_qubits()];
    let mut pairs = Vec::new();
    for (a, b) in candidates {
        if !matched[a] && !matched[b] {
            matched[a] = true;
            matched[b] = true;
            pairs.push((a, b));
        }
    }
    let mut singles: Vec<usize> = measured.iter().copied().filter(|&q| !matched[q]).collect();
    singles.sort_unstable();
    singles.dedup();
    PairMatching { pairs, singles }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit() -> QubitCal {
        QubitCal {
            t1: 100e-6,
            t2: 80e-6,
            readout_p01: 0.01,
            readout_p10: 0.02,
            gates: [(
                GateTag::Sx,
                GateCal {
                    error: 3e-4,
                    duration: 35e-9,
                },
            )]
            .into_iter()
            .collect(),
        }
    }

    fn edge(a: usize, b: usize, duration: f64) -> EdgeCal {
        EdgeCal {
            qubits: (a, b),
            gate: GateTag::Cx,
            error: 1e-2,
            duration,
        }
    }

    fn device(n: usize, edges: Vec<EdgeCal>) -> DeviceCalibration {
        DeviceCalibration::new(vec![qubit(); n], edges, None, None).unwrap()
    }

    #[test]
    fn explicit_t_char_is_verbatim() {
        let doc = r#"{"num_qubits":1,"t_char_1q":35e-9,"t_char_2q":4e-7,
            "qubits":[{"t1":1e-4,"t2":8e-5,"readout_p01":0.01,"readout_p10":0.02,
            "gates":{"sx":{"error":3e-4,"duration":5e-8}}}],"edges":[]}"#;
        let cal = parse_calibration(doc).unwrap();
        assert_eq!(cal.t_char_1q(), 35e-9);
        assert_eq!(cal.t_char_2q(), 4e-7);
    }

    #[test]
    fn missing_t_char_2q_is_median_edge_duration() {
        let cal = device(
            4,
            vec![edge(0, 1, 300e-9), edge(1, 2, 500e-9), edge(2, 3, 400e-9)],
        );
        assert_eq!(cal.t_char_2q(), 400e-9);
        assert_eq!(cal.t_char_1q(), 35e-9);
    }

    #[test]
    fn rejects_negative_t1() {
        let doc = r#"{"num_qubits":1,"t_char_1q":35e-9,"t_char_2q":4e-7,
            "qubits":[{"t1":-1,"t2":8e-5,"readout_p01":0.01,"readout_p10":0.02}]}"#;
        assert!(matches!(
            parse_calibration(doc),
            Err(CalibrationError::NonPhysical(_))
        ));
    }

    #[test]
    fn rejects_bad_probability_and_missing_fields() {
        let doc = r#"{"num_qubits":1,"t_char_1q":35e-9,"t_char_2q":4e-7,
            "qubits":[{"t1":1e-4,"t2":8e-5,"readout_p01":1.5,"readout_p10":0.02}]}"#;
        assert!(matches!(
            parse_calibration(doc),
            Err(CalibrationError::NonPhysical(_))
        ));
        let doc = r#"{"num_qubits":1,"qubits":[{"t1":1e-4,"readout_p01":0.1,"readout_p10":0.02}]}"#;
        assert!(matches!(parse_calibration(doc), Err(CalibrationError::Json(_))));
    }

    #[test]
    fn rejects_duplicate_edges() {
        let r = DeviceCalibration::new(
            vec![qubit(); 2],
            vec![edge(0, 1, 3e-7), edge(1, 0, 3e-7)],
            None,
            None,
        );
        assert_eq!(r, Err(CalibrationError::DuplicateEdge(0, 1)));
    }

    #[test]
    fn calibration_round_trip() {
        let cal = device(3, vec![edge(0, 1, 3e-7), edge(1, 2, 4e-7)]);
        let again = parse_calibration(&serialize_calibration(&cal)).unwrap();
        assert_eq!(cal, again);
    }

    #[test]
    fn dephasing_time_cases() {
        let tphi = pure_dephasing_time(1e9, 80e-6);
        assert!((tphi - 80e-6).abs() / 80e-6 < 1e-9);
        assert_eq!(pure_dephasing_time(50e-6, 100e-6), f64::INFINITY);
        // 1 / (12500 - 5000)
        let expected = 1.0 / 7500.0;
        assert!((pure_dephasing_time(100e-6, 80e-6) - expected).abs() < 1e-15);
    }

    #[test]
    fn matching_on_path() {
        let cal = device(
            4,
            vec![edge(2, 3, 3e-7), edge(0, 1, 3e-7), edge(1, 2, 3e-7)],
        );
        let m = greedy_pair_matching(&cal, &[0, 1, 2, 3]);
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert!(m.singles.is_empty());
    }

    #[test]
    fn matching_single_qubit() {
        let cal = device(4, vec![edge(0, 1, 3e-7)]);
        let m = greedy_pair_matching(&cal, &[2]);
        assert!(m.pairs.is_empty());
        assert_eq!(m.singles, vec![2]);
    }

    #[test]
    fn matching_on_triangle() {
        let cal = device(
            3,
            vec![edge(1, 2, 3e-7), edge(0, 2, 3e-7), edge(0, 1, 3e-7)],
        );
        let m = greedy_pair_matching(&cal, &[0, 1, 2]);
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert_eq!(m.singles, vec![2]);
    }
}
