//! Compiled noise models: the calibration-derived default baseline and the
//! 20-parameter model.

use std::borrow::Cow;
use std::collections::BTreeMap;

use super::channels::{
    amplitude_damping, depolarizing_1q, depolarizing_2q, one_qubit_composite, phase_flip,
    two_qubit_composite, ClampTally,
};
use super::params::NoiseParams;
use super::readout::{build_readout_model, independent_readout, ReadoutModel};
use super::ModelError;
use crate::calibration::{greedy_pair_matching, DeviceCalibration, PairMatching, QubitCal};
use crate::circuit::{GateOp, GateTag};
use crate::kraus::KrausChannel;

/// Key of a gate channel: gate tag plus the ordered qubit tuple it acts on.
pub type GateKey = (GateTag, Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Parameterized(NoiseParams),
    Default,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    kind: ModelKind,
    calibration: DeviceCalibration,
    gate_channels: BTreeMap<GateKey, KrausChannel>,
    readout: ReadoutModel,
    matching: PairMatching,
    clamps: ClampTally,
    boundary_gates: Vec<GateKey>,
}

impl NoiseModel {
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn calibration(&self) -> &DeviceCalibration {
        &self.calibration
    }

    pub fn gate_channels(&self) -> &BTreeMap<GateKey, KrausChannel> {
        &self.gate_channels
    }

    pub fn channel(&self, tag: GateTag, qubits: &[usize]) -> Option<&KrausChannel> {
        self.gate_channels.get(&(tag, qubits.to_vec()))
    }

    pub fn readout(&self) -> &ReadoutModel {
        &self.readout
    }

    pub fn matching(&self) -> &PairMatching {
        &self.matching
    }

    /// Clamp events raised while constructing the model.
    pub fn clamps(&self) -> &ClampTally {
        &self.clamps
    }

    /// Default-model gates whose thermal infidelity alone exceeded the
    /// calibrated error, leaving the depolarizing parameter at zero.
    pub fn boundary_gates(&self) -> &[GateKey] {
        &self.boundary_gates
    }

    /// Error channel following `op`, or `None` when the op is noiseless
    /// (measurement, untimed `rz`). Ops carrying a duration override get a
    /// channel rebuilt for that duration.
    pub fn channel_for(&self, op: &GateOp) -> Result<Option<Cow<'_, KrausChannel>>, ModelError> {
        let tag = op.tag();
        if tag == GateTag::Measure {
            return Ok(None);
        }
        if let Some(t_g) = op.duration_override {
            return self.rebuild_for_duration(tag, &op.qubits, t_g).map(|c| Some(Cow::Owned(c)));
        }
        if tag == GateTag::Rz {
            return Ok(None);
        }
        self.gate_channels
            .get(&(tag, op.qubits.clone()))
            .map(|c| Some(Cow::Borrowed(c)))
            .ok_or_else(|| ModelError::MissingChannel {
                tag,
                qubits: op.qubits.clone(),
            })
    }

    fn rebuild_for_duration(&self, tag: GateTag, qubits: &[usize], t_g: f64) -> Result<KrausChannel, ModelError> {
        let cal = &self.calibration;
        let mut tally = ClampTally::default();
        if tag.is_two_qubit() {
            let (a, b) = (qubits[0], qubits[1]);
            let edge = cal.edge(a, b).ok_or_else(|| ModelError::MissingGateCalibration {
                tag,
                qubits: qubits.to_vec(),
            })?;
            let qcals = (qubit_cal(cal, a)?, qubit_cal(cal, b)?);
            return match &self.kind {
                ModelKind::Parameterized(p) => Ok(two_qubit_composite(p, edge.error, t_g, qcals, cal.t_char_2q(), &mut tally).0),
                ModelKind::Default => default_2q_channel(edge.error, t_g, qcals)
                    .map(|(c, _)| c)
                    .map_err(|detail| ModelError::RootFinding { tag, qubits: qubits.to_vec(), detail }),
            };
        }
        let q = qubits[0];
        let qcal = qubit_cal(cal, q)?;
        // a timed frame change without its own calibration entry carries no gate error
        let e_g = match qcal.gate(tag) {
            Some(g) => g.error,
            None if tag == GateTag::Rz => 0.0,
            None => {
                return Err(ModelError::MissingGateCalibration { tag, qubits: qubits.to_vec() })
            }
        };
        match &self.kind {
            ModelKind::Parameterized(p) => Ok(one_qubit_composite(p, qcal, tag, e_g, t_g, cal.t_char_1q(), &mut tally).0),
            ModelKind::Default => default_1q_channel(e_g, t_g, qcal)
                .map(|(c, _)| c)
                .map_err(|detail| ModelError::RootFinding { tag, qubits: qubits.to_vec(), detail }),
        }
    }
}

fn qubit_cal(cal: &DeviceCalibration, q: usize) -> Result<&QubitCal, ModelError> {
    cal.qubit(q).ok_or(ModelError::QubitOutOfRange {
        qubit: q,
        num_qubits: cal.num_qubits(),
    })
}

fn check_measured(cal: &DeviceCalibration, measured: &[usize]) -> Result<(), ModelError> {
    match measured.iter().find(|&&q| q >= cal.num_qubits()) {
        Some(&q) => Err(ModelError::QubitOutOfRange {
            qubit: q,
            num_qubits: cal.num_qubits(),
        }),
        None => Ok(()),
    }
}

const ONE_QUBIT_NOISY: [GateTag; 3] = [GateTag::Id, GateTag::Sx, GateTag::X];

/// Parameterized model over the whole device. Gate channels are built for
/// every calibrated single-qubit gate and both orientations of every
/// coupling-map edge; the readout uses the greedy pair matching of
/// `measured`.
pub fn build_parameterized_model(
    params: &NoiseParams,
    cal: &DeviceCalibration,
    measured: &[usize],
) -> Result<NoiseModel, ModelError> {
    check_measured(cal, measured)?;
    let mut tally = ClampTally::default();
    let mut gate_channels = BTreeMap::new();
    for (q, qcal) in cal.qubits().iter().enumerate() {
        for (&tag, g) in &qcal.gates {
            if !ONE_QUBIT_NOISY.contains(&tag) {
                continue;
            }
            let (ch, _) = one_qubit_composite(params, qcal, tag, g.error, g.duration, cal.t_char_1q(), &mut tally);
            gate_channels.insert((tag, vec![q]), ch);
        }
    }
    for edge in cal.edges() {
        let (a, b) = edge.qubits;
        for (x, y) in [(a, b), (b, a)] {
            let qcals = (qubit_cal(cal, x)?, qubit_cal(cal, y)?);
            let (ch, _) = two_qubit_composite(params, edge.error, edge.duration, qcals, cal.t_char_2q(), &mut tally);
            gate_channels.insert((edge.gate, vec![x, y]), ch);
        }
    }
    let matching = greedy_pair_matching(cal, measured);
    let readout = build_readout_model(params, cal, &matching, &mut tally);
    Ok(NoiseModel {
        kind: ModelKind::Parameterized(*params),
        calibration: cal.clone(),
        gate_channels,
        readout,
        matching,
        clamps: tally,
        boundary_gates: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Default (vendor-style) model
// ---------------------------------------------------------------------------

/// Amplitude damping with `1 - exp(-t/T1)` followed by the phase flip that
/// completes the `exp(-t/Tφ)` coherence decay. Zero temperature.
pub fn thermal_relaxation(t_g: f64, t1: f64, t_phi: f64) -> KrausChannel {
    let gamma = -(-t_g / t1).exp_m1();
    let p_phi = if t_phi.is_infinite() {
        0.0
    } else {
        -0.5 * (-t_g / t_phi).exp_m1()
    };
    phase_flip(p_phi).after(&amplitude_damping(gamma))
}

/// Outcome of matching the composite infidelity to a calibrated error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingSolution {
    pub lambda: f64,
    /// Thermal relaxation alone already exceeded the target infidelity.
    pub boundary: bool,
}

/// Solves `infidelity(λ) = target` on `[0, 1]` by bisection; `infidelity`
/// must be nondecreasing.
pub fn solve_depolarizing(
    target: f64,
    infidelity: impl Fn(f64) -> f64,
) -> Result<DepolarizingSolution, String> {
    let f0 = infidelity(0.0) - target;
    if f0 >= 0.0 {
        return Ok(DepolarizingSolution {
            lambda: 0.0,
            boundary: f0 > 0.0,
        });
    }
    let f1 = infidelity(1.0) - target;
    if f1 < 0.0 {
        return Err(format!(
            "target infidelity {target} exceeds the reachable maximum {}",
            f1 + target
        ));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if infidelity(mid) - target < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = if (infidelity(lo) - target).abs() <= (infidelity(hi) - target).abs() {
        lo
    } else {
        hi
    };
    Ok(DepolarizingSolution {
        lambda,
        boundary: false,
    })
}

pub fn default_1q_channel(
    e_g: f64,
    t_g: f64,
    qcal: &QubitCal,
) -> Result<(KrausChannel, DepolarizingSolution), String> {
    let thermal = thermal_relaxation(t_g, qcal.t1, qcal.t_phi());
    let infid = |l: f64| 1.0 - thermal.after(&depolarizing_1q(l)).average_gate_fidelity();
    let sol = solve_depolarizing(e_g, infid)?;
    Ok((thermal.after(&depolarizing_1q(sol.lambda)), sol))
}

pub fn default_2q_channel(
    e_g: f64,
    t_g: f64,
    qcals: (&QubitCal, &QubitCal),
) -> Result<(KrausChannel, DepolarizingSolution), String> {
    let thermal = thermal_relaxation(t_g, qcals.0.t1, qcals.0.t_phi())
        .tensor(&thermal_relaxation(t_g, qcals.1.t1, qcals.1.t_phi()));
    let infid = |l: f64| 1.0 - thermal.after(&depolarizing_2q(l)).average_gate_fidelity();
    let sol = solve_depolarizing(e_g, infid)?;
    Ok((thermal.after(&depolarizing_2q(sol.lambda)), sol))
}

/// Vendor-style baseline: per gate, thermal relaxation after a depolarizing
/// channel tuned so the composite average gate infidelity equals the
/// calibrated error; independent per-qubit readout.
pub fn build_default_model(cal: &DeviceCalibration, measured: &[usize]) -> Result<NoiseModel, ModelError> {
    check_measured(cal, measured)?;
    let mut gate_channels = BTreeMap::new();
    let mut boundary_gates = Vec::new();
    for (q, qcal) in cal.qubits().iter().enumerate() {
        for (&tag, g) in &qcal.gates {
            if !ONE_QUBIT_NOISY.contains(&tag) {
                continue;
            }
            let key = (tag, vec![q]);
            let (ch, sol) = default_1q_channel(g.error, g.duration, qcal).map_err(|detail| {
                ModelError::RootFinding {
                    tag,
                    qubits: vec![q],
                    detail,
                }
            })?;
            if sol.boundary {
                boundary_gates.push(key.clone());
            }
            gate_channels.insert(key, ch);
        }
    }
    for edge in cal.edges() {
        let (a, b) = edge.qubits;
        for (x, y) in [(a, b), (b, a)] {
            let qcals = (qubit_cal(cal, x)?, qubit_cal(cal, y)?);
            let key = (edge.gate, vec![x, y]);
            let (ch, sol) = default_2q_channel(edge.error, edge.duration, qcals).map_err(|detail| {
                ModelError::RootFinding {
                    tag: edge.gate,
                    qubits: vec![x, y],
                    detail,
                }
            })?;
            if sol.boundary {
                boundary_gates.push(key.clone());
            }
            gate_channels.insert(key, ch);
        }
    }
    let matching = PairMatching::all_singles(measured);
    Ok(NoiseModel {
        kind: ModelKind::Default,
        calibration: cal.clone(),
        gate_channels,
        readout: independent_readout(cal, &matching.singles),
        matching,
        clamps: ClampTally::default(),
        boundary_gates,
    })
}
