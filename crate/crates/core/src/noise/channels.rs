//! Error probabilities, coherent error unitaries and the composite gate channels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::NoiseParams;
use super::ModelError;
use crate::calibration::{EdgeCal, QubitCal};
use crate::circuit::GateTag;
use crate::kraus::{c, identity, kron, pauli_x, pauli_y, pauli_z, paulis, CMat, KrausChannel};

/// A probability clamped into `[0, 1]`, remembering whether clamping fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    pub clamped: bool,
}

impl Clamped {
    pub fn unit(x: f64) -> Self {
        if x.is_nan() {
            Self {
                value: 0.0,
                clamped: true,
            }
        } else if x < 0.0 {
            Self {
                value: 0.0,
                clamped: true,
            }
        } else if x > 1.0 {
            Self {
                value: 1.0,
                clamped: true,
            }
        } else {
            Self {
                value: x,
                clamped: false,
            }
        }
    }
}

/// Counts of clamp events per probability producer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClampTally {
    pub depolarizing: u64,
    pub amplitude: u64,
    pub phase: u64,
    pub zz: u64,
    pub readout: u64,
}

impl ClampTally {
    pub fn total(&self) -> u64 {
        self.depolarizing + self.amplitude + self.phase + self.zz + self.readout
    }

    pub fn merge(&mut self, other: &ClampTally) {
        self.depolarizing += other.depolarizing;
        self.amplitude += other.amplitude;
        self.phase += other.phase;
        self.zz += other.zz;
        self.readout += other.readout;
    }

    fn take(counter: &mut u64, p: Clamped) -> f64 {
        if p.clamped {
            *counter += 1;
        }
        p.value
    }
}

/// `1 - exp(-(k·e_g + b)·t_g/t_char)`, clamped.
pub fn depolarizing_prob(e_g: f64, t_g: f64, k: f64, b: f64, t_char: f64) -> Clamped {
    Clamped::unit(-(-(k * e_g + b) * t_g / t_char).exp_m1())
}

/// `1 - exp(-t_g/T1) + b_amp`, clamped.
pub fn amplitude_damping_prob(t_g: f64, t1: f64, b_amp: f64) -> Clamped {
    Clamped::unit(-(-t_g / t1).exp_m1() + b_amp)
}

/// Stretched-exponential dephasing `1 - exp(-2 (t_g/Tφ)^β) + b_φ`, clamped.
/// An infinite `Tφ` contributes only the offset.
pub fn phase_flip_prob(t_g: f64, t_phi: f64, beta: f64, b_phi: f64) -> Clamped {
    if t_phi.is_infinite() {
        return Clamped::unit(b_phi);
    }
    let ratio = t_g / t_phi;
    let decay = if ratio == 0.0 {
        0.0
    } else {
        -(-2.0 * ratio.powf(beta)).exp_m1()
    };
    Clamped::unit(decay + b_phi)
}

/// `1 - exp(-k_zz·t_g/t_char_2q)`, clamped.
pub fn zz_prob(t_g: f64, k_zz: f64, t_char_2q: f64) -> Clamped {
    Clamped::unit(-(-k_zz * t_g / t_char_2q).exp_m1())
}

/// `exp(-i (t_g/t_char)(θx X + θy Y + θz Z))`, closed form.
pub fn coherent_unitary_1q(theta_x: f64, theta_y: f64, theta_z: f64, t_g: f64, t_char: f64) -> CMat {
    let s = t_g / t_char;
    su2_exp(theta_x * s, theta_y * s, theta_z * s)
}

/// `exp(-i (a X + b Y + c Z))`.
fn su2_exp(a: f64, b: f64, cz: f64) -> CMat {
    let r = (a * a + b * b + cz * cz).sqrt();
    if r == 0.0 {
        return identity(2);
    }
    let (sin, cos) = r.sin_cos();
    let f = sin / r;
    // cos·I - i·f·(aX + bY + cZ)
    CMat::from_row_slice(
        2,
        2,
        &[
            c(cos, -f * cz),
            c(-f * b, -f * a),
            c(f * b, -f * a),
            c(cos, f * cz),
        ],
    )
}

/// `exp(-i (t_g/t_char_2q)(θix I⊗X + θzx Z⊗X + θzz Z⊗Z))`.
///
/// The first tensor factor is `I` or `Z` in every term, so the Hamiltonian is
/// block diagonal in the first qubit's computational basis; each block is an
/// SU(2) exponential on the second qubit.
pub fn coherent_unitary_2q(theta_ix: f64, theta_zx: f64, theta_zz: f64, t_g: f64, t_char_2q: f64) -> CMat {
    let s = t_g / t_char_2q;
    // first qubit |0>: (θix + θzx) X + θzz Z ; |1>: (θix - θzx) X - θzz Z
    let upper = su2_exp((theta_ix + theta_zx) * s, 0.0, theta_zz * s);
    let lower = su2_exp((theta_ix - theta_zx) * s, 0.0, -theta_zz * s);
    let mut u = CMat::zeros(4, 4);
    u.view_mut((0, 0), (2, 2)).copy_from(&upper);
    u.view_mut((2, 2), (2, 2)).copy_from(&lower);
    u
}

/// The Hamiltonian whose scaled exponential is [`coherent_unitary_2q`].
pub fn crosstalk_hamiltonian(theta_ix: f64, theta_zx: f64, theta_zz: f64) -> CMat {
    let id = identity(2);
    let x = pauli_x();
    let z = pauli_z();
    kron(&id, &x) * c(theta_ix, 0.0) + kron(&z, &x) * c(theta_zx, 0.0) + kron(&z, &z) * c(theta_zz, 0.0)
}

/// `(1-λ)ρ + λ/3 (XρX + YρY + ZρZ)`.
pub fn depolarizing_1q(lambda: f64) -> KrausChannel {
    KrausChannel::mixture(
        1,
        [
            (1.0 - lambda, identity(2)),
            (lambda / 3.0, pauli_x()),
            (lambda / 3.0, pauli_y()),
            (lambda / 3.0, pauli_z()),
        ],
    )
}

/// Two-qubit depolarizing over the 15 non-identity Pauli products.
pub fn depolarizing_2q(lambda: f64) -> KrausChannel {
    let p = paulis();
    let mut terms = Vec::with_capacity(16);
    for (i, a) in p.iter().enumerate() {
        for (j, b) in p.iter().enumerate() {
            let w = if i == 0 && j == 0 {
                1.0 - lambda
            } else {
                lambda / 15.0
            };
            terms.push((w, kron(a, b)));
        }
    }
    KrausChannel::mixture(2, terms)
}

pub fn amplitude_damping(gamma: f64) -> KrausChannel {
    let z = Complex64::new(0.0, 0.0);
    let k0 = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, c((1.0 - gamma).sqrt(), 0.0)]);
    let k1 = CMat::from_row_slice(2, 2, &[z, c(gamma.sqrt(), 0.0), z, z]);
    if gamma == 0.0 {
        KrausChannel::unitary(k0)
    } else {
        KrausChannel::new(1, vec![k0, k1]).expect("2x2 operators")
    }
}

/// `(1-λ)ρ + λ ZρZ`.
pub fn phase_flip(lambda: f64) -> KrausChannel {
    KrausChannel::mixture(1, [(1.0 - lambda, identity(2)), (lambda, pauli_z())])
}

/// `(1-λ)ρ + λ (Z⊗Z)ρ(Z⊗Z)`.
pub fn zz_dephasing(lambda: f64) -> KrausChannel {
    let z = pauli_z();
    KrausChannel::mixture(2, [(1.0 - lambda, identity(4)), (lambda, kron(&z, &z))])
}

/// Probabilities entering one single-qubit composite channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneQubitLambdas {
    pub dep: f64,
    pub amp: f64,
    pub phase: f64,
}

/// Single-qubit composite `E_ph ∘ E_amp ∘ E_dep ∘ E_coh` for an explicit duration.
/// `rz` is accepted here only for explicitly timed frame changes.
#[allow(clippy::too_many_arguments)]
pub(crate) fn one_qubit_composite(
    params: &NoiseParams,
    qcal: &QubitCal,
    tag: GateTag,
    e_g: f64,
    t_g: f64,
    t_char_1q: f64,
    tally: &mut ClampTally,
) -> (KrausChannel, OneQubitLambdas) {
    let dep = ClampTally::take(
        &mut tally.depolarizing,
        depolarizing_prob(e_g, t_g, params.k_dep, params.b_dep, t_char_1q),
    );
    let amp = ClampTally::take(
        &mut tally.amplitude,
        amplitude_damping_prob(t_g, qcal.t1, params.b_amp),
    );
    let phase = ClampTally::take(
        &mut tally.phase,
        phase_flip_prob(t_g, qcal.t_phi(), params.beta_1q, 0.0),
    );
    let mut ch = depolarizing_1q(dep);
    if tag != GateTag::Id {
        let u = coherent_unitary_1q(params.theta_x, params.theta_y, params.theta_z, t_g, t_char_1q);
        ch = ch.after(&KrausChannel::unitary(u));
    }
    let ch = phase_flip(phase).after(&amplitude_damping(amp).after(&ch));
    (ch, OneQubitLambdas { dep, amp, phase })
}

/// Parameterized single-qubit error channel for a calibrated gate.
pub fn build_1q_channel(
    params: &NoiseParams,
    qcal: &QubitCal,
    tag: GateTag,
    t_char_1q: f64,
    tally: &mut ClampTally,
) -> Result<KrausChannel, ModelError> {
    if !matches!(tag, GateTag::Id | GateTag::Sx | GateTag::X) {
        return Err(ModelError::UnsupportedGate(tag));
    }
    let g = qcal.gate(tag).ok_or(ModelError::MissingGateCalibration {
        tag,
        qubits: Vec::new(),
    })?;
    Ok(one_qubit_composite(params, qcal, tag, g.error, g.duration, t_char_1q, tally).0)
}

/// Probabilities entering one two-qubit composite channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitLambdas {
    pub dep: f64,
    pub amp: [f64; 2],
    pub phase: [f64; 2],
    pub zz: f64,
}

pub(crate) fn two_qubit_composite(
    params: &NoiseParams,
    e_g: f64,
    t_g: f64,
    qcals: (&QubitCal, &QubitCal),
    t_char_2q: f64,
    tally: &mut ClampTally,
) -> (KrausChannel, TwoQubitLambdas) {
    let dep = ClampTally::take(
        &mut tally.depolarizing,
        depolarizing_prob(e_g, t_g, params.k_dep_2q, params.b_dep_2q, t_char_2q),
    );
    let amp = [qcals.0, qcals.1].map(|q| {
        ClampTally::take(
            &mut tally.amplitude,
            amplitude_damping_prob(t_g, q.t1, params.b_amp_2q),
        )
    });
    let phase = [qcals.0, qcals.1].map(|q| {
        ClampTally::take(
            &mut tally.phase,
            phase_flip_prob(t_g, q.t_phi(), params.beta_2q, params.b_phi_2q),
        )
    });
    let zz = ClampTally::take(&mut tally.zz, zz_prob(t_g, params.k_zz, t_char_2q));

    let coh = KrausChannel::unitary(coherent_unitary_2q(
        params.theta_ix,
        params.theta_zx,
        params.theta_zz,
        t_g,
        t_char_2q,
    ));
    let ch = depolarizing_2q(dep).after(&coh);
    let ch = amplitude_damping(amp[0]).tensor(&amplitude_damping(amp[1])).after(&ch);
    let ch = phase_flip(phase[0]).tensor(&phase_flip(phase[1])).after(&ch);
    let ch = zz_dephasing(zz).after(&ch);
    (ch, TwoQubitLambdas { dep, amp, phase, zz })
}

/// Parameterized two-qubit error channel
/// `E_zz ∘ (E_ph ⊗ E_ph) ∘ (E_amp ⊗ E_amp) ∘ E_dep ∘ E_coh` on the ordered
/// tuple whose per-qubit calibrations are `qcals`.
pub fn build_2q_channel(
    params: &NoiseParams,
    edge: &EdgeCal,
    qcals: (&QubitCal, &QubitCal),
    t_char_2q: f64,
    tally: &mut ClampTally,
) -> Result<KrausChannel, ModelError> {
    if !edge.gate.is_two_qubit() {
        return Err(ModelError::UnsupportedGate(edge.gate));
    }
    Ok(two_qubit_composite(params, edge.error, edge.duration, qcals, t_char_2q, tally).0)
}
