//! Kraus channels and readout models of the default and parameterized noise models.

mod channels;
mod model;
mod params;
mod readout;

use thiserror::Error;

use crate::circuit::GateTag;

pub use channels::{
    amplitude_damping, amplitude_damping_prob, build_1q_channel, build_2q_channel,
    coherent_unitary_1q, coherent_unitary_2q, crosstalk_hamiltonian, depolarizing_1q,
    depolarizing_2q, depolarizing_prob, phase_flip, phase_flip_prob, zz_dephasing, zz_prob,
    ClampTally, Clamped,
};
pub use model::{
    build_default_model, build_parameterized_model, default_1q_channel, default_2q_channel,
    solve_depolarizing, thermal_relaxation, DepolarizingSolution, GateKey, ModelKind, NoiseModel,
};
pub use params::NoiseParams;
pub use readout::{
    build_readout_model, column_stochastic_error2, column_stochastic_error4, correlate_pair,
    independent_readout, kron2, single_matrix, Matrix2, Matrix4, ReadoutModel,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("gate `{0}` has no error channel of this kind")]
    UnsupportedGate(GateTag),
    #[error("no calibration for `{tag}` on qubits {qubits:?}")]
    MissingGateCalibration { tag: GateTag, qubits: Vec<usize> },
    #[error("noise model has no channel for `{tag}` on qubits {qubits:?}")]
    MissingChannel { tag: GateTag, qubits: Vec<usize> },
    #[error("qubit {qubit} outside the {num_qubits}-qubit device")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("depolarizing solve failed for `{tag}` on qubits {qubits:?}: {detail}")]
    RootFinding {
        tag: GateTag,
        qubits: Vec<usize>,
        detail: String,
    },
}
