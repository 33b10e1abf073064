//! Parameterized noise models for superconducting-style devices: Kraus
//! channel construction, density-matrix simulation, Hellinger-distance
//! objectives and TPE / random-search fitting of the 20 model parameters.

pub mod calibration;
pub mod circuit;
pub mod dataset;
pub mod gates;
pub mod generators;
pub mod harness;
pub mod kraus;
pub mod metrics;
pub mod noise;
pub mod optimizer;
pub mod seeds;
pub mod simulator;

pub use calibration::{
    greedy_pair_matching, parse_calibration, pure_dephasing_time, serialize_calibration, DeviceCalibration, EdgeCal,
    GateCal, PairMatching, QubitCal,
};
pub use circuit::{
    circuit_stats, parse_circuit, parse_circuits, serialize_circuit, Circuit, CircuitBuilder, CircuitStats, GateKind,
    GateOp, GateTag,
};
pub use dataset::{Dataset, DatasetEntry, Observation, Split, SplitRule};
pub use kraus::{KrausChannel, Superop};
pub use metrics::{circuit_fidelity_estimate, default_objective, hellinger, mean_objective, ObjectiveReport};
pub use noise::{build_default_model, build_parameterized_model, NoiseModel, NoiseParams, ReadoutModel};
pub use optimizer::{run_study, Method, SearchSpace, Study, TpeConfig, Trial};
pub use simulator::{simulate, Counts, DensityMatrix, ProbDist, SimOptions};
