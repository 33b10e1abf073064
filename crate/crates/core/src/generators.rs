//! Benchmark circuit families, a synthetic device calibration and synthetic
//! "experimental" datasets sampled from a hidden parameter vector.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::{CalibrationError, DeviceCalibration, EdgeCal, GateCal, QubitCal};
use crate::circuit::{Circuit, CircuitBuilder, CircuitError, GateTag};
use crate::dataset::{write, Dataset, DatasetEntry, DatasetError, Observation, SplitRule};
use crate::noise::{build_parameterized_model, ModelError, NoiseParams};
use crate::seeds::stream_seed;
use crate::simulator::{sample_counts, simulate, SimError, SimOptions};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("{what}: expected {expected} values, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("entangler must be cx or cz, got `{0}`")]
    Entangler(GateTag),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("circuit `{circuit}`: {source}")]
    Simulation {
        circuit: String,
        #[source]
        source: SimError,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

fn rng_for(seed: u64, name: &str) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(stream_seed(seed, name))
}

/// QAOA instance: `H_C = Σ c_i Z_i + Σ_{i<j} c_ij Z_i Z_j`, mixer `Σ X_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaSpec {
    pub n: usize,
    pub linear: Vec<f64>,
    /// Row-major `n × n`; only entries with `i < j` are used.
    pub quadratic: Vec<f64>,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub swap_network: bool,
}

impl QaoaSpec {
    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    /// Weights uniform in [-1, 1], γ and β uniform in [0, π/2].
    pub fn seeded(n: usize, layers: usize, seed: u64, swap_network: bool) -> Self {
        let mut rng = rng_for(seed, "qaoa");
        let linear = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut quadratic = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                quadratic[i * n + j] = rng.gen_range(-1.0..1.0);
            }
        }
        let gammas = (0..layers).map(|_| rng.gen_range(0.0..PI / 2.0)).collect();
        let betas = (0..layers).map(|_| rng.gen_range(0.0..PI / 2.0)).collect();
        Self {
            n,
            linear,
            quadratic,
            gammas,
            betas,
            swap_network,
        }
    }

    fn c(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (i.min(j), i.max(j));
        self.quadratic[a * self.n + b]
    }
}

/// Builds the QAOA circuit. With `swap_network` each ZZ term is fused with
/// a SWAP as `cx(a,b) rz_b(φ) cx(b,a) cx(a,b)` on adjacent qubits; the final
/// logical-to-physical layout is recorded in `meta["layout"]`.
pub fn gen_qaoa(spec: &QaoaSpec, name: &str) -> Result<Circuit, GenError> {
    let n = spec.n;
    if n < 2 {
        return Err(GenError::TooFewQubits(n));
    }
    check_len("linear terms", n, spec.linear.len())?;
    check_len("quadratic terms", n * n, spec.quadratic.len())?;
    check_len("betas", spec.gammas.len(), spec.betas.len())?;
    let mut b = CircuitBuilder::new(name, n);
    for q in 0..n {
        b.h(q);
    }
    // position -> logical qubit
    let mut perm: Vec<usize> = (0..n).collect();
    for (&gamma, &beta) in spec.gammas.iter().zip(&spec.betas) {
        for (p, &l) in perm.iter().enumerate() {
            b.rz(p, 2.0 * gamma * spec.linear[l]);
        }
        if spec.swap_network {
            for step in 0..n {
                for p in (step % 2..n - 1).step_by(2) {
                    let phi = 2.0 * gamma * spec.c(perm[p], perm[p + 1]);
                    b.cx(p, p + 1).rz(p + 1, phi).cx(p + 1, p).cx(p, p + 1);
                    perm.swap(p, p + 1);
                }
            }
        } else {
            for i in 0..n {
                for j in i + 1..n {
                    b.cx(i, j).rz(j, 2.0 * gamma * spec.c(i, j)).cx(i, j);
                }
            }
        }
        for p in 0..n {
            b.rx(p, 2.0 * beta);
        }
    }
    b.measure_all()
        .meta("family", "qaoa")
        .meta("n", n.to_string())
        .meta("layers", spec.layers().to_string())
        .meta("swap_network", spec.swap_network.to_string())
        .meta("gammas", join(&spec.gammas))
        .meta("betas", join(&spec.betas));
    if spec.swap_network {
        let layout: Vec<String> = perm.iter().map(|l| l.to_string()).collect();
        b.meta("layout", layout.join(","));
    }
    Ok(b.build()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureBasis {
    #[default]
    Z,
    /// X basis on qubits `1..n-1`, Z on the ends: the second commuting group
    /// of the cluster Hamiltonian.
    XMiddle,
}

/// Number of angles `gen_hw_efficient` expects.
pub fn hw_efficient_angle_count(n: usize, reps: usize) -> usize {
    2 * n * (reps + 1)
}

/// Hardware-efficient ansatz: `reps + 1` layers of `ry(θ) rz(φ)` per qubit,
/// separated by linear-chain entanglers. Angles are consumed per layer, per
/// qubit, as `(θ, φ)` pairs.
pub fn gen_hw_efficient(
    n: usize,
    reps: usize,
    angles: &[f64],
    entangler: GateTag,
    basis: MeasureBasis,
    name: &str,
) -> Result<Circuit, GenError> {
    if n < 2 {
        return Err(GenError::TooFewQubits(n));
    }
    if !entangler.is_two_qubit() {
        return Err(GenError::Entangler(entangler));
    }
    check_len("angles", hw_efficient_angle_count(n, reps), angles.len())?;
    let mut b = CircuitBuilder::new(name, n);
    let mut it = angles.chunks_exact(2);
    for rep in 0..=reps {
        for q in 0..n {
            let a = it.next().expect("angle count checked");
            b.ry(q, a[0]).rz(q, a[1]);
        }
        if rep < reps {
            for q in 0..n - 1 {
                match entangler {
                    GateTag::Cz => b.cz(q, q + 1),
                    _ => b.cx(q, q + 1),
                };
            }
        }
    }
    if basis == MeasureBasis::XMiddle {
        for q in 1..n - 1 {
            b.h(q);
        }
    }
    b.measure_all()
        .meta("family", "hw_efficient")
        .meta("n", n.to_string())
        .meta("reps", reps.to_string())
        .meta("entangler", entangler.as_str())
        .meta("basis", if basis == MeasureBasis::Z { "z" } else { "x_middle" });
    Ok(b.build()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Two-qubit gates only between neighbours `(i, i+1)`.
    #[default]
    Linear,
    AllToAll,
}

/// Random circuit of `n + 3` layers. Each layer covers every qubit once with
/// either a cx (random direction) or a random single-qubit gate
/// (x, sx or a U3 decomposed into rz/sx).
pub fn gen_random(n: usize, seed: u64, topology: Topology, name: &str) -> Result<Circuit, GenError> {
    if n < 2 {
        return Err(GenError::TooFewQubits(n));
    }
    let mut rng = rng_for(seed, "random-circuit");
    let layers = n + 3;
    let mut b = CircuitBuilder::new(name, n);
    for _ in 0..layers {
        let order: Vec<usize> = match topology {
            Topology::Linear => (0..n).collect(),
            Topology::AllToAll => {
                let mut v: Vec<usize> = (0..n).collect();
                v.shuffle(&mut rng);
                v
            }
        };
        let mut i = 0;
        while i < n {
            if i + 1 < n && rng.gen_bool(0.5) {
                let (a, c) = (order[i], order[i + 1]);
                if rng.gen_bool(0.5) {
                    b.cx(a, c);
                } else {
                    b.cx(c, a);
                }
                i += 2;
            } else {
                random_1q(&mut b, order[i], &mut rng);
                i += 1;
            }
        }
    }
    b.measure_all()
        .meta("family", "random")
        .meta("n", n.to_string())
        .meta("layers", layers.to_string())
        .meta("seed", seed.to_string());
    Ok(b.build()?)
}

fn random_1q(b: &mut CircuitBuilder, q: usize, rng: &mut ChaCha20Rng) {
    match rng.gen_range(0..4) {
        0 => {
            b.x(q);
        }
        1 => {
            b.sx(q);
        }
        _ => {
            let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
            let phi = rng.gen_range(0.0..2.0 * PI);
            let lambda = rng.gen_range(0.0..2.0 * PI);
            b.u3(q, theta, phi, lambda);
        }
    }
}

/// A circuit family member to synthesize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Qaoa {
        n: usize,
        #[serde(default = "one")]
        layers: usize,
        seed: u64,
        #[serde(default = "yes")]
        swap_network: bool,
    },
    HwEfficient {
        n: usize,
        reps: usize,
        seed: u64,
        #[serde(default = "cx")]
        entangler: GateTag,
        #[serde(default)]
        basis: MeasureBasis,
    },
    Random {
        n: usize,
        seed: u64,
        #[serde(default)]
        topology: Topology,
    },
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn cx() -> GateTag {
    GateTag::Cx
}

impl FamilySpec {
    pub fn family(&self) -> &'static str {
        match self {
            FamilySpec::Qaoa { .. } => "qaoa",
            FamilySpec::HwEfficient { .. } => "hw_efficient",
            FamilySpec::Random { .. } => "random",
        }
    }

    pub fn name(&self) -> String {
        match self {
            FamilySpec::Qaoa { n, layers, seed, .. } => format!("qaoa_n{n}_p{layers}_s{seed}"),
            FamilySpec::HwEfficient { n, reps, seed, basis, .. } => {
                let tag = if *basis == MeasureBasis::Z { "z" } else { "x" };
                format!("hwe_n{n}_r{reps}_{tag}_s{seed}")
            }
            FamilySpec::Random { n, seed, .. } => format!("random_n{n}_s{seed}"),
        }
    }

    pub fn build(&self) -> Result<Circuit, GenError> {
        let name = self.name();
        let c = match *self {
            FamilySpec::Qaoa {
                n,
                layers,
                seed,
                swap_network,
            } => gen_qaoa(&QaoaSpec::seeded(n, layers, seed, swap_network), &name)?.with_meta("seed", seed.to_string()),
            FamilySpec::HwEfficient {
                n,
                reps,
                seed,
                entangler,
                basis,
            } => {
                let mut rng = rng_for(seed, "hw-efficient");
                let angles: Vec<f64> = (0..hw_efficient_angle_count(n, reps))
                    .map(|_| rng.gen_range(-PI..PI))
                    .collect();
                gen_hw_efficient(n, reps, &angles, entangler, basis, &name)?.with_meta("seed", seed.to_string())
            }
            FamilySpec::Random { n, seed, topology } => gen_random(n, seed, topology, &name)?,
        };
        Ok(c)
    }
}

/// Seeded calibration of a linear chain `0 - 1 - ... - (n-1)` with
/// superconducting-scale coherence times, gate errors and readout errors.
pub fn synthetic_calibration(n: usize, seed: u64, entangler: GateTag) -> Result<DeviceCalibration, GenError> {
    if !entangler.is_two_qubit() {
        return Err(GenError::Entangler(entangler));
    }
    let mut rng = rng_for(seed, "calibration");
    let qubits = (0..n)
        .map(|_| {
            let t1: f64 = rng.gen_range(60e-6..140e-6);
            let t2 = (t1 * rng.gen_range(0.6..1.4)).min(1.9 * t1);
            let e1 = rng.gen_range(1.5e-4..4e-4);
            let gates = [
                (GateTag::Id, GateCal { error: e1, duration: 35.5e-9 }),
                (GateTag::Sx, GateCal { error: e1, duration: 35.5e-9 }),
                (GateTag::X, GateCal { error: e1, duration: 35.5e-9 }),
                (GateTag::Rz, GateCal { error: 0.0, duration: 0.0 }),
            ]
            .into_iter()
            .collect();
            QubitCal {
                t1,
                t2,
                readout_p01: rng.gen_range(0.005..0.02),
                readout_p10: rng.gen_range(0.01..0.035),
                gates,
            }
        })
        .collect();
    let edges = (0..n.saturating_sub(1))
        .map(|q| EdgeCal {
            qubits: (q, q + 1),
            gate: entangler,
            error: rng.gen_range(5e-3..1.2e-2),
            duration: rng.gen_range(250e-9..450e-9),
        })
        .collect();
    Ok(DeviceCalibration::new(qubits, edges, None, None)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shots {
    Finite(u64),
    /// Stores the exact distribution (the infinite-shot limit).
    Exact,
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Finite(s) => write!(f, "{s}"),
            Shots::Exact => f.write_str("exact"),
        }
    }
}

/// Ground-truth parameters kept out of the fitting path: `Dataset` has no
/// access to them and `Dataset::load` never reads them.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenParams(NoiseParams);

impl HiddenParams {
    pub fn reveal(&self) -> &NoiseParams {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub dataset: Dataset,
    pub hidden: HiddenParams,
}

pub const HIDDEN_PARAMS_FILE: &str = "hidden_params.json";

impl SyntheticDataset {
    /// Writes the dataset plus `hidden_params.json` next to it.
    pub fn save(&self, dir: &Path) -> Result<(), GenError> {
        self.dataset.save(dir)?;
        let json = serde_json::to_string_pretty(self.hidden.reveal()).expect("params serialize");
        write(&dir.join(HIDDEN_PARAMS_FILE), &json)?;
        Ok(())
    }
}

/// Simulates every family member under the parameterized model at `hidden`,
/// samples counts (sampling seed per circuit derived from `seed` and the
/// circuit name) and splits by measured-qubit count.
pub fn synth_experiment(
    families: &[FamilySpec],
    cal: &DeviceCalibration,
    hidden: &NoiseParams,
    shots: Shots,
    seed: u64,
    rule: SplitRule,
    opts: &SimOptions,
) -> Result<SyntheticDataset, GenError> {
    let circuits = families
        .iter()
        .map(|f| f.build().map(|c| (f.family(), c)))
        .collect::<Result<Vec<_>, _>>()?;
    let entries = circuits
        .into_par_iter()
        .map(|(family, circuit)| {
            let model = build_parameterized_model(hidden, cal, &circuit.measured_qubits())?;
            let sim_err = |source| GenError::Simulation {
                circuit: circuit.name().to_owned(),
                source,
            };
            let p = simulate(&circuit, Some(&model), opts).map_err(sim_err)?;
            let observed = match shots {
                Shots::Exact => Observation::Exact(p),
                Shots::Finite(s) => {
                    let sampling_seed = stream_seed(seed, &format!("sampling/{}", circuit.name()));
                    Observation::Counts(sample_counts(&p, s, sampling_seed).map_err(sim_err)?)
                }
            };
            Ok(DatasetEntry {
                split: rule.assign(&circuit),
                circuit,
                observed,
                family: family.to_owned(),
            })
        })
        .collect::<Result<Vec<_>, GenError>>()?;
    Ok(SyntheticDataset {
        dataset: Dataset::new(cal.clone(), entries)?,
        hidden: HiddenParams(*hidden),
    })
}

/// QAOA families for a train-small / validate-large protocol: `per_size`
/// instances at each qubit count in `sizes`, with distinct seeds.
pub fn qaoa_suite(sizes: &[usize], per_size: usize, seed: u64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for &n in sizes {
        for k in 0..per_size {
            out.push(FamilySpec::Qaoa {
                n,
                layers: 1,
                seed: stream_seed(seed, &format!("qaoa/{n}/{k}")) % 1_000_000,
                swap_network: true,
            });
        }
    }
    out
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), GenError> {
    if expected == got {
        Ok(())
    } else {
        Err(GenError::Length { what, expected, got })
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_stats, GateKind};
    use crate::dataset::Split;

    fn ideal(c: &Circuit) -> Vec<f64> {
        simulate(c, None, &SimOptions::default()).unwrap().probs
    }

    #[test]
    fn qaoa_counts_pairs() {
        for swap in [false, true] {
            let spec = QaoaSpec::seeded(4, 1, 3, swap);
            let c = gen_qaoa(&spec, "q").unwrap();
            let cx = c.ops().iter().filter(|o| o.tag() == GateTag::Cx).count();
            let per_pair = if swap { 3 } else { 2 };
            assert_eq!(cx, per_pair * 6);
        }
    }

    #[test]
    fn swap_network_is_linear_and_matches_direct() {
        for n in 2..=5 {
            let spec = QaoaSpec::seeded(n, 2, 17, true);
            let c = gen_qaoa(&spec, "s").unwrap();
            for op in c.ops().iter().filter(|o| o.tag() == GateTag::Cx) {
                assert_eq!(op.qubits[0].abs_diff(op.qubits[1]), 1);
            }
            let direct = gen_qaoa(&QaoaSpec { swap_network: false, ..spec.clone() }, "d").unwrap();
            let layout: Vec<usize> = c.meta()["layout"].split(',').map(|s| s.parse().unwrap()).collect();
            let (ps, pd) = (ideal(&c), ideal(&direct));
            for (i, &p) in ps.iter().enumerate() {
                // physical bit p carries logical qubit layout[p]
                let mut j = 0;
                for (pos, &l) in layout.iter().enumerate() {
                    j |= ((i >> pos) & 1) << l;
                }
                assert!((p - pd[j]).abs() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn zero_angle_qaoa_is_uniform() {
        for n in 2..=5 {
            for swap in [false, true] {
                let mut spec = QaoaSpec::seeded(n, 1, 1, swap);
                spec.gammas = vec![0.0];
                spec.betas = vec![0.0];
                let p = ideal(&gen_qaoa(&spec, "z").unwrap());
                let u = 1.0 / (1 << n) as f64;
                assert!(p.iter().all(|&x| (x - u).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn qaoa_validates_lengths() {
        let mut spec = QaoaSpec::seeded(3, 1, 1, true);
        spec.betas.push(0.0);
        assert!(gen_qaoa(&spec, "x").is_err());
        assert!(matches!(gen_qaoa(&QaoaSpec::seeded(1, 1, 1, true), "x"), Err(GenError::TooFewQubits(1))));
    }

    #[test]
    fn hw_efficient_structure() {
        let zeros = vec![0.0; hw_efficient_angle_count(6, 2)];
        let c = gen_hw_efficient(6, 2, &zeros, GateTag::Cz, MeasureBasis::Z, "h").unwrap();
        assert_eq!(circuit_stats(&c).two_qubit_gates, 10);
        let p = ideal(&c);
        assert!((p[0] - 1.0).abs() < 1e-12);
        let c0 = gen_hw_efficient(4, 0, &vec![0.1; 8], GateTag::Cx, MeasureBasis::Z, "h0").unwrap();
        assert_eq!(circuit_stats(&c0).two_qubit_gates, 0);
        assert!(matches!(
            gen_hw_efficient(4, 1, &[0.0; 3], GateTag::Cx, MeasureBasis::Z, "bad"),
            Err(GenError::Length { .. })
        ));
        assert!(gen_hw_efficient(4, 1, &[0.0; 16], GateTag::Sx, MeasureBasis::Z, "bad").is_err());
    }

    #[test]
    fn hw_efficient_x_basis_on_middle() {
        let zeros = vec![0.0; hw_efficient_angle_count(3, 1)];
        let c = gen_hw_efficient(3, 1, &zeros, GateTag::Cx, MeasureBasis::XMiddle, "x").unwrap();
        let p = ideal(&c);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_circuits() {
        let a = gen_random(4, 9, Topology::AllToAll, "r").unwrap();
        assert_eq!(a.meta()["layers"], "7");
        assert_eq!(a, gen_random(4, 9, Topology::AllToAll, "r").unwrap());
        assert_ne!(a, gen_random(4, 10, Topology::AllToAll, "r").unwrap());
        let stats = circuit_stats(&a);
        let twoq = a.ops().iter().filter(|o| o.tag().is_two_qubit()).count();
        let oneq = a.ops().iter().filter(|o| !o.tag().is_two_qubit() && !o.is_measure()).count();
        assert_eq!((stats.two_qubit_gates, stats.single_qubit_gates), (twoq, oneq));
        for op in a.ops() {
            assert!(matches!(
                op.kind,
                GateKind::Rz(_) | GateKind::Sx | GateKind::X | GateKind::Cx | GateKind::Measure
            ));
        }
        let lin = gen_random(6, 2, Topology::Linear, "l").unwrap();
        for op in lin.ops().iter().filter(|o| o.tag() == GateTag::Cx) {
            assert_eq!(op.qubits[0].abs_diff(op.qubits[1]), 1);
        }
    }

    #[test]
    fn calibration_is_seeded_linear_chain() {
        let c = synthetic_calibration(9, 4, GateTag::Cx).unwrap();
        assert_eq!(c.num_qubits(), 9);
        assert_eq!(c.edges().len(), 8);
        assert!(c.edge(3, 4).is_some() && c.edge(3, 5).is_none());
        assert_eq!(c, synthetic_calibration(9, 4, GateTag::Cx).unwrap());
        assert!(c.qubits().iter().all(|q| q.t2 <= 2.0 * q.t1));
    }

    #[test]
    fn synth_is_deterministic_and_split() {
        let cal = synthetic_calibration(8, 1, GateTag::Cx).unwrap();
        let fams = qaoa_suite(&[3, 7], 2, 5);
        let hidden = NoiseParams::zero();
        let run = || {
            synth_experiment(&fams, &cal, &hidden, Shots::Finite(500), 3, SplitRule::default(), &SimOptions::default())
                .unwrap()
        };
        let a = run();
        assert_eq!(a, run());
        assert_eq!(a.dataset.train().len(), 2);
        assert_eq!(a.dataset.validate().len(), 2);
        assert!(a.dataset.entries.iter().all(|e| (e.split == Split::Train) == (e.circuit.num_qubits() <= 6)));
    }

    #[test]
    fn family_spec_json() {
        let f: FamilySpec = serde_json::from_str(r#"{"family":"qaoa","n":4,"seed":2}"#).unwrap();
        assert_eq!(f, FamilySpec::Qaoa { n: 4, layers: 1, seed: 2, swap_network: true });
        let r: FamilySpec = serde_json::from_str(r#"{"family":"random","n":4,"seed":2,"topology":"all_to_all"}"#).unwrap();
        assert_eq!(r.build().unwrap().meta()["family"], "random");
    }
}
