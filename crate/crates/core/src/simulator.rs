//! Exact density-matrix simulation under a noise model, readout confusion and
//! shot sampling.
//!
//! Bitstring convention: qubit 0 is the least significant bit of a state
//! index. Outcome distributions are indexed over the measured qubits in
//! ascending order, the lowest measured qubit being bit 0 (rightmost
//! character of a bitstring).

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::PairMatching;
use crate::circuit::{Circuit, GateKind, GateTag};
use crate::gates;
use crate::kraus::{KrausChannel, Superop};
use crate::noise::{ModelError, NoiseModel, ReadoutModel};

/// Name and version of the generator behind [`sample_counts`].
pub const SAMPLING_PRNG: &str = "ChaCha20 (rand_chacha 0.3), seed_from_u64";

pub const DEFAULT_MAX_QUBITS: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("circuit has {got} qubits, simulator cap is {cap}")]
    TooManyQubits { got: usize, cap: usize },
    #[error("channel arity {channel} does not match {qubits} target qubit(s)")]
    ArityMismatch { channel: usize, qubits: usize },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("readout layout covers qubits {layout:?} but the distribution is over {measured:?}")]
    ReadoutLayout {
        layout: Vec<usize>,
        measured: Vec<usize>,
    },
    #[error("readout model has no matrix for {0}")]
    MissingReadout(String),
    #[error("shots must be positive")]
    ZeroShots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    pub max_qubits: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

/// Row-major `2^n × 2^n` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        Self { n, data }
    }

    pub fn from_data(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), 1usize << (2 * n));
        Self { n, data }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Max |ρ - ρ†| over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut err = 0.0f64;
        for i in 0..d {
            for j in i..d {
                err = err.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        err
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<(), SimError> {
        for &q in qubits {
            if q >= self.n {
                return Err(SimError::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.n,
                });
            }
        }
        Ok(())
    }

    /// `ρ ← Σ K ρ K†` with the channel embedded on `qubits`.
    pub fn apply_channel(&mut self, ch: &KrausChannel, qubits: &[usize]) -> Result<(), SimError> {
        if ch.arity() != qubits.len() {
            return Err(SimError::ArityMismatch {
                channel: ch.arity(),
                qubits: qubits.len(),
            });
        }
        self.check_qubits(qubits)?;
        self.apply_superop(&ch.superoperator(), qubits);
        Ok(())
    }

    /// Applies a 1- or 2-qubit superoperator. Arity and range must already be valid.
    pub fn apply_superop(&mut self, s: &Superop, qubits: &[usize]) {
        match s.arity() {
            1 => self.apply_local::<2, 4>(s, &[1 << qubits[0], 0]),
            2 => self.apply_local::<4, 16>(s, &[1 << qubits[0], 1 << qubits[1]]),
            a => panic!("unsupported superoperator arity {a}"),
        }
    }

    /// `D` local dimension, `N = D²`. `bits` holds the masks of the local
    /// qubits, most significant local bit first.
    fn apply_local<const D: usize, const N: usize>(&mut self, s: &Superop, bits: &[usize; 2]) {
        let dim = self.dim();
        let offsets: [usize; D] = std::array::from_fn(|l| {
            if D == 2 {
                if l & 1 == 1 {
                    bits[0]
                } else {
                    0
                }
            } else {
                (if l & 2 != 0 { bits[0] } else { 0 }) | (if l & 1 != 0 { bits[1] } else { 0 })
            }
        });
        let mask = bits[0] | bits[1];
        let bases: Vec<usize> = (0..dim).filter(|i| i & mask == 0).collect();
        let sd = s.data();
        let mut v = [Complex64::new(0.0, 0.0); N];
        for &r in &bases {
            for &c in &bases {
                for a in 0..D {
                    let row = (r + offsets[a]) * dim + c;
                    for b in 0..D {
                        v[a * D + b] = self.data[row + offsets[b]];
                    }
                }
                for a in 0..D {
                    let row = (r + offsets[a]) * dim + c;
                    for b in 0..D {
                        let srow = &sd[(a * D + b) * N..(a * D + b + 1) * N];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..N {
                            acc += srow[k] * v[k];
                        }
                        self.data[row + offsets[b]] = acc;
                    }
                }
            }
        }
    }

    /// Diagonal `rz(θ) = diag(e^{-iθ/2}, e^{iθ/2})` conjugation.
    pub fn apply_rz(&mut self, q: usize, angle: f64) {
        let dim = self.dim();
        let m = 1usize << q;
        let down = Complex64::from_polar(1.0, -angle); // row bit 0, col bit 1
        let up = down.conj();
        for r in 0..dim {
            for c in 0..dim {
                match (r & m != 0, c & m != 0) {
                    (false, true) => self.data[r * dim + c] *= down,
                    (true, false) => self.data[r * dim + c] *= up,
                    _ => {}
                }
            }
        }
    }

    /// Computational-basis distribution of `measured` (ascending) qubits.
    pub fn marginal(&self, measured: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << measured.len()];
        for (i, p) in self.diagonal().into_iter().enumerate() {
            let mut o = 0usize;
            for (k, &q) in measured.iter().enumerate() {
                o |= ((i >> q) & 1) << k;
            }
            out[o] += p;
        }
        out
    }
}

/// Functional form of [`DensityMatrix::apply_channel`].
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel, qubits: &[usize]) -> Result<DensityMatrix, SimError> {
    let mut out = rho.clone();
    out.apply_channel(ch, qubits)?;
    Ok(out)
}

/// A distribution over the outcomes of `qubits` (ascending).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist {
    pub qubits: Vec<usize>,
    pub probs: Vec<f64>,
}

impl ProbDist {
    pub fn new(qubits: Vec<usize>, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), 1 << qubits.len());
        Self { qubits, probs }
    }

    pub fn num_bits(&self) -> usize {
        self.qubits.len()
    }

    pub fn prob(&self, bitstring: &str) -> f64 {
        self.probs[usize::from_str_radix(bitstring, 2).expect("binary bitstring")]
    }
}

/// Sampled outcome counts keyed by fixed-width bitstrings (qubit-0 rightmost).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    shots: u64,
    width: usize,
    table: BTreeMap<String, u64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CountsError {
    #[error("malformed counts JSON: {0}")]
    Json(String),
    #[error("bitstring `{0}` is not binary or has inconsistent width")]
    Bitstring(String),
    #[error("counts sum to {sum} but shots = {shots}")]
    Total { sum: u64, shots: u64 },
    #[error("shots must be positive")]
    ZeroShots,
}

impl Counts {
    pub fn new(shots: u64, width: usize, table: BTreeMap<String, u64>) -> Result<Self, CountsError> {
        if shots == 0 {
            return Err(CountsError::ZeroShots);
        }
        for k in table.keys() {
            if k.len() != width || !k.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(CountsError::Bitstring(k.clone()));
            }
        }
        let sum: u64 = table.values().sum();
        if sum != shots {
            return Err(CountsError::Total { sum, shots });
        }
        Ok(Self { shots, width, table })
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn table(&self) -> &BTreeMap<String, u64> {
        &self.table
    }

    pub fn get(&self, bitstring: &str) -> u64 {
        self.table.get(bitstring).copied().unwrap_or(0)
    }

    /// Maximum-likelihood frequencies over all `2^width` outcomes.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f = vec![0.0; 1 << self.width];
        for (k, &v) in &self.table {
            f[usize::from_str_radix(k, 2).expect("validated bitstring")] = v as f64 / self.shots as f64;
        }
        f
    }
}

#[derive(Serialize, Deserialize)]
struct CountsDoc {
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl Serialize for Counts {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CountsDoc {
            shots: self.shots,
            counts: self.table.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Counts {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = CountsDoc::deserialize(d)?;
        let width = doc.counts.keys().next().map(String::len).unwrap_or(0);
        Counts::new(doc.shots, width, doc.counts).map_err(serde::de::Error::custom)
    }
}

pub fn parse_counts(json: &str) -> Result<Counts, CountsError> {
    serde_json::from_str(json).map_err(|e| CountsError::Json(e.to_string()))
}

/// Formats an outcome index as a fixed-width bitstring, bit 0 rightmost.
pub fn bitstring(index: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|k| if (index >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Applies per-pair and per-qubit confusion matrices to a distribution.
pub fn apply_readout(p: &ProbDist, ro: &ReadoutModel, matching: &PairMatching) -> Result<ProbDist, SimError> {
    let layout = matching.qubits();
    if layout != p.qubits {
        return Err(SimError::ReadoutLayout {
            layout,
            measured: p.qubits.clone(),
        });
    }
    let pos = |q: usize| p.qubits.iter().position(|&m| m == q).expect("qubit in layout");
    let mut probs = p.probs.clone();
    let len = probs.len();
    for &(q0, q1) in &matching.pairs {
        let m = ro
            .pair_matrices
            .get(&(q0, q1))
            .ok_or_else(|| SimError::MissingReadout(format!("pair ({q0}, {q1})")))?;
        let (b0, b1) = (1usize << pos(q0), 1usize << pos(q1));
        for base in (0..len).filter(|i| i & (b0 | b1) == 0) {
            let idx = [base, base | b0, base | b1, base | b0 | b1];
            let v = idx.map(|i| probs[i]);
            for (row, &i) in idx.iter().enumerate() {
                probs[i] = (0..4).map(|col| m[row][col] * v[col]).sum();
            }
        }
    }
    for &q in &matching.singles {
        let m = ro
            .single_matrices
            .get(&q)
            .ok_or_else(|| SimError::MissingReadout(format!("qubit {q}")))?;
        let b = 1usize << pos(q);
        for base in (0..len).filter(|i| i & b == 0) {
            let (v0, v1) = (probs[base], probs[base | b]);
            probs[base] = m[0][0] * v0 + m[0][1] * v1;
            probs[base | b] = m[1][0] * v0 + m[1][1] * v1;
        }
    }
    let total: f64 = probs.iter().sum();
    for v in &mut probs {
        *v /= total;
    }
    Ok(ProbDist {
        qubits: p.qubits.clone(),
        probs,
    })
}

/// Final density matrix of a circuit (measurements ignored). With a model,
/// each op's ideal unitary is followed by its error channel.
pub fn evolve(c: &Circuit, model: Option<&NoiseModel>, opts: &SimOptions) -> Result<DensityMatrix, SimError> {
    if c.num_qubits() > opts.max_qubits {
        return Err(SimError::TooManyQubits {
            got: c.num_qubits(),
            cap: opts.max_qubits,
        });
    }
    let mut rho = DensityMatrix::zero_state(c.num_qubits());
    let mut cache: HashMap<(GateTag, Vec<usize>), Superop> = HashMap::new();
    for op in c.ops() {
        if op.is_measure() {
            continue;
        }
        let noise = match model {
            Some(m) => m.channel_for(op)?,
            None => None,
        };
        match (&op.kind, noise) {
            (GateKind::Rz(a), None) => rho.apply_rz(op.qubits[0], *a),
            (kind, None) => {
                let key = (op.tag(), op.qubits.clone());
                let s = cache
                    .entry(key)
                    .or_insert_with(|| Superop::from_unitary(&gates::unitary(kind).expect("unitary gate")));
                rho.apply_superop(s, &op.qubits);
            }
            (kind, Some(Cow::Borrowed(ch))) if op.duration_override.is_none() => {
                let key = (op.tag(), op.qubits.clone());
                let s = cache.entry(key).or_insert_with(|| fused(kind, ch));
                rho.apply_superop(s, &op.qubits);
            }
            (kind, Some(ch)) => {
                let s = fused(kind, &ch);
                rho.apply_superop(&s, &op.qubits);
            }
        }
    }
    Ok(rho)
}

fn fused(kind: &GateKind, noise: &KrausChannel) -> Superop {
    let u = Superop::from_unitary(&gates::unitary(kind).expect("unitary gate"));
    noise.superoperator().after(&u)
}

/// Exact outcome distribution of `c`'s measured qubits, after readout error
/// when a model is given.
pub fn simulate(c: &Circuit, model: Option<&NoiseModel>, opts: &SimOptions) -> Result<ProbDist, SimError> {
    let rho = evolve(c, model, opts)?;
    let measured = c.measured_qubits();
    let ideal = ProbDist::new(measured.clone(), rho.marginal(&measured));
    match model {
        Some(m) => apply_readout(&ideal, m.readout(), m.matching()),
        None => Ok(ideal),
    }
}

/// Multinomial sample of `shots` outcomes, deterministic per `(p, shots, seed)`.
pub fn sample_counts(p: &ProbDist, shots: u64, seed: u64) -> Result<Counts, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut cum = Vec::with_capacity(p.probs.len());
    let mut acc = 0.0;
    for &v in &p.probs {
        acc += v.max(0.0);
        cum.push(acc);
    }
    let last_nonzero = p.probs.iter().rposition(|&v| v > 0.0).unwrap_or(0);
    let mut hits = vec![0u64; p.probs.len()];
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        let i = cum.partition_point(|&c| c <= u).min(last_nonzero);
        hits[i] += 1;
    }
    let width = p.num_bits();
    let table = hits
        .into_iter()
        .enumerate()
        .filter(|(_, h)| *h > 0)
        .map(|(i, h)| (bitstring(i, width), h))
        .collect();
    Ok(Counts::new(shots, width, table).expect("sampled counts are consistent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::noise::{depolarizing_1q, kron2};

    fn bell() -> Circuit {
        CircuitBuilder::new("bell", 2).h(0).cx(0, 1).measure_all().build().unwrap()
    }

    #[test]
    fn bell_state_ideal() {
        let p = simulate(&bell(), None, &SimOptions::default()).unwrap();
        assert!((p.prob("00") - 0.5).abs() < 1e-12);
        assert!((p.prob("11") - 0.5).abs() < 1e-12);
        assert!(p.prob("01").abs() < 1e-12 && p.prob("10").abs() < 1e-12);
    }

    #[test]
    fn empty_circuit_is_all_zeros() {
        let c = CircuitBuilder::new("e", 3).measure_all().build().unwrap();
        let p = simulate(&c, None, &SimOptions::default()).unwrap();
        assert_eq!(p.prob("000"), 1.0);
    }

    #[test]
    fn qubit_cap_enforced() {
        let c = CircuitBuilder::new("big", 4).build().unwrap();
        let err = simulate(&c, None, &SimOptions { max_qubits: 3 }).unwrap_err();
        assert_eq!(err, SimError::TooManyQubits { got: 4, cap: 3 });
    }

    #[test]
    fn identity_channel_leaves_state() {
        let mut rho = DensityMatrix::zero_state(2);
        rho.apply_channel(&KrausChannel::identity(1), &[0]).unwrap();
        let h = KrausChannel::unitary(gates::hadamard());
        rho.apply_channel(&h, &[1]).unwrap();
        let before = rho.clone();
        rho.apply_channel(&KrausChannel::identity(2), &[1, 0]).unwrap();
        assert_eq!(rho, before);
    }

    #[test]
    fn full_depolarizing_flips_z_expectation() {
        let mut rho = DensityMatrix::zero_state(1);
        rho.apply_channel(&depolarizing_1q(1.0), &[0]).unwrap();
        let z = rho.get(0, 0).re - rho.get(1, 1).re;
        assert!((z + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let mut rho = DensityMatrix::zero_state(2);
        let err = rho.apply_channel(&KrausChannel::identity(2), &[0]).unwrap_err();
        assert_eq!(err, SimError::ArityMismatch { channel: 2, qubits: 1 });
    }

    #[test]
    fn single_readout_flip() {
        let ideal = ProbDist::new(vec![0], vec![0.0, 1.0]);
        let ro = ReadoutModel {
            single_matrices: [(0, [[1.0, 0.1], [0.0, 0.9]])].into_iter().collect(),
            ..Default::default()
        };
        let out = apply_readout(&ideal, &ro, &PairMatching::all_singles(&[0])).unwrap();
        assert!((out.prob("1") - 0.9).abs() < 1e-15);
        assert!((out.prob("0") - 0.1).abs() < 1e-15);
    }

    #[test]
    fn pair_readout_correlated_flip() {
        let ideal = ProbDist::new(vec![0, 1], vec![1.0, 0.0, 0.0, 0.0]);
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let mut m = kron2(&id, &id);
        m[0][0] = 0.99;
        m[3][0] = 0.01;
        let ro = ReadoutModel {
            pair_matrices: [((0, 1), m)].into_iter().collect(),
            ..Default::default()
        };
        let matching = PairMatching {
            pairs: vec![(0, 1)],
            singles: vec![],
        };
        let out = apply_readout(&ideal, &ro, &matching).unwrap();
        assert!((out.prob("11") - 0.01).abs() < 1e-15);
        assert!((out.prob("00") - 0.99).abs() < 1e-15);
    }

    #[test]
    fn readout_layout_mismatch() {
        let ideal = ProbDist::new(vec![0, 1], vec![1.0, 0.0, 0.0, 0.0]);
        let err = apply_readout(&ideal, &ReadoutModel::default(), &PairMatching::all_singles(&[0]));
        assert!(matches!(err, Err(SimError::ReadoutLayout { .. })));
    }

    #[test]
    fn sampling_point_mass_and_determinism() {
        let p = ProbDist::new(vec![0, 1], vec![0.0, 0.0, 1.0, 0.0]);
        let c = sample_counts(&p, 1000, 7).unwrap();
        assert_eq!(c.get("10"), 1000);
        let q = ProbDist::new(vec![0, 1], vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(sample_counts(&q, 500, 3).unwrap(), sample_counts(&q, 500, 3).unwrap());
        assert!(sample_counts(&q, 0, 3).is_err());
    }

    #[test]
    fn sampling_concentrates() {
        let q = ProbDist::new(vec![0, 1, 2], vec![0.05, 0.1, 0.15, 0.2, 0.1, 0.1, 0.25, 0.05]);
        let shots = 30_000u64;
        let bound = 4.0 / (shots as f64).sqrt();
        for seed in 0..20 {
            let f = sample_counts(&q, shots, seed).unwrap().frequencies();
            for (a, b) in f.iter().zip(&q.probs) {
                assert!((a - b).abs() < bound, "seed {seed}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn counts_json_round_trip_and_validation() {
        let c: Counts = serde_json::from_str(r#"{"shots":1000,"counts":{"11":600,"00":400}}"#).unwrap();
        assert_eq!(c.width(), 2);
        assert_eq!(c.frequencies(), vec![0.4, 0.0, 0.0, 0.6]);
        let again: Counts = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(again, c);
        assert!(parse_counts(r#"{"shots":10,"counts":{"1":4}}"#).is_err());
        assert!(parse_counts(r#"{"shots":10,"counts":{"1":4,"011":6}}"#).is_err());
    }

    #[test]
    fn bitstrings_are_qubit_zero_rightmost() {
        let c = CircuitBuilder::new("x0", 3).x(0).measure_all().build().unwrap();
        let p = simulate(&c, None, &SimOptions::default()).unwrap();
        assert_eq!(p.prob("001"), 1.0);
        assert_eq!(bitstring(1, 3), "001");
    }
}
