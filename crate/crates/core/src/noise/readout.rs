//! Confusion-matrix readout models, independent and pairwise-correlated.
//!
//! Matrices are column-stochastic: `M[i][j] = P(measure i | true j)`. For a
//! pair `(q0, q1)` with `q0 < q1` the local index is `2·b(q1) + b(q0)`, so
//! the independent matrix is `M_q1 ⊗ M_q0`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::channels::{ClampTally, Clamped};
use super::params::NoiseParams;
use crate::calibration::{DeviceCalibration, PairMatching, QubitCal};

pub type Matrix2 = [[f64; 2]; 2];
pub type Matrix4 = [[f64; 4]; 4];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub pair_matrices: BTreeMap<(usize, usize), Matrix4>,
    pub single_matrices: BTreeMap<usize, Matrix2>,
}

pub fn single_matrix(q: &QubitCal) -> Matrix2 {
    [
        [1.0 - q.readout_p01, q.readout_p10],
        [q.readout_p01, 1.0 - q.readout_p10],
    ]
}

/// `high ⊗ low`, where `low` acts on the least significant local bit.
pub fn kron2(high: &Matrix2, low: &Matrix2) -> Matrix4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = high[i >> 1][j >> 1] * low[i & 1][j & 1];
        }
    }
    m
}

/// Moves `amount` of column `col` from row `from` to row `to`, limited so that
/// no entry leaves `[0, 1]`. Negative amounts move mass the other way.
fn transfer(m: &mut Matrix4, col: usize, from: usize, to: usize, amount: f64) -> bool {
    let lo = -m[to][col];
    let hi = m[from][col];
    let t = if amount.is_nan() { 0.0 } else { amount.clamp(lo, hi) };
    m[from][col] -= t;
    m[to][col] += t;
    t != amount
}

/// Applies the `|00⟩↔|11⟩` and `|01⟩↔|10⟩` correlated transfers to an
/// independent pair matrix. Returns the number of clamp events.
pub fn correlate_pair(m: &mut Matrix4, lambda_0011: f64, lambda_0110: f64) -> u64 {
    let mut clamps = 0;
    for (col, from, to, amount) in [
        (0, 0, 3, lambda_0011),
        (3, 3, 0, lambda_0011),
        (1, 1, 2, lambda_0110),
        (2, 2, 1, lambda_0110),
    ] {
        if transfer(m, col, from, to, amount) {
            clamps += 1;
        }
    }
    clamps
}

pub fn column_stochastic_error4(m: &Matrix4) -> f64 {
    (0..4)
        .map(|j| ((0..4).map(|i| m[i][j]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

pub fn column_stochastic_error2(m: &Matrix2) -> f64 {
    (0..2)
        .map(|j| ((0..2).map(|i| m[i][j]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Correlated readout model over a pair matching. Pairs start from the
/// independent product and receive transfers `λ = a·ē + b`, where `ē` is the
/// pair's mean readout error.
pub fn build_readout_model(
    params: &NoiseParams,
    cal: &DeviceCalibration,
    matching: &PairMatching,
    tally: &mut ClampTally,
) -> ReadoutModel {
    let mut model = ReadoutModel::default();
    for &q in &matching.singles {
        model.single_matrices.insert(q, single_matrix(&cal.qubits()[q]));
    }
    for &(q0, q1) in &matching.pairs {
        let (c0, c1) = (&cal.qubits()[q0], &cal.qubits()[q1]);
        let mut m = kron2(&single_matrix(c1), &single_matrix(c0));
        let e_bar = 0.5 * (c0.readout_error() + c1.readout_error());
        let l0011 = params.ro_a_0011 * e_bar + params.ro_b_0011;
        let l0110 = params.ro_a_0110 * e_bar + params.ro_b_0110;
        // a transfer can never exceed unit mass
        let l0011 = unit_or_signed(l0011, tally);
        let l0110 = unit_or_signed(l0110, tally);
        tally.readout += correlate_pair(&mut m, l0011, l0110);
        model.pair_matrices.insert((q0, q1), m);
    }
    model
}

fn unit_or_signed(x: f64, tally: &mut ClampTally) -> f64 {
    if x.is_nan() {
        tally.readout += 1;
        return 0.0;
    }
    let mag = Clamped::unit(x.abs());
    if mag.clamped {
        tally.readout += 1;
    }
    mag.value.copysign(x)
}

/// Independent per-qubit readout for the measured qubits.
pub fn independent_readout(cal: &DeviceCalibration, measured: &[usize]) -> ReadoutModel {
    ReadoutModel {
        pair_matrices: BTreeMap::new(),
        single_matrices: measured
            .iter()
            .map(|&q| (q, single_matrix(&cal.qubits()[q])))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDEAL: Matrix2 = [[1.0, 0.0], [0.0, 1.0]];

    #[test]
    fn zero_lambda_keeps_product() {
        let a = [[0.98, 0.03], [0.02, 0.97]];
        let b = [[0.99, 0.05], [0.01, 0.95]];
        let mut m = kron2(&a, &b);
        let before = m;
        assert_eq!(correlate_pair(&mut m, 0.0, 0.0), 0);
        assert_eq!(m, before);
    }

    #[test]
    fn transfer_on_ideal_matrix() {
        let mut m = kron2(&IDEAL, &IDEAL);
        correlate_pair(&mut m, 0.01, 0.0);
        assert!((m[0][0] - 0.99).abs() < 1e-15);
        assert!((m[3][0] - 0.01).abs() < 1e-15);
        assert!((m[3][3] - 0.99).abs() < 1e-15);
        assert!((m[0][3] - 0.01).abs() < 1e-15);
        assert_eq!(m[1][1], 1.0);
        assert_eq!(m[2][2], 1.0);
        assert!(column_stochastic_error4(&m) < 1e-15);
    }

    #[test]
    fn swap_transfer_on_ideal_matrix() {
        let mut m = kron2(&IDEAL, &IDEAL);
        correlate_pair(&mut m, 0.0, 0.02);
        assert!((m[1][1] - 0.98).abs() < 1e-15);
        assert!((m[2][1] - 0.02).abs() < 1e-15);
        assert!((m[2][2] - 0.98).abs() < 1e-15);
        assert!((m[1][2] - 0.02).abs() < 1e-15);
    }

    #[test]
    fn oversized_transfer_is_clamped() {
        let mut m = kron2(&IDEAL, &IDEAL);
        let clamps = correlate_pair(&mut m, 1.5, -0.2);
        assert_eq!(clamps, 4);
        for row in &m {
            for v in row {
                assert!((0.0..=1.0).contains(v));
            }
        }
        assert!(column_stochastic_error4(&m) < 1e-15);
    }

    #[test]
    fn kron_orders_low_bit_second() {
        let high = [[0.9, 0.0], [0.1, 1.0]];
        let m = kron2(&high, &IDEAL);
        // true |10⟩ (index 2: high bit set) never flips; true |00⟩ flips high bit w.p. 0.1
        assert!((m[2][0] - 0.1).abs() < 1e-15);
        assert_eq!(m[1][0], 0.0);
    }
}
