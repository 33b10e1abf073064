//! Ideal unitaries of the native gate set.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::GateKind;
use crate::kraus::{c, identity, pauli_x, CMat};

pub fn sx() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)],
    )
}

pub fn rz(angle: f64) -> CMat {
    let z = Complex64::new(0.0, 0.0);
    CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(1.0, -angle / 2.0),
            z,
            z,
            Complex64::from_polar(1.0, angle / 2.0),
        ],
    )
}

pub fn hadamard() -> CMat {
    let h = c(FRAC_1_SQRT_2, 0.0);
    CMat::from_row_slice(2, 2, &[h, h, h, -h])
}

/// Control on the first qubit of the tuple, target on the second.
pub fn cx() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 1)] = c(1.0, 0.0);
    m[(2, 3)] = c(1.0, 0.0);
    m[(3, 2)] = c(1.0, 0.0);
    m
}

pub fn cz() -> CMat {
    let mut m = identity(4);
    m[(3, 3)] = c(-1.0, 0.0);
    m
}

/// Ideal unitary of a gate; `None` for measurement.
pub fn unitary(kind: &GateKind) -> Option<CMat> {
    Some(match *kind {
        GateKind::Id => identity(2),
        GateKind::Rz(a) => rz(a),
        GateKind::Sx => sx(),
        GateKind::X => pauli_x(),
        GateKind::Cx => cx(),
        GateKind::Cz => cz(),
        GateKind::Measure => return None,
    })
}

/// `true` if `a = e^{iφ} b` for some global phase, within `tol` (Frobenius).
pub fn equal_up_to_phase(a: &CMat, b: &CMat, tol: f64) -> bool {
    let overlap = (b.adjoint() * a).trace();
    if overlap.norm() < 1e-12 {
        return false;
    }
    let phase = overlap / overlap.norm();
    (a - b * phase).norm() < tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraus::{deviation_from_identity, pauli_z};

    #[test]
    fn sx_squares_to_x() {
        assert!((sx() * sx() - pauli_x()).norm() < 1e-15);
    }

    #[test]
    fn all_unitaries_are_unitary() {
        for k in [
            GateKind::Id,
            GateKind::Rz(0.37),
            GateKind::Sx,
            GateKind::X,
            GateKind::Cx,
            GateKind::Cz,
        ] {
            let u = unitary(&k).unwrap();
            assert!(deviation_from_identity(&(u.adjoint() * &u)) < 1e-14);
        }
        assert!(unitary(&GateKind::Measure).is_none());
    }

    #[test]
    fn rz_pi_is_z_up_to_phase() {
        assert!(equal_up_to_phase(&rz(std::f64::consts::PI), &pauli_z(), 1e-14));
    }
}
