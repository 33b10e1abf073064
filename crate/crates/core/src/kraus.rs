//! Complex matrix helpers and Kraus-channel algebra.
//!
//! Local operator convention: for an operator on the ordered qubit tuple
//! `(q0, q1)`, the local basis index is `2·b(q0) + b(q1)`, so `A ⊗ B` acts
//! with `A` on `q0` and `B` on `q1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `[I, X, Y, Z]`.
pub fn paulis() -> [CMat; 4] {
    [identity(2), pauli_x(), pauli_y(), pauli_z()]
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Frobenius norm of `m - id`.
pub fn deviation_from_identity(m: &CMat) -> f64 {
    (m - identity(m.nrows())).norm()
}

#[derive(Debug, Error, PartialEq)]
pub enum KrausError {
    #[error("channel arity {channel} does not match {qubits} target qubit(s)")]
    ArityMismatch { channel: usize, qubits: usize },
    #[error("operator of dimension {got} in a channel of dimension {expected}")]
    Dimension { expected: usize, got: usize },
}

/// A completely positive map given by Kraus operators of dimension `2^arity`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    arity: usize,
    operators: Vec<CMat>,
}

/// Operators with Frobenius norm below this are dropped during composition.
const NEGLIGIBLE: f64 = 1e-300;

impl KrausChannel {
    pub fn new(arity: usize, operators: Vec<CMat>) -> Result<Self, KrausError> {
        let dim = 1usize << arity;
        for op in &operators {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(KrausError::Dimension {
                    expected: dim,
                    got: op.nrows(),
                });
            }
        }
        Ok(Self { arity, operators })
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            arity,
            operators: vec![identity(1 << arity)],
        }
    }

    pub fn unitary(u: CMat) -> Self {
        let arity = u.nrows().trailing_zeros() as usize;
        Self {
            arity,
            operators: vec![u],
        }
    }

    /// Mixture of unitaries `Σ p_k U_k ρ U_k†`; zero-weight terms are skipped.
    pub fn mixture(arity: usize, terms: impl IntoIterator<Item = (f64, CMat)>) -> Self {
        let operators = terms
            .into_iter()
            .filter(|(p, _)| *p > 0.0)
            .map(|(p, u)| u * Complex64::from(p.sqrt()))
            .collect::<Vec<_>>();
        let operators = if operators.is_empty() {
            vec![CMat::zeros(1 << arity, 1 << arity)]
        } else {
            operators
        };
        Self { arity, operators }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn operators(&self) -> &[CMat] {
        &self.operators
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &KrausChannel) -> KrausChannel {
        assert_eq!(self.arity, first.arity, "composing channels of different arity");
        let mut ops = Vec::with_capacity(self.operators.len() * first.operators.len());
        for a in &self.operators {
            for b in &first.operators {
                let p = a * b;
                if p.norm() > NEGLIGIBLE {
                    ops.push(p);
                }
            }
        }
        if ops.is_empty() {
            ops.push(CMat::zeros(self.dim(), self.dim()));
        }
        KrausChannel {
            arity: self.arity,
            operators: ops,
        }
    }

    /// `self ⊗ other`, with `self` on the first qubit of the combined tuple.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let mut ops = Vec::with_capacity(self.operators.len() * other.operators.len());
        for a in &self.operators {
            for b in &other.operators {
                ops.push(kron(a, b));
            }
        }
        KrausChannel {
            arity: self.arity + other.arity,
            operators: ops,
        }
    }

    /// `Σ K†K`.
    pub fn gram(&self) -> CMat {
        self.operators
            .iter()
            .fold(CMat::zeros(self.dim(), self.dim()), |acc, k| acc + k.adjoint() * k)
    }

    /// Frobenius-norm distance of `Σ K†K` from the identity.
    pub fn completeness_error(&self) -> f64 {
        deviation_from_identity(&self.gram())
    }

    /// Applies the channel to a density matrix of the same dimension.
    pub fn apply_local(&self, rho: &CMat) -> CMat {
        self.operators
            .iter()
            .fold(CMat::zeros(self.dim(), self.dim()), |acc, k| {
                acc + k * rho * k.adjoint()
            })
    }

    /// Process (entanglement) fidelity with the identity, `Σ |Tr K|² / d²`.
    pub fn process_fidelity(&self) -> f64 {
        let d = self.dim() as f64;
        self.operators
            .iter()
            .map(|k| k.trace().norm_sqr())
            .sum::<f64>()
            / (d * d)
    }

    /// Average gate fidelity with the identity, `(d·F_pro + 1)/(d + 1)`.
    pub fn average_gate_fidelity(&self) -> f64 {
        let d = self.dim() as f64;
        (d * self.process_fidelity() + 1.0) / (d + 1.0)
    }

    pub fn superoperator(&self) -> Superop {
        Superop::from_kraus(self)
    }
}

/// Row-major superoperator `S[(i·d + j), (i'·d + j')] = Σ_k K[i,i'] conj(K[j,j'])`,
/// acting on row-major vectorized density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superop {
    arity: usize,
    data: Vec<Complex64>,
}

impl Superop {
    pub fn from_kraus(ch: &KrausChannel) -> Self {
        let d = ch.dim();
        let d2 = d * d;
        let mut data = vec![ZERO; d2 * d2];
        for k in ch.operators() {
            for i in 0..d {
                for ip in 0..d {
                    let a = k[(i, ip)];
                    if a == ZERO {
                        continue;
                    }
                    for j in 0..d {
                        for jp in 0..d {
                            let b = k[(j, jp)];
                            if b == ZERO {
                                continue;
                            }
                            data[(i * d + j) * d2 + ip * d + jp] += a * b.conj();
                        }
                    }
                }
            }
        }
        Self {
            arity: ch.arity(),
            data,
        }
    }

    pub fn from_unitary(u: &CMat) -> Self {
        Self::from_kraus(&KrausChannel::unitary(u.clone()))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Side length `d²` of the square matrix.
    pub fn size(&self) -> usize {
        1 << (2 * self.arity)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// `self · first`: superoperator of applying `first`, then `self`.
    pub fn after(&self, first: &Superop) -> Superop {
        assert_eq!(self.arity, first.arity);
        let n = self.size();
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for col in 0..n {
                    data[r * n + col] += a * first.data[k * n + col];
                }
            }
        }
        Superop {
            arity: self.arity,
            data,
        }
    }
}
