//! Small dense complex helpers shared by the state, oracle and measurement code.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix2c = Matrix2<Complex64>;
pub type Matrix4c = Matrix4<Complex64>;

const EIG_MAX_ITER: usize = 10_000;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Pauli operator; `I` is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    #[serde(rename = "0", alias = "i", alias = "I")]
    I,
    #[serde(rename = "x", alias = "X")]
    X,
    #[serde(rename = "y", alias = "Y")]
    Y,
    #[serde(rename = "z", alias = "Z")]
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Matrix2c {
        match self {
            Pauli::I => Matrix2::new(ONE, ZERO, ZERO, ONE),
            Pauli::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            Pauli::Y => Matrix2::new(ZERO, -I, I, ZERO),
            Pauli::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Pauli::I => "0",
            Pauli::X => "x",
            Pauli::Y => "y",
            Pauli::Z => "z",
        }
    }
}

impl std::str::FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "i" | "I" => Ok(Pauli::I),
            "x" | "X" => Ok(Pauli::X),
            "y" | "Y" => Ok(Pauli::Y),
            "z" | "Z" => Ok(Pauli::Z),
            other => Err(Error::BadArgs(format!("unknown Pauli label '{other}'"))),
        }
    }
}

/// Kronecker product `a ⊗ b`, with `a` acting on the first (most significant) qubit.
pub fn kron(a: &Matrix2c, b: &Matrix2c) -> Matrix4c {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub fn pauli_product(a: Pauli, b: Pauli) -> Matrix4c {
    kron(&a.matrix(), &b.matrix())
}

/// σ_y ⊗ σ_y, real: entries ∓1 on the anti-diagonal.
pub fn sigma_yy() -> Matrix4c {
    pauli_product(Pauli::Y, Pauli::Y)
}

pub fn trace(m: &Matrix4c) -> Complex64 {
    (0..4).map(|i| m[(i, i)]).sum()
}

pub fn hermitian_part(m: &Matrix4c) -> Matrix4c {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &Matrix4c) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues sorted descending.
pub fn hermitian_eigen(m: &Matrix4c) -> Result<(Vector4<f64>, Matrix4c)> {
    let eig = SymmetricEigen::try_new(hermitian_part(m), f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::EigSolveFailure)?;
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = Vector4::from_fn(|i, _| eig.eigenvalues[order[i]]);
    let vectors = Matrix4::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(m: &Matrix4c) -> Result<Vector4<f64>> {
    hermitian_eigen(m).map(|(v, _)| v)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Negative round-off eigenvalues are clamped to zero.
pub fn sqrt_psd(m: &Matrix4c) -> Result<Matrix4c> {
    let (values, vectors) = hermitian_eigen(m)?;
    let root = Matrix4::from_diagonal(&values.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0)));
    Ok(vectors * root * vectors.adjoint())
}

/// Projector |v⟩⟨v| for a column of amplitudes.
pub fn outer(v: &[Complex64; 4]) -> Matrix4c {
    Matrix4::from_fn(|r, c| v[r] * v[c].conj())
}

pub fn max_abs_diff(a: &Matrix4c, b: &Matrix4c) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
