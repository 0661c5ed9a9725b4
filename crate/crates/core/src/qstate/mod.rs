//! Two-qubit states in matrix and Bloch form.
//!
//! Basis order is |00⟩, |01⟩, |10⟩, |11⟩ with qubit A as the first label and
//! the σ_z = +1 eigenstate written as 0.

mod json;
mod random;

pub(crate) use random::dirichlet_uniform;

pub use json::{bloch_file, BlochRepr, ComplexEntry, Provenance, StateFile, StateRepr};
pub use random::{
    random_local_unitary, random_mixed_qubit, random_orthonormal, random_pure, random_pure_with,
    random_product_state, random_rank_k, random_rank_k_with, rng_from_seed,
};

use nalgebra::{Matrix2, Matrix3, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix2c, Matrix4c, Pauli};

pub type ComplexMatrix4 = Matrix4c;

/// Tolerance for the Hermiticity, trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;
/// Default relative tolerance for [`rank_of`].
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// Tolerance for [`PureState::new`] normalization.
pub const NORM_TOL: f64 = 1e-8;

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix4,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix4) -> Result<Self> {
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = linalg::trace(&matrix);
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)?[3];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (smallest eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { matrix: linalg::hermitian_part(&matrix) })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix4) -> Self {
        Self { matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { matrix: linalg::outer(psi.amplitudes()) }
    }

    pub fn maximally_mixed() -> Self {
        Self { matrix: Matrix4c::identity().scale(0.25) }
    }

    /// Convex combination Σ wᵢ ρᵢ. Weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < -STATE_TOL) || (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        let matrix = parts
            .iter()
            .fold(Matrix4c::zeros(), |acc, (w, rho)| acc + rho.matrix.scale(*w));
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix4 {
        self.matrix
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> Result<Vector4<f64>> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Diagonal weight ⟨k|ρ|k⟩ of computational basis state `k`.
    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }
}

/// Normalized two-qubit amplitudes c_{mμ}, indexed as `2·a + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: [Complex64; 4],
}

impl PureState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let psi = Self { amps };
        let n = psi.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(psi)
    }

    /// Rescales to unit norm.
    pub fn normalized(amps: [Complex64; 4]) -> Result<Self> {
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n * n });
        }
        Ok(Self { amps: amps.map(|z| z / n) })
    }

    /// No normalization check at all.
    pub fn from_raw(amps: [Complex64; 4]) -> Self {
        Self { amps }
    }

    pub fn from_real(amps: [f64; 4]) -> Result<Self> {
        Self::new(amps.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn basis(k: usize) -> Self {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// |a⟩ ⊗ |b⟩ for single-qubit amplitude pairs (normalized on the way in).
    pub fn product(a: [Complex64; 2], b: [Complex64; 2]) -> Result<Self> {
        Self::normalized([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    /// c_{mμ} with m, μ = ±½ given as booleans (`true` ↦ +½).
    pub fn coefficient(&self, m_up: bool, mu_up: bool) -> Complex64 {
        let a = usize::from(!m_up);
        let b = usize::from(!mu_up);
        self.amps[2 * a + b]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }
}

/// ρ = ¼{1 + σᴬ·P + σᴮ·S + σᴬᵢσᴮⱼ Πᵢⱼ}.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochDecomposition {
    pub p: Vector3<f64>,
    pub s: Vector3<f64>,
    pub pi: Matrix3<f64>,
}

impl BlochDecomposition {
    pub fn zero() -> Self {
        Self { p: Vector3::zeros(), s: Vector3::zeros(), pi: Matrix3::zeros() }
    }

    /// Applies the induced rotations: P → R₁P, S → R₂S, Π → R₁ΠR₂ᵀ.
    pub fn rotated(&self, u: &LocalUnitary) -> Self {
        let r1 = u.rotation_a();
        let r2 = u.rotation_b();
        Self { p: r1 * self.p, s: r2 * self.s, pi: r1 * self.pi * r2.transpose() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dp = (self.p - other.p).amax();
        let ds = (self.s - other.s).amax();
        let dpi = (self.pi - other.pi).amax();
        dp.max(ds).max(dpi)
    }
}

pub fn decompose(rho: &DensityOperator) -> BlochDecomposition {
    decompose_matrix(rho.matrix())
}

pub(crate) fn decompose_matrix(m: &ComplexMatrix4) -> BlochDecomposition {
    let ev = |a: Pauli, b: Pauli| linalg::trace(&(m * linalg::pauli_product(a, b))).re;
    let p = Vector3::from_fn(|i, _| ev(Pauli::XYZ[i], Pauli::I));
    let s = Vector3::from_fn(|j, _| ev(Pauli::I, Pauli::XYZ[j]));
    let pi = Matrix3::from_fn(|i, j| ev(Pauli::XYZ[i], Pauli::XYZ[j]));
    BlochDecomposition { p, s, pi }
}

/// Builds the matrix of a Bloch decomposition without any positivity check.
pub fn assemble_matrix(bloch: &BlochDecomposition) -> ComplexMatrix4 {
    let mut m = Matrix4c::identity();
    for i in 0..3 {
        m += linalg::pauli_product(Pauli::XYZ[i], Pauli::I).scale(bloch.p[i]);
        m += linalg::pauli_product(Pauli::I, Pauli::XYZ[i]).scale(bloch.s[i]);
        for j in 0..3 {
            m += linalg::pauli_product(Pauli::XYZ[i], Pauli::XYZ[j]).scale(bloch.pi[(i, j)]);
        }
    }
    m.scale(0.25)
}

pub fn assemble(bloch: &BlochDecomposition) -> Result<DensityOperator> {
    let m = assemble_matrix(bloch);
    let min = linalg::hermitian_eigenvalues(&m)?[3];
    if min < -STATE_TOL || !min.is_finite() {
        return Err(Error::NotAState { min_eigenvalue: min });
    }
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// Number of eigenvalues strictly above `tol · λ_max`.
pub fn rank_of(rho: &DensityOperator, tol: f64) -> usize {
    let values = match rho.eigenvalues() {
        Ok(v) => v,
        Err(_) => return 4,
    };
    let cutoff = tol * values[0];
    values.iter().filter(|&&v| v > cutoff).count()
}

/// Independent SU(2) actions on the two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    pub u_a: Matrix2c,
    pub u_b: Matrix2c,
}

impl LocalUnitary {
    pub const UNITARY_TOL: f64 = 1e-12;

    pub fn new(u_a: Matrix2c, u_b: Matrix2c) -> Result<Self> {
        for (name, u) in [("u_a", &u_a), ("u_b", &u_b)] {
            let defect = (u.adjoint() * u - Matrix2c::identity())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if defect > Self::UNITARY_TOL {
                return Err(Error::BadArgs(format!("{name} is not unitary (defect {defect:.3e})")));
            }
        }
        Ok(Self { u_a, u_b })
    }

    pub fn identity() -> Self {
        Self { u_a: Matrix2c::identity(), u_b: Matrix2c::identity() }
    }

    /// SU(2) element from a unit quaternion (q0 + i q1, q2 + i q3).
    pub fn su2_from_quaternion(q: [f64; 4]) -> Matrix2c {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let a = Complex64::new(q[0] / n, q[1] / n);
        let b = Complex64::new(q[2] / n, q[3] / n);
        Matrix2::new(a, -b.conj(), b, a.conj())
    }

    pub fn matrix(&self) -> Matrix4c {
        linalg::kron(&self.u_a, &self.u_b)
    }

    pub fn rotation_a(&self) -> Matrix3<f64> {
        induced_rotation(&self.u_a)
    }

    pub fn rotation_b(&self) -> Matrix3<f64> {
        induced_rotation(&self.u_b)
    }
}

/// R_ij = ½ Tr(σᵢ U σⱼ U†).
fn induced_rotation(u: &Matrix2c) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| {
        let m = Pauli::XYZ[i].matrix() * u * Pauli::XYZ[j].matrix() * u.adjoint();
        0.5 * (m[(0, 0)] + m[(1, 1)]).re
    })
}

pub fn apply_local(rho: &DensityOperator, u: &LocalUnitary) -> DensityOperator {
    let full = u.matrix();
    DensityOperator::from_matrix_unchecked(linalg::hermitian_part(&(full * rho.matrix() * full.adjoint())))
}

/// Named states used throughout the examples and the CLI.
pub mod named {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn bell_phi_plus() -> PureState {
        PureState::from_real([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).expect("normalized")
    }

    pub fn bell_phi_minus() -> PureState {
        PureState::from_real([FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]).expect("normalized")
    }

    pub fn bell_psi_plus() -> PureState {
        PureState::from_real([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).expect("normalized")
    }

    /// Singlet (|01⟩ − |10⟩)/√2.
    pub fn bell_psi_minus() -> PureState {
        PureState::from_real([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).expect("normalized")
    }

    /// p·|Φ+⟩⟨Φ+| + (1−p)·1/4.
    pub fn werner(p: f64) -> Result<DensityOperator> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadArgs(format!("Werner weight {p} outside [0, 1]")));
        }
        let bell = DensityOperator::from_pure(&bell_phi_plus());
        DensityOperator::mixture(&[(p, &bell), (1.0 - p, &DensityOperator::maximally_mixed())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag3(a: f64, b: f64, c: f64) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(a, b, c))
    }

    #[test]
    fn decompose_maximally_mixed() {
        let b = decompose(&DensityOperator::maximally_mixed());
        assert!(b.max_abs_diff(&BlochDecomposition::zero()) < 1e-15);
    }

    #[test]
    fn decompose_phi_plus() {
        let b = decompose(&DensityOperator::from_pure(&named::bell_phi_plus()));
        assert!(b.p.amax() < 1e-15 && b.s.amax() < 1e-15);
        assert!((b.pi - diag3(1.0, -1.0, 1.0)).amax() < 1e-15);
    }

    #[test]
    fn decompose_up_up() {
        let b = decompose(&DensityOperator::from_pure(&PureState::basis(0)));
        assert_eq!(b.p, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(b.s, Vector3::new(0.0, 0.0, 1.0));
        assert!((b.pi - diag3(0.0, 0.0, 1.0)).amax() < 1e-15);
    }

    #[test]
    fn assemble_examples() {
        let rho = assemble(&BlochDecomposition::zero()).unwrap();
        assert!(linalg::max_abs_diff(rho.matrix(), DensityOperator::maximally_mixed().matrix()) < 1e-15);

        let bell = BlochDecomposition { pi: diag3(1.0, -1.0, 1.0), ..BlochDecomposition::zero() };
        let rho = assemble(&bell).unwrap();
        let proj = DensityOperator::from_pure(&named::bell_phi_plus());
        assert!(linalg::max_abs_diff(rho.matrix(), proj.matrix()) < 1e-15);

        let bad = BlochDecomposition { p: Vector3::new(0.0, 0.0, 2.0), ..BlochDecomposition::zero() };
        assert!(matches!(assemble(&bad), Err(Error::NotAState { .. })));
    }

    #[test]
    fn density_operator_rejects_invalid_matrices() {
        let mut m = Matrix4c::identity().scale(0.25);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(DensityOperator::new(m), Err(Error::InvalidState(_))));

        let m = Matrix4c::identity().scale(0.3);
        assert!(matches!(DensityOperator::new(m), Err(Error::InvalidState(_))));

        let m = Matrix4c::from_diagonal(&Vector4::new(0.6, 0.6, -0.2, 0.0).map(|x| Complex64::new(x, 0.0)));
        assert!(matches!(DensityOperator::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn rank_examples() {
        let pure = DensityOperator::from_pure(&named::bell_psi_minus());
        assert_eq!(rank_of(&pure, DEFAULT_RANK_TOL), 1);

        let up = DensityOperator::from_pure(&PureState::basis(0));
        let other = DensityOperator::from_pure(&named::bell_psi_plus());
        let mix = DensityOperator::mixture(&[(0.5, &up), (0.5, &other)]).unwrap();
        assert_eq!(rank_of(&mix, DEFAULT_RANK_TOL), 2);

        let werner = named::werner(0.5).unwrap();
        let ev = werner.eigenvalues().unwrap();
        assert_abs_diff_eq!(ev[0], 0.625, epsilon = 1e-14);
        for k in 1..4 {
            assert_abs_diff_eq!(ev[k], 0.125, epsilon = 1e-14);
        }
        assert_eq!(rank_of(&werner, DEFAULT_RANK_TOL), 4);
    }

    #[test]
    fn identity_unitary_is_noop() {
        let rho = named::werner(0.3).unwrap();
        let out = apply_local(&rho, &LocalUnitary::identity());
        assert!(linalg::max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn phi_plus_invariant_under_u_tensor_conjugate_u() {
        let u = LocalUnitary::su2_from_quaternion([0.3, -0.5, 0.7, 0.2]);
        let local = LocalUnitary::new(u, u.map(|z| z.conj())).unwrap();
        let rho = DensityOperator::from_pure(&named::bell_phi_plus());
        let out = apply_local(&rho, &local);
        assert!(linalg::max_abs_diff(out.matrix(), rho.matrix()) < 1e-14);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = Matrix2c::identity().scale(1.1);
        assert!(LocalUnitary::new(m, Matrix2c::identity()).is_err());
    }

    #[test]
    fn coefficient_indexing() {
        let psi = PureState::from_real([0.1, 0.2, 0.3, (1.0f64 - 0.14).sqrt()]).unwrap();
        assert_eq!(psi.coefficient(true, true).re, 0.1);
        assert_eq!(psi.coefficient(true, false).re, 0.2);
        assert_eq!(psi.coefficient(false, true).re, 0.3);
    }

    #[test]
    fn pure_state_normalization_checks() {
        assert!(matches!(
            PureState::from_real([1.0, 1.0, 0.0, 0.0]),
            Err(Error::NotNormalized { .. })
        ));
        let psi = PureState::normalized([Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-15);
    }
}
