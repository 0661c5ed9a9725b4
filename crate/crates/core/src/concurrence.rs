//! Wootters concurrence, the ground truth every estimator is checked against.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix4c};
use crate::qstate::{DensityOperator, PureState, NORM_TOL};

const SVD_MAX_ITER: usize = 10_000;
/// Negative round-off below this magnitude is clamped to zero.
const CLAMP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceDiagnostics {
    /// Square roots of the eigenvalues of ρρ̃, descending.
    pub lambdas: [f64; 4],
    pub value: f64,
}

impl ConcurrenceDiagnostics {
    fn from_lambdas(mut lambdas: [f64; 4]) -> Self {
        for l in lambdas.iter_mut() {
            if *l < 0.0 && *l > -CLAMP_TOL {
                *l = 0.0;
            }
        }
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
        Self { lambdas, value }
    }
}

/// ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
pub fn spin_flip(rho: &DensityOperator) -> Matrix4c {
    spin_flip_matrix(rho.matrix())
}

pub fn spin_flip_matrix(m: &Matrix4c) -> Matrix4c {
    let yy = linalg::sigma_yy();
    yy * m.map(|z| z.conj()) * yy
}

/// C(ρ) = max(0, λ₁ − λ₂ − λ₃ − λ₄).
///
/// The λᵢ are taken as singular values of √ρ·√ρ̃, whose Gram matrix √ρ ρ̃ √ρ
/// is Hermitian and isospectral with ρρ̃. Working with singular values keeps
/// the small λᵢ accurate to machine precision instead of √ε.
pub fn concurrence_oracle(rho: &DensityOperator) -> Result<ConcurrenceDiagnostics> {
    let root = linalg::sqrt_psd(rho.matrix())?;
    let root_flipped = spin_flip_matrix(&root);
    let svd = SVD::try_new(root * root_flipped, false, false, f64::EPSILON, SVD_MAX_ITER)
        .ok_or(Error::EigSolveFailure)?;
    let sv = svd.singular_values;
    if sv.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigSolveFailure);
    }
    Ok(ConcurrenceDiagnostics::from_lambdas([sv[0], sv[1], sv[2], sv[3]]))
}

/// C(Ψ) = 2|c₊₊c₋₋ − c₊₋c₋₊|.
pub fn concurrence_pure(psi: &PureState) -> Result<f64> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr: n });
    }
    let c = |a, b| psi.coefficient(a, b);
    Ok(2.0 * (c(true, true) * c(false, false) - c(true, false) * c(false, true)).norm())
}
