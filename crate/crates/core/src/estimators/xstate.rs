use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::guarded_sqrt;
use crate::error::{Error, Result};
use crate::invariants::InvariantVector;
use crate::linalg::Matrix4c;
use crate::qstate::DensityOperator;

const SUM_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-12;
const I1_MIN: f64 = 1e-12;

/// diag(u₊, w₁, w₂, u₋) with coherence z between |01⟩ and |10⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XState {
    pub u_plus: f64,
    pub u_minus: f64,
    pub w1: f64,
    pub w2: f64,
    pub z: Complex64,
}

impl XState {
    pub fn new(u_plus: f64, u_minus: f64, w1: f64, w2: f64, z: Complex64) -> Result<Self> {
        if [u_plus, u_minus, w1, w2].iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::InvalidState("X-state populations must be nonnegative".into()));
        }
        let total = u_plus + u_minus + w1 + w2;
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidState(format!("X-state populations sum to {total}")));
        }
        if z.norm_sqr() > w1 * w2 + PSD_TOL {
            return Err(Error::InvalidState(format!("|z|^2 = {} exceeds w1*w2 = {}", z.norm_sqr(), w1 * w2)));
        }
        Ok(Self { u_plus, u_minus, w1, w2, z })
    }

    pub fn matrix(&self) -> Matrix4c {
        let mut m = Matrix4c::zeros();
        m[(0, 0)] = self.u_plus.into();
        m[(1, 1)] = self.w1.into();
        m[(2, 2)] = self.w2.into();
        m[(3, 3)] = self.u_minus.into();
        m[(1, 2)] = self.z;
        m[(2, 1)] = self.z.conj();
        m
    }

    pub fn assemble(&self) -> DensityOperator {
        DensityOperator::from_matrix_unchecked(self.matrix())
    }
}

/// C = 2·max(0, |z| − √(u₊u₋)).
pub fn xstate_concurrence(x: &XState) -> f64 {
    2.0 * (x.z.norm() - (x.u_plus * x.u_minus).sqrt()).max(0.0)
}

/// C = √(2(I₈ − I₅/I₁)) − √((1 + √(I₅/I₁))² − (I₁ + I₂)²), evaluated as written.
pub fn xstate_concurrence_invariant(inv: &InvariantVector) -> Result<f64> {
    if inv.i1 <= I1_MIN {
        return Err(Error::I1Zero);
    }
    let ratio = inv.i5 / inv.i1;
    let first = guarded_sqrt(2.0 * (inv.i8 - ratio), "first")?;
    let root_ratio = guarded_sqrt(ratio, "ratio")?;
    let second = guarded_sqrt((1.0 + root_ratio).powi(2) - (inv.i1 + inv.i2).powi(2), "second")?;
    Ok(first - second)
}
