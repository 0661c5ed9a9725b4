//! Derived correlates and the nine SU(2)×SU(2) invariants of a Bloch decomposition.
//!
//! `a = Π·S` lives on qubit A and `b = Πᵀ·P` on qubit B, so that every
//! contraction below pairs indices belonging to the same qubit. With this
//! placement I₃ = P·A = S·B = PᵀΠS for any (P, S, Π).

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::BlochDecomposition;

/// Allowed disagreement between the two I₃ forms.
pub const I3_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct DerivedCorrelates {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub alpha: Vector3<f64>,
    pub beta: Vector3<f64>,
    /// T = ΠΠᵀ.
    pub t: Matrix3<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantVector {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    pub i6: f64,
    pub i7: f64,
    pub i8: f64,
    pub i9: f64,
}

impl InvariantVector {
    pub fn as_array(&self) -> [f64; 9] {
        [self.i1, self.i2, self.i3, self.i4, self.i5, self.i6, self.i7, self.i8, self.i9]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn derived_correlates(bloch: &BlochDecomposition) -> DerivedCorrelates {
    let a = bloch.pi * bloch.s;
    let b = bloch.pi.transpose() * bloch.p;
    DerivedCorrelates {
        alpha: bloch.p.cross(&a),
        beta: bloch.s.cross(&b),
        t: bloch.pi * bloch.pi.transpose(),
        a,
        b,
    }
}

pub fn invariant_vector(bloch: &BlochDecomposition) -> Result<InvariantVector> {
    let d = derived_correlates(bloch);
    let p_dot_a = bloch.p.dot(&d.a);
    let s_dot_b = bloch.s.dot(&d.b);
    if !((p_dot_a - s_dot_b).abs() <= I3_TOL) {
        return Err(Error::I3Mismatch { p_dot_a, s_dot_b });
    }
    let pi = &bloch.pi;
    Ok(InvariantVector {
        i1: bloch.p.norm_squared(),
        i2: bloch.s.norm_squared(),
        i3: p_dot_a,
        i4: d.a.norm_squared(),
        i5: d.b.norm_squared(),
        i6: d.t.trace(),
        i7: d.a.dot(&(pi * d.b)),
        i8: (d.t * d.t).trace(),
        i9: d.alpha.dot(&(pi * d.beta)),
    })
}

/// (|P|² − |S|², 2|P|² + Tr T − 3); both vanish exactly for pure states.
pub fn purity_residuals(bloch: &BlochDecomposition) -> (f64, f64) {
    let p2 = bloch.p.norm_squared();
    let s2 = bloch.s.norm_squared();
    let tr_t = (bloch.pi * bloch.pi.transpose()).trace();
    (p2 - s2, 2.0 * p2 + tr_t - 3.0)
}
