//! ρ₂ = λ|00⟩⟨00| + (1−λ)|ψ⟩⟨ψ| with ψ ⟂ |00⟩, its λ = ½ projections, and
//! the spin-ladder rung state.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::guarded_sqrt;
use crate::error::{Error, Result};
use crate::invariants::InvariantVector;
use crate::linalg;
use crate::qstate::DensityOperator;

const NORMALIZATION_TOL: f64 = 1e-10;
const PURITY_SLACK: f64 = 1e-12;

/// |ψ⟩ = r₁|01⟩ + c|10⟩ + r₂|11⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2Degenerate {
    pub lambda: f64,
    pub r1: f64,
    pub r2: f64,
    pub c: Complex64,
}

impl Rank2Degenerate {
    pub fn new(lambda: f64, r1: f64, r2: f64, c: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) || r1 < 0.0 || r2 < 0.0 {
            return Err(Error::BadArgs(format!(
                "need lambda in [0,1] and r1, r2 >= 0 (got {lambda}, {r1}, {r2})"
            )));
        }
        let n = r1 * r1 + c.norm_sqr() + r2 * r2;
        if (n - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(Self { lambda, r1, r2, c })
    }

    pub fn psi(&self) -> [Complex64; 4] {
        [0.0.into(), self.r1.into(), self.c, self.r2.into()]
    }

    pub fn assemble(&self) -> DensityOperator {
        let mut m = linalg::outer(&self.psi()).scale(1.0 - self.lambda);
        m[(0, 0)] += Complex64::new(self.lambda, 0.0);
        DensityOperator::from_matrix_unchecked(m)
    }
}

/// C = (1−λ)·2r₁|c|.
pub fn estimate_rank2_degenerate(state: &Rank2Degenerate) -> f64 {
    (1.0 - state.lambda) * 2.0 * state.r1 * state.c.norm()
}

/// Both roots of Tr ρ² = 2λ² − 2λ + 1, smaller first.
pub fn mixedness_to_lambda(purity: f64) -> Result<(f64, f64)> {
    if !(0.5 - PURITY_SLACK..=1.0 + PURITY_SLACK).contains(&purity) {
        return Err(Error::InvalidPurity(purity));
    }
    let root = (2.0 * purity - 1.0).clamp(0.0, 1.0).sqrt();
    Ok((0.5 * (1.0 - root), 0.5 * (1.0 + root)))
}

/// Concurrence of an equal mixture of two orthogonal pure states (λ = ½),
/// from the single-qubit invariants alone.
pub fn estimate_projection2(inv: &InvariantVector) -> Result<f64> {
    let (i1, i2) = (inv.i1, inv.i2);
    let inner = guarded_sqrt((i1 - i2).powi(2) / 4.0 - (i1 + i2) / 2.0 + 0.25, "inner")?;
    guarded_sqrt((1.0 - i1 - i2) / 2.0 - inner, "outer")
}

/// Rung state λ|00⟩⟨00| + (1−λ)|singlet⟩⟨singlet|.
pub fn ladder_state(lambda: f64) -> Result<Rank2Degenerate> {
    Rank2Degenerate::new(lambda, FRAC_1_SQRT_2, 0.0, Complex64::new(-FRAC_1_SQRT_2, 0.0))
}

/// C = 2(1−λ)r₁|c| = 1 − ρ₁₁ with ρ₁₁ = λ.
pub fn ladder_concurrence(lambda: f64) -> f64 {
    1.0 - lambda
}

/// C = 1 − ρ₁₁ with ρ₁₁ = ½(⟨σ_z⊗σ_z⟩ + 1).
pub fn ladder_from_correlation(szpz: f64) -> f64 {
    1.0 - 0.5 * (szpz + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concurrence::concurrence_oracle;
    use crate::invariants::invariant_vector;
    use crate::qstate::decompose;
    use approx::assert_abs_diff_eq;

    fn inv_of(rho: &DensityOperator) -> InvariantVector {
        invariant_vector(&decompose(rho)).unwrap()
    }

    #[test]
    fn degenerate_formula_example() {
        let state = Rank2Degenerate::new(0.5, FRAC_1_SQRT_2, 0.0, Complex64::new(FRAC_1_SQRT_2, 0.0)).unwrap();
        assert_abs_diff_eq!(estimate_rank2_degenerate(&state), 0.5, epsilon = 1e-15);
        let oracle = concurrence_oracle(&state.assemble()).unwrap().value;
        assert_abs_diff_eq!(oracle, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn lambda_one_is_separable() {
        let state = Rank2Degenerate::new(1.0, 0.6, 0.0, Complex64::new(0.8, 0.0)).unwrap();
        assert_eq!(estimate_rank2_degenerate(&state), 0.0);
        assert!(concurrence_oracle(&state.assemble()).unwrap().value < 1e-12);
    }

    #[test]
    fn mixedness_roots() {
        assert_eq!(mixedness_to_lambda(0.5).unwrap(), (0.5, 0.5));
        let (lo, hi) = mixedness_to_lambda(0.82).unwrap();
        for l in [lo, hi] {
            assert_abs_diff_eq!(2.0 * l * l - 2.0 * l + 1.0, 0.82, epsilon = 1e-14);
        }
        assert!(matches!(mixedness_to_lambda(0.4), Err(Error::InvalidPurity(_))));
        assert!(matches!(mixedness_to_lambda(1.1), Err(Error::InvalidPurity(_))));
    }

    #[test]
    fn purity_matches_mixedness_relation() {
        let state = Rank2Degenerate::new(0.3, 0.5, 0.5, Complex64::new(0.5, 0.5)).unwrap();
        let purity = state.assemble().purity();
        assert_abs_diff_eq!(purity, 2.0 * 0.09 - 0.6 + 1.0, epsilon = 1e-14);
        let (lo, hi) = mixedness_to_lambda(purity).unwrap();
        assert!((lo - 0.3).abs() < 1e-12 || (hi - 0.3).abs() < 1e-12);
    }

    #[test]
    fn projection_formula_examples() {
        let state = Rank2Degenerate::new(0.5, FRAC_1_SQRT_2, 0.0, Complex64::new(FRAC_1_SQRT_2, 0.0)).unwrap();
        let rho = state.assemble();
        let projected = estimate_projection2(&inv_of(&rho)).unwrap();
        assert_abs_diff_eq!(projected, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(projected, concurrence_oracle(&rho).unwrap().value, epsilon = 1e-8);

        let sep = Rank2Degenerate::new(0.5, 1.0, 0.0, Complex64::new(0.0, 0.0)).unwrap();
        let rho = sep.assemble();
        assert_abs_diff_eq!(estimate_projection2(&inv_of(&rho)).unwrap(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn projection_formula_rejects_out_of_family() {
        // (I1 − I2)²/4 − (I1 + I2)/2 + 1/4 = 0.04 − 0.7 + 0.25 < 0.
        let inv = InvariantVector { i1: 0.9, i2: 0.5, ..Default::default() };
        assert!(matches!(estimate_projection2(&inv), Err(Error::DomainError(_))));
    }

    #[test]
    fn ladder_examples() {
        assert_eq!(ladder_concurrence(0.0), 1.0);
        assert_eq!(ladder_concurrence(1.0), 0.0);
        assert_eq!(ladder_concurrence(0.5), 0.5);
        let rho = ladder_state(0.5).unwrap().assemble();
        let projected = estimate_projection2(&inv_of(&rho)).unwrap();
        assert_abs_diff_eq!(projected, 0.5, epsilon = 1e-8);
        let singlet = ladder_state(0.0).unwrap().assemble();
        assert_abs_diff_eq!(concurrence_oracle(&singlet).unwrap().value, 1.0, epsilon = 1e-12);
        assert_eq!(ladder_from_correlation(-1.0), 1.0);
        assert_eq!(ladder_from_correlation(1.0), 0.0);
    }

    #[test]
    fn constructor_validation() {
        assert!(Rank2Degenerate::new(1.5, 1.0, 0.0, Complex64::new(0.0, 0.0)).is_err());
        assert!(Rank2Degenerate::new(0.5, -0.1, 0.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(matches!(
            Rank2Degenerate::new(0.5, 0.5, 0.5, Complex64::new(0.5, 0.0)),
            Err(Error::NotNormalized { .. })
        ));
    }
}
