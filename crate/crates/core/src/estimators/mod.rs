//! Rank-wise concurrence estimators built from few (mostly local) observables.

mod degenerate;
mod rank2;
mod xstate;

pub use degenerate::{
    estimate_projection2, estimate_rank2_degenerate, ladder_concurrence, ladder_from_correlation,
    ladder_state, mixedness_to_lambda, Rank2Degenerate,
};
pub use rank2::{
    assemble_rank2, estimate_rank2_sep2, local_observables_rank2, reconstruct_rank2,
    Rank2Canonical, Rank2SepDecomp, DEFAULT_DEGENERACY_TOL,
};
pub use xstate::{xstate_concurrence, xstate_concurrence_invariant, XState};

use crate::error::{Error, Result};
use crate::invariants::purity_residuals;
use crate::qstate::BlochDecomposition;

/// Purity residual tolerance accepted by [`estimate_pure`].
pub const PURITY_TOL: f64 = 1e-6;
/// Radicands in `[-RADICAND_TOL, 0)` are treated as round-off and clamped.
pub const RADICAND_TOL: f64 = 1e-10;

/// C(Ψ) = √(1 − |P|²) for a pure state.
pub fn estimate_pure(bloch: &BlochDecomposition) -> Result<f64> {
    let (r1, r2) = purity_residuals(bloch);
    if r1.abs() > PURITY_TOL || r2.abs() > PURITY_TOL {
        return Err(Error::NotPure { r1, r2 });
    }
    Ok((1.0 - bloch.p.norm_squared()).max(0.0).sqrt())
}

pub(crate) fn guarded_sqrt(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -RADICAND_TOL {
        Ok(0.0)
    } else {
        Err(Error::DomainError(format!("{what} radicand {x:.6e} is negative")))
    }
}
