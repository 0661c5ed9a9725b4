//! Two-qubit concurrence: the Wootters oracle, local invariants, rank-wise
//! estimators from few observables, mixture bounds and measurement simulation.

pub mod bounds;
pub mod cli;
pub mod concurrence;
pub mod error;
pub mod estimators;
pub mod invariants;
pub mod linalg;
pub mod measurement;
pub mod par;
pub mod qstate;
pub mod validate;

pub use concurrence::{concurrence_oracle, concurrence_pure, ConcurrenceDiagnostics};
pub use error::{Error, Result};
pub use invariants::{invariant_vector, InvariantVector};
pub use qstate::{decompose, BlochDecomposition, DensityOperator, LocalUnitary, PureState};
