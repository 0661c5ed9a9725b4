use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Bloch data does not describe a physical state (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotAState { min_eigenvalue: f64 },

    #[error("eigen/singular value solver did not converge")]
    EigSolveFailure,

    #[error("pure state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("I3 forms disagree: P.A = {p_dot_a}, S.B = {s_dot_b}")]
    I3Mismatch { p_dot_a: f64, s_dot_b: f64 },

    #[error("state is not pure (purity residuals {r1:.3e}, {r2:.3e})")]
    NotPure { r1: f64, r2: f64 },

    #[error("rank-2 reconstruction is degenerate: {0}")]
    ReconstructionDegenerate(&'static str),

    #[error("local observables are not consistent with any canonical rank-2 state (residual {residual:.3e})")]
    InconsistentData { residual: f64 },

    #[error("purity {0} outside [1/2, 1]")]
    InvalidPurity(f64),

    #[error("formula outside its domain: {0}")]
    DomainError(String),

    #[error("I1 is zero; the X-state invariant formula divides by it")]
    I1Zero,

    #[error("mixture weights infeasible: lambda1 = {lambda1}, lambda2 = {lambda2}")]
    Infeasible { lambda1: f64, lambda2: f64 },

    #[error("bad arguments: {0}")]
    BadArgs(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
