use thiserror::Error;

/// Errors reported by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma pole: x = {0} is a nonpositive integer")]
    GammaPole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported measure variant: {0}")]
    UnsupportedMeasure(String),

    #[error("Hamiltonian sample not positive semidefinite at t = {t}: {detail}")]
    NotPositiveSemidefinite { t: f64, detail: String },

    #[error("step size underflow at t = {0} during transfer-matrix integration")]
    StepUnderflow(f64),

    #[error("determinant degenerate on a set of positive measure near t = {0}")]
    DegenerateDeterminant(f64),

    #[error("collocation matrix singular or ill-conditioned (cond estimate {cond:.3e})")]
    SingularMatrix { cond: f64 },

    #[error("tail residual estimate {estimate:.3e} exceeds tolerance {tol:.3e}")]
    TailBound { estimate: f64, tol: f64 },

    #[error("kernel trace k_t(0) not monotone near t = {0}; refusing to differentiate")]
    NonMonotoneTrace(f64),

    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
