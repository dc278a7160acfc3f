use thiserror::Error;

use crate::normal_form::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid eigenvalues: {0}")]
    InvalidEigenvalues(String),

    #[error("normal form validation failed:\n{0}")]
    Validation(ValidationReport),

    #[error("inverse coefficient blow-up: |coefficient| = {magnitude:e} exceeds bound {bound:e}")]
    InverseBlowUp { magnitude: f64, bound: f64 },

    #[error("no admissible t in search range (best sup estimate {best_sup} vs target {target})")]
    NoAdmissibleT { best_sup: f64, target: f64 },

    #[error("shell not certified: sup over |z| = {radius} of |γ(z)| is {sup} but must be < c = {c}")]
    NotCertified { radius: f64, sup: f64, c: f64 },

    #[error("orbit reduction exceeded iteration cap ({cap}) at |z| = {norm}")]
    OrbitCap { cap: usize, norm: f64 },

    #[error("perturbation not positive: minimum of 1 + ε·h over samples is {min}")]
    PerturbationNotPositive { min: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("malformed manifold file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
