use thiserror::Error;

/// Failures surfaced by the library. Variant names mirror the error codes
/// written into reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("point lies outside the domain (max defining function {0:e})")]
    OutsideDomain(f64),

    #[error("no outward vector for chart at {center}: margin {margin:e}")]
    NoOutwardVector { center: String, margin: f64 },

    #[error("pole of the function lies inside the domain: {0}")]
    PoleInside(String),

    #[error("translated pole within {distance:e} of the boundary at eps = {epsilon:e}")]
    PoleOnBoundary { epsilon: f64, distance: f64 },

    #[error("quadrature budget of {cells} cells exceeded (err {err_est:e})")]
    BudgetExceeded { cells: usize, err_est: f64 },

    #[error("function is not absolutely integrable on the domain ({0})")]
    NotL1(String),

    #[error("test form is not dbar-closed on the closed domain: |dbar| = {residual:e} at {at}")]
    FormNotClosed { residual: f64, at: String },

    #[error("too few samples for asymptotic fit: {got} < {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("function is not holomorphic: Cauchy-Riemann defect {0:e}")]
    NotHolomorphic(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
