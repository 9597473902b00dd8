use thiserror::Error;

use crate::solvers::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precision must be at least 53 mantissa bits, got {0}")]
    InvalidPrecision(u32),

    #[error("invalid alpha: {0}")]
    InvalidAlpha(String),

    #[error("matrix order must satisfy n >= 3, got {0}")]
    InvalidOrder(usize),

    #[error("index j = {j} is not valid for n = {n}: {reason}")]
    InvalidIndex {
        j: usize,
        n: usize,
        reason: &'static str,
    },

    #[error("angle {0} lies outside [0, pi]")]
    AngleOutOfRange(String),

    #[error("both eigenvector formulas vanish (multiplicity-2 corner case)")]
    DegenerateCase,

    #[error("eigenvalue {0} is a boundary value (0 or 4) that the generic formula cannot handle")]
    EigenvalueAtBoundary(String),

    #[error("solver did not reach tolerance after {} iterations", report.iterations)]
    NoProgress { report: Box<SolveReport> },

    #[error("solver precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("fixed-point iteration is not contractive: n = {n} <= K1 = {k1}")]
    ContractionNotGuaranteed { n: usize, k1: f64 },

    #[error("matrix is not symmetric (asymmetry {0})")]
    NotSymmetric(String),

    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
