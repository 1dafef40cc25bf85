use thiserror::Error;

use crate::indicial::IndicialRoot;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared across the toolkit.
///
/// Validation problems (`InvalidParams`, `GridMismatch`, `Window`, ...) are
/// separated from numerical failures by [`Error::is_validation`]; the CLI maps
/// the two classes onto different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("pole of the Gamma function at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("series did not converge: {0}")]
    Convergence(String),
    #[error("kappa = {kappa} sits on the Hardy threshold {threshold}")]
    Threshold { kappa: f64, threshold: f64 },
    #[error("found {} of {requested} roots below height {height}", found.len())]
    Incomplete {
        found: Vec<IndicialRoot>,
        requested: usize,
        height: f64,
    },
    #[error("argument-principle count {expected} does not match {found} located roots in strip [{lo}, {hi}]")]
    Certification {
        lo: f64,
        hi: f64,
        expected: i64,
        found: i64,
    },
    #[error("degenerate root at {re} + {im}i: |Theta'| = {derivative_abs}")]
    DegenerateRoot { re: f64, im: f64, derivative_abs: f64 },
    #[error("no sign change bracketing the root: {0}")]
    NoRoot(String),
    #[error("continuation failed: {0}")]
    Continuation(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("window error: {0}")]
    Window(String),
    #[error("decay hypothesis violated: measured tail rate {measured} <= required {required}")]
    DecayHypothesis { measured: f64, required: f64 },
    #[error("no acceptable asymptotic fit (best residual {residual})")]
    NoFit { residual: f64 },
    #[error("Newton iteration diverged after {iterations} iterations (residual {residual})")]
    Divergence { iterations: usize, residual: f64 },
    #[error("iterate lost positivity (min value {min_value})")]
    Negativity { min_value: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable name of the variant, used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::Pole { .. } => "PoleError",
            Error::Domain(_) => "DomainError",
            Error::Convergence(_) => "ConvergenceError",
            Error::Threshold { .. } => "ThresholdError",
            Error::Incomplete { .. } => "IncompleteError",
            Error::Certification { .. } => "CertificationError",
            Error::DegenerateRoot { .. } => "DegenerateRootError",
            Error::NoRoot(_) => "NoRootError",
            Error::Continuation(_) => "ContinuationError",
            Error::Quadrature(_) => "QuadratureError",
            Error::Window(_) => "WindowError",
            Error::DecayHypothesis { .. } => "DecayHypothesisError",
            Error::NoFit { .. } => "NoFitError",
            Error::Divergence { .. } => "DivergenceError",
            Error::Negativity { .. } => "NegativityError",
            Error::GridMismatch(_) => "GridMismatchError",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::Domain(_)
                | Error::Window(_)
                | Error::GridMismatch(_)
                | Error::Parse(_)
                | Error::Threshold { .. }
        )
    }
}
