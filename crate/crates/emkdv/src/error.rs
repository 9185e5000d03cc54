//! Error taxonomy shared by all modules.
//!
//! Every failure carries enough context to be serialized into the
//! machine-readable error report emitted by the CLI (module, operation,
//! message, diagnostics), and maps onto a stable process exit code:
//! 2 = configuration error, 3 = discrete spectrum present, 4 = numerical failure.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("initial datum does not decay: |u0({x})| = {value:.3e} >= decay_tol {tol:.3e}")]
    NonDecayingDatum { x: f64, value: f64, tol: f64 },

    #[error("adaptive integrator failed at x = {x}: {reason}")]
    IntegratorFailure { x: f64, reason: String },

    #[error("unitarity violated: max ||a|^2+|b|^2-1| = {max_defect:.3e} > {tol:.3e} at k = {at_k}")]
    UnitarityViolation {
        max_defect: f64,
        tol: f64,
        at_k: f64,
    },

    #[error("schwartz symmetry violated: defect {defect:.3e} > {tol:.3e} at k = {at_k}")]
    SymmetryViolation { defect: f64, tol: f64, at_k: f64 },

    #[error("winding count inconclusive: {reason}")]
    InconclusiveWinding { reason: String },

    #[error("query k = {k} outside interpolation hull [{lo}, {hi}]")]
    OutOfRange { k: f64, lo: f64, hi: f64 },

    #[error("quadrature failed to converge: estimate {estimate:.3e} > quad_tol {tol:.3e}")]
    QuadratureFailure { estimate: f64, tol: f64 },

    #[error("(x, t) = ({x}, {t}) classified as {actual}, evaluator requires {expected}")]
    WrongRegion {
        x: f64,
        t: f64,
        actual: String,
        expected: String,
    },

    #[error("stationary point k = {k} outside scattering grid hull [{lo}, {hi}]")]
    MissingScattering { k: f64, lo: f64, hi: f64 },

    #[error("collocation system singular or ill-conditioned: {reason}")]
    SingularSystem { reason: String },

    #[error("contour truncation too small: |v - I| = {defect:.3e} at radius {radius} exceeds {tol:.3e}")]
    TruncationTooSmall { defect: f64, radius: f64, tol: f64 },

    #[error("y-grid too coarse or irregular for the finite-difference residual: {reason}")]
    GridTooCoarse { reason: String },

    #[error("field blew up at t = {t}: max|u| non-finite")]
    BlowUp { t: f64 },

    #[error("wrap-around contamination at t = {t}: |u(boundary)| = {boundary_value:.3e} > {tol:.3e}; enlarge l_domain")]
    BoundaryContamination {
        t: f64,
        boundary_value: f64,
        tol: f64,
    },

    #[error("discrete spectrum present: {count} zero(s) of a(k) in the upper half plane")]
    DiscreteSpectrumPresent { count: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code the CLI maps this error onto.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::DiscreteSpectrumPresent { .. } => 3,
            _ => 4,
        }
    }

    /// Module name for the structured error report.
    pub fn module(&self) -> &'static str {
        match self {
            Error::NonDecayingDatum { .. }
            | Error::IntegratorFailure { .. }
            | Error::UnitarityViolation { .. }
            | Error::SymmetryViolation { .. }
            | Error::InconclusiveWinding { .. }
            | Error::OutOfRange { .. } => "spectral_scattering",
            Error::QuadratureFailure { .. }
            | Error::WrongRegion { .. }
            | Error::MissingScattering { .. } => "oscillatory_asymptotics",
            Error::SingularSystem { .. } | Error::TruncationTooSmall { .. } | Error::GridTooCoarse { .. } => {
                "painleve_sector"
            }
            Error::BlowUp { .. } | Error::BoundaryContamination { .. } => "pde_reference",
            Error::DiscreteSpectrumPresent { .. } | Error::Config(_) | Error::Io(_) => "harness",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
