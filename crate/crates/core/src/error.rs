use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure classes, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input data or configuration.
    Config,
    /// A numerical procedure failed or was asked for something it cannot deliver.
    Numerical,
    /// A simulated scenario ended in a failure outcome.
    Scenario,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {what}: {reason}")]
    InvalidParameter { what: &'static str, reason: String },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stiffness matrix is singular (structure not sufficiently constrained)")]
    SingularSystem,

    #[error("mass matrix is not positive definite")]
    MassNotPositiveDefinite,

    #[error("eigen solve did not converge: mode {mode} residual {residual:.3e}")]
    EigenNonConvergence { mode: usize, residual: f64 },

    #[error("requested {requested} modes but the constrained system has only {available} degrees of freedom")]
    TooManyModes { requested: usize, available: usize },

    #[error("undamped excitation at {frequency_hz} Hz coincides with a natural frequency; response is unbounded")]
    UnboundedResponse { frequency_hz: f64 },

    #[error("displacement {requested} m outside travel [{min}, {max}] m")]
    OutsideTravel { requested: f64, min: f64, max: f64 },

    #[error("axis {0} has not been homed")]
    Unhomed(char),

    #[error("resistance {resistance} ohm outside the sensor range [{min}, {max}] ohm")]
    ResistanceOutOfRange { resistance: f64, min: f64, max: f64 },

    #[error("no fuzzy rule fired for the given inputs")]
    NoRuleFired,

    #[error("membership function is identically zero; centroid undefined")]
    ZeroMembership,

    #[error("closed loop diverged at t = {t:.6} s (force {force:.3e} N)")]
    Unstable { t: f64, force: f64 },

    #[error("loop is unstable or fails the error threshold at the lowest test frequency")]
    NoBandwidth,

    #[error("missed pick: {0}")]
    MissedPick(String),

    #[error("grasp force {required:.3} N not reached within {timeout} s (peak {peak:.3} N)")]
    GraspTimeout { required: f64, timeout: f64, peak: f64 },
}

impl Error {
    pub fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what,
            reason: reason.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. } | Error::Empty(_) | Error::Config(_) => ErrorClass::Config,
            Error::OutsideTravel { .. } | Error::Unhomed(_) | Error::MissedPick(_) | Error::GraspTimeout { .. } => {
                ErrorClass::Scenario
            }
            _ => ErrorClass::Numerical,
        }
    }
}

pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            what,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

pub(crate) fn ensure_non_negative(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            what,
            format!("must be non-negative and finite, got {value}"),
        ))
    }
}
