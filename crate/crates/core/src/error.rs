use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed scenario, manifest or CSV text.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A configuration value violates one of its invariants.
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },

    /// The position-domain information matrix cannot be inverted.
    #[error("singular information matrix (condition number {condition:e})")]
    SingularInformation { condition: f64 },

    /// A UE sits exactly on an AP.
    #[error("zero distance between AP {ap} and UE {ue}")]
    ZeroDistance { ap: usize, ue: usize },

    /// A line-of-sight quantity was requested on a blocked link.
    #[error("link between AP {ap} and UE {ue} is blocked")]
    BlockedLink { ap: usize, ue: usize },

    /// No unblocked AP is left for a UE.
    #[error("UE {ue} has no unblocked AP to be served by")]
    NoEligibleAps { ue: usize },

    /// An operation received an argument outside its domain.
    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Broad error classes; the command-line harness maps each onto an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    Io,
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. }
            | Error::Invalid { .. }
            | Error::BlockedLink { .. }
            | Error::NoEligibleAps { .. }
            | Error::Unsupported(_) => ErrorClass::Config,
            Error::SingularInformation { .. } | Error::ZeroDistance { .. } => ErrorClass::Numerical,
            Error::Io(_) => ErrorClass::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
