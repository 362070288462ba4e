use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{what} = {value} is outside the domain of {op}")]
    Domain {
        op: &'static str,
        what: &'static str,
        value: f64,
    },

    /// A material law failed one of its structural checks.
    #[error("invalid {law} law: {reason}")]
    InvalidLaw { law: &'static str, reason: String },

    #[error("superlinearity violated: F' stays below {target} up to strain {cap}")]
    SuperlinearityViolated { target: f64, cap: f64 },

    #[error("curvature condition violated: (G(t) - G'(0) t) / t^2 -> {limit}, expected a negative limit")]
    CurvatureViolated { limit: f64 },

    #[error("sharp energy undefined on non-SBV candidate (cantor mass {0})")]
    SharpUndefined(f64),

    #[error("invalid displacement field: {0}")]
    InvalidField(String),

    #[error("oracle too large: {0}")]
    OracleTooLarge(String),

    #[error("sigma too large: {sigma} >= margin {delta}")]
    SigmaTooLarge { sigma: f64, delta: f64 },

    #[error("competitor region is not compactly contained in the domain: {0}")]
    Containment(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid configuration at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, what: &'static str, value: f64) -> Self {
        Error::Domain { op, what, value }
    }

    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
