use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Evaluation at a point where the kernel is singular or undefined
    /// (e.g. zero momentum transfer).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    NumericAccuracy { estimate: f64, tolerance: f64 },

    #[error("rejection sampler exceeded {iterations} iterations")]
    Sampling { iterations: usize },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("domain too small: boundary mass fraction {leakage:e} exceeds {tolerance:e}")]
    DomainTooSmall { leakage: f64, tolerance: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("decode error: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that stem from user-supplied configuration rather than
    /// from numerics or I/O.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Precondition(_)
                | Error::Cfl { .. }
                | Error::Configuration(_)
                | Error::Config { .. }
                | Error::Unsupported(_)
        )
    }

    /// True for errors raised when a numerical tolerance could not be met.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NumericAccuracy { .. }
                | Error::Sampling { .. }
                | Error::DomainTooSmall { .. }
                | Error::StepSizeUnderflow { .. }
        )
    }
}
