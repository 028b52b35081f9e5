use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which 8b/10b rule a received code group broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeViolation {
    /// The 6b or 4b sub-block is not a data code group.
    InvalidCode,
    /// The code group exists but is illegal at the current running disparity.
    Disparity,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value fell outside the domain of a formula.
    #[error("invalid `{field}`: {reason}")]
    Domain { field: &'static str, reason: String },

    /// Gate bias outside the calibrated table.
    #[error("gate bias {bias} V outside calibrated range [{min}, {max}] V")]
    BiasOutOfRange { bias: f64, min: f64, max: f64 },

    /// No positive feedback resistor achieves the requested input impedance.
    #[error("input impedance {target} ohm infeasible; minimum achievable is {min_achievable} ohm")]
    InfeasibleMatch { target: f64, min_achievable: f64 },

    #[error("sample rate {sample_rate} Hz is below the 32x floor of {required} Hz")]
    Undersampled { sample_rate: f64, required: f64 },

    #[error("IF {if_freq} Hz is below the spectral resolution {resolution} Hz")]
    Resolution { if_freq: f64, resolution: f64 },

    #[error("8b/10b decode failed at code group {index}: {kind:?}")]
    Decode { index: usize, kind: CodeViolation },

    #[error("{block} model failed: {source}")]
    Block {
        block: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("grid of {count} points exceeds the limit of {limit}")]
    GridTooLarge { count: usize, limit: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn in_block(self, block: &'static str) -> Self {
        Error::Block {
            block,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Reject non-positive (or non-finite) values.
pub(crate) fn ensure_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(field, format!("must be positive and finite, got {value}")))
    }
}
