//! Error type shared across the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain (alpha, scale,
    /// covariance entries, lag windows, truncation orders, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The autoregression matrix has spectral radius >= 1 and the process
    /// has no stationary solution.
    #[error("model is not stationary: spectral radius {rho} >= 1")]
    NonStationary { rho: f64 },

    /// A lag was requested that the data cannot support.
    #[error("lag {k} out of range for series of length {n}")]
    LagOutOfRange { k: i64, n: usize },

    /// The empirical characteristic function is too close to zero for its
    /// logarithm to be meaningful. Usually the series is too short or the
    /// tails too heavy for the requested argument.
    #[error(
        "empirical characteristic function at (u={u}, v={v}), lag {k} has modulus {modulus:.3e} \
         below floor {floor:.1e}"
    )]
    DegenerateCf {
        u: f64,
        v: f64,
        k: i64,
        modulus: f64,
        floor: f64,
    },

    /// Every value in the requested lag window is zero, so a decay rate
    /// cannot be identified.
    #[error("decay fit underdetermined: all values in lags {h_min}..={h_max} are zero")]
    UnderdeterminedFit { h_min: i64, h_max: i64 },

    /// The noise CF fit did not produce a finite optimum.
    #[error("fit failed: {0}")]
    FitFailure(String),

    /// A pipeline stage failed; wraps the underlying error with the stage name.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// Config file could not be parsed or failed validation.
    #[error("config: {0}")]
    Config(String),

    /// A CSV artifact is malformed.
    #[error("{path}:{line}: {msg}")]
    Csv {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Wraps an error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
