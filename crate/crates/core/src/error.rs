use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Variants split into two families: input problems (bad files, bad
/// arguments, malformed configuration) and numerical failures (poles,
/// non-positive-definite matrices, root-finding breakdowns). The CLI maps
/// them to exit codes 2 and 3 respectively, see [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("pole: function evaluated at non-positive integer {0}")]
    Pole(f64),

    #[error("argument {value} outside domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("matrix is not positive definite (pivot {pivot} at column {column})")]
    NotPositiveDefinite { column: usize, pivot: f64 },

    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate sample: likelihood equation has no root below L = {upper:e}")]
    DegenerateSample { upper: f64 },

    #[error("no root of the likelihood equation found on any branch")]
    NoRoot,

    #[error("log-space value {0} overflows f64 when exponentiated")]
    Overflow(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("entropy estimate {index} has zero variance")]
    ZeroVariance { index: usize },

    #[error("cannot combine entropy kinds {0} and {1}")]
    MixedKinds(String, String),

    #[error("too many failed replicas: {failures} of {replicas} (N = {n}); first cause: {cause}")]
    TooManyFailures {
        n: usize,
        failures: usize,
        replicas: usize,
        cause: String,
    },

    #[error("unknown {registry} strategy '{name}' (available: {available})")]
    UnknownStrategy {
        registry: &'static str,
        name: String,
        available: String,
    },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    MagicMismatch { expected: [u8; 4], found: [u8; 4] },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("region out of bounds: {0}")]
    OutOfBounds(String),

    #[error("region selects no pixels")]
    EmptySelection,

    #[error("cannot draw {requested} items without replacement from {available}")]
    SubsampleTooLarge { requested: usize, available: usize },

    #[error("configuration: {0}")]
    Config(String),

    #[error("region {region}: {source}")]
    Region {
        region: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        if let Error::Region { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::Pole(_)
                | Error::Domain { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::DegenerateSample { .. }
                | Error::NoRoot
                | Error::Overflow(_)
                | Error::ZeroVariance { .. }
                | Error::TooManyFailures { .. }
        )
    }
}

impl Error {
    /// Attaches the region this error arose in.
    pub fn in_region(self, region: impl Into<String>) -> Error {
        Error::Region {
            region: region.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
