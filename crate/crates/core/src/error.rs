use std::path::PathBuf;

use rug::Integer;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("the zero form is not a binary cubic form")]
    ZeroForm,

    #[error("matrix determinant is {det}, expected +1 or -1")]
    NotUnimodular { det: Integer },

    #[error("discriminant {0} is not positive")]
    NonPositiveDiscriminant(Integer),

    #[error("form is reducible over Q")]
    Reducible,

    #[error("form is not reduced (Hessian violates C >= A >= |B|)")]
    NotReduced,

    #[error("y must be nonzero")]
    ZeroY,

    #[error("(x, y) = (0, 0) is not a valid point")]
    ZeroPoint,

    #[error("could not certify {what} at {bits} bits of precision")]
    Precision { what: String, bits: u32 },

    #[error("identity {what} violated beyond the certified error")]
    IdentityViolated { what: String },

    #[error("epsilon {value} outside the admissible range {range}")]
    EpsilonOutOfRange { value: String, range: &'static str },

    #[error("logarithm argument is not positive")]
    NonPositiveArgument,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn precision(what: impl Into<String>, bits: u32) -> Self {
        Error::Precision { what: what.into(), bits }
    }
}
