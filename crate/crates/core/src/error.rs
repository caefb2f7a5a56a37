use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series is not invertible: {0}")]
    NotInvertible(&'static str),

    #[error("chi_{p}({m}) = -1, so no form with principal part q^-{m} exists in the plus space")]
    CharacterVanishes { m: i64, p: i64 },

    #[error("insufficient precision: coefficients are needed below q^{needed}, but the series is only known below q^{available}")]
    InsufficientPrecision { needed: String, available: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("point lies on the wall of lambda = {0}")]
    OnWall(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for errors caused by reading or writing data rather than by a
    /// mathematical precondition.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Json(_) | Error::Format(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
