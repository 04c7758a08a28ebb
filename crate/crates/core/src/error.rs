use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes are incompatible with the requested operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An input failed a precondition (non-orthonormal frame, bad parameter, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The input is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A black-box map could not be certified as a radius isometry.
    #[error("map is not of isometry form: {0}")]
    NotIsometryForm(String),

    /// Malformed wire data.
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
