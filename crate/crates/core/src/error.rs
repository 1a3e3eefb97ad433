use thiserror::Error;

/// Errors raised when an operation's preconditions are violated or a
/// numerical routine cannot produce a meaningful result.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Two sector states with different particle numbers were combined.
    #[error("sector mismatch: {left} vs {right} particles")]
    SectorMismatch { left: usize, right: usize },

    /// An operation that annihilates a particle was applied to the vacuum.
    #[error("operation requires a nonempty sector")]
    EmptySector,

    /// An observable that must be Hermitian is not.
    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    /// A sampling density vanished everywhere on its grid.
    #[error("sampling density is identically zero")]
    ZeroDensity,

    /// A least-squares fit has too few usable points.
    #[error("degenerate fit: {usable} usable points, at least 3 required")]
    DegenerateFit { usable: usize },

    /// A projective measurement kept no sector.
    #[error("no sector is compatible with relative phase {theta}")]
    EmptyProjection { theta: f64 },

    /// Vector or profile lengths disagree.
    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch { what: &'static str, left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
