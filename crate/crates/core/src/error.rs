use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("field is identically zero")]
    ZeroField,

    #[error("domain too small: half-width {half_width} < required {required}")]
    DomainTooSmall { half_width: f64, required: f64 },

    #[error("no interior radial maximum found")]
    NoInteriorMaximum,

    #[error("loop at r = {radius} passes through a near-zero of the field")]
    NearZeroOnLoop { radius: f64 },

    #[error("landau coefficient mismatch: {0}")]
    LandauMismatch(String),

    #[error("quadrature did not converge (estimated error {achieved:e}, requested {requested:e})")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("numerical blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
