use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its valid range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The grid is too small for the Moore neighbourhood to stay well-defined
    /// under toroidal wrap.
    #[error("grid must be at least 3x3, got {width}x{height}")]
    GridTooSmall { width: usize, height: usize },

    /// A constant series: the standard deviation is zero and R/S is undefined.
    #[error("degenerate series: standard deviation is zero")]
    DegenerateSeries,

    /// Too few valid points to produce an estimate.
    #[error("insufficient data: {got} valid points, need at least {need}")]
    InsufficientData { got: usize, need: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
