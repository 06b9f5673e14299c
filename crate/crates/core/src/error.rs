use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A buffer does not match the declared extent.
    Extent { expected: usize, actual: usize },
    /// Two operands have different 2-D extents.
    ExtentMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Two vectors (or a vector and a matrix) have incompatible dimensions.
    Dimension { expected: usize, actual: usize },
    /// An intensity fell outside `[0, 1]`.
    Intensity { index: usize, value: f64 },
    /// A value that must be finite was NaN or infinite.
    NonFinite { index: usize },
    /// An argument is outside its documented domain.
    InvalidArgument(&'static str),
    /// The image carries no mass (all zeros), so moments are undefined.
    ZeroMass,
    /// A wavelet family/order that is not shipped.
    UnknownWavelet,
    /// Filter taps violate the orthonormality conditions.
    InadmissibleFilter,
    /// A transform step needs even extents.
    OddExtent { width: usize, height: usize },
    /// Decomposition depth would shrink a node below one pixel.
    TooManyLevels { levels: u32, width: usize, height: usize },
    /// Matrix is not symmetric positive definite.
    NotPositiveDefinite,
    /// Eigen-solver did not converge; carries the off-diagonal residual norm.
    NoConvergence { residual: f64 },
    /// No data to operate on.
    Empty,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Extent { expected, actual } => {
                write!(f, "buffer holds {actual} values, extent requires {expected}")
            }
            Error::ExtentMismatch { left, right } => {
                write!(f, "extent mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            Error::Dimension { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::Intensity { index, value } => {
                write!(f, "intensity {value} at index {index} is outside [0, 1]")
            }
            Error::NonFinite { index } => write!(f, "non-finite value at index {index}"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::ZeroMass => f.write_str("image has zero total mass"),
            Error::UnknownWavelet => f.write_str("unknown wavelet family or order"),
            Error::InadmissibleFilter => f.write_str("filter taps are not orthonormal"),
            Error::OddExtent { width, height } => {
                write!(f, "transform step needs even extents, got {width}x{height}")
            }
            Error::TooManyLevels { levels, width, height } => write!(
                f,
                "{levels} decomposition levels are too many for a {width}x{height} image"
            ),
            Error::NotPositiveDefinite => f.write_str("matrix is not positive definite"),
            Error::NoConvergence { residual } => {
                write!(f, "eigen-solver did not converge (residual {residual:e})")
            }
            Error::Empty => f.write_str("empty input"),
        }
    }
}

impl core::error::Error for Error {}
