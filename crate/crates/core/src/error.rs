use core::fmt;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A dyadic level beyond the configured maximum was requested.
    LevelOverflow {
        /// Requested level.
        level: u32,
        /// Configured ceiling.
        max: u32,
    },
    /// An input array had the wrong length.
    LengthMismatch {
        /// Required length.
        expected: usize,
        /// Supplied length.
        got: usize,
    },
    /// An argmin was requested over an empty array.
    EmptyInput,
    /// The search depth must be at least 3.
    DepthTooSmall(u32),
    /// At least one zoom level is required.
    NoLevels,
    /// A grid index outside `0..=max`.
    IndexOutOfRange {
        /// Offending index.
        index: usize,
        /// Largest admissible index.
        max: usize,
    },
    /// Fewer starred times than the requested level needs.
    InsufficientEntries {
        /// Entries required.
        needed: usize,
        /// Entries supplied.
        got: usize,
    },
    /// Interval widths must be strictly positive.
    NonPositiveWidth(f64),
    /// Uniform variates must lie in the open unit interval.
    UniformOutOfRange(f64),
    /// A bridge fill-in needs at least one interval.
    ZeroIntervals,
    /// The run's convention differs from the shared path's convention.
    ConventionMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LevelOverflow { level, max } => {
                write!(f, "dyadic level {level} exceeds the maximum level {max}")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            Error::EmptyInput => f.write_str("argmin of an empty array"),
            Error::DepthTooSmall(d) => write!(f, "d must be ≥ 3 (got {d})"),
            Error::NoLevels => f.write_str("N must be ≥ 1"),
            Error::IndexOutOfRange { index, max } => {
                write!(f, "grid index {index} outside 0..={max}")
            }
            Error::InsufficientEntries { needed, got } => {
                write!(f, "need {needed} starred times, got {got}")
            }
            Error::NonPositiveWidth(h) => write!(f, "interval width must be positive (got {h})"),
            Error::UniformOutOfRange(u) => write!(f, "uniform variate {u} outside (0, 1)"),
            Error::ZeroIntervals => f.write_str("fill-in needs at least one interval"),
            Error::ConventionMismatch => {
                f.write_str("run convention differs from the shared path's convention")
            }
        }
    }
}

impl core::error::Error for Error {}

/// Result alias for the core crate.
pub type Result<T> = core::result::Result<T, Error>;
