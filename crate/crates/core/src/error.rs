use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse grouping of errors, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed textual input.
    Parse,
    /// Arguments that are well-formed but violate a precondition.
    Validation,
    /// A computation produced a value it should not have.
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Parse(alloc::string::String),
    InvalidInterval { lo: f64, hi: f64 },
    InvalidGenerator(&'static str),
    OutsideInterval { x: f64, lo: f64, hi: f64 },
    OutOfImage { y: f64, lo: f64, hi: f64 },
    NegativeWeight { index: usize, weight: f64 },
    WeightSum(f64),
    EmptyWeights,
    LengthMismatch { expected: usize, found: usize },
    InvalidMatrix(&'static str),
    InvalidMeasure(&'static str),
    KernelOutOfRange { lo: f64, hi: f64 },
    NotStepKernel,
    DegenerateCut { mass: f64 },
    DegenerateMeasure,
    InvalidArgument(&'static str),
    NonFinite(&'static str),
    InversionFailure,
    UnknownSuite(alloc::string::String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) | Error::UnknownSuite(_) => ErrorClass::Parse,
            Error::OutOfImage { .. } | Error::NonFinite(_) | Error::InversionFailure => {
                ErrorClass::Numerical
            }
            _ => ErrorClass::Validation,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::InvalidInterval { lo, hi } => {
                write!(f, "invalid interval [{lo}, {hi}]: need finite lo < hi")
            }
            Error::InvalidGenerator(why) => write!(f, "invalid generator: {why}"),
            Error::OutsideInterval { x, lo, hi } => {
                write!(f, "argument {x} lies outside the interval [{lo}, {hi}]")
            }
            Error::OutOfImage { y, lo, hi } => {
                write!(f, "value {y} lies outside the generator image [{lo}, {hi}]")
            }
            Error::NegativeWeight { index, weight } => {
                write!(f, "weight {index} is negative ({weight})")
            }
            Error::WeightSum(s) => write!(f, "weights sum to {s}, expected 1"),
            Error::EmptyWeights => f.write_str("probability vector is empty"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::InvalidMatrix(why) => write!(f, "invalid matrix: {why}"),
            Error::InvalidMeasure(why) => write!(f, "invalid measure: {why}"),
            Error::KernelOutOfRange { lo, hi } => {
                write!(f, "kernel range [{lo}, {hi}] is not inside the working interval")
            }
            Error::NotStepKernel => f.write_str("reduction needs a step kernel"),
            Error::DegenerateCut { mass } => {
                write!(f, "cut has mass {mass}; reduction needs a mass strictly inside (0, 1)")
            }
            Error::DegenerateMeasure => f.write_str("probability measure is degenerate"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InversionFailure => f.write_str("monotone inversion failed"),
            Error::UnknownSuite(name) => write!(f, "unknown suite `{name}`"),
        }
    }
}

impl core::error::Error for Error {}
