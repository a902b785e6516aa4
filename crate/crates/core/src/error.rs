//! Crate-wide error type.

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::network::NetworkParams;
use crate::training::TrainHistory;

pub type Result<T> = core::result::Result<T, Error>;

/// Last finite optimizer state, attached to [`Error::Divergence`] so a
/// caller can inspect or checkpoint what training looked like right before
/// the loss went non-finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergedState {
    pub params: NetworkParams,
    pub history: TrainHistory,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix argument contains NaN or infinite entries.
    InvalidMatrix,
    /// Singular values must be nonnegative and sorted nonincreasing.
    InvalidSpectrum,
    /// Schatten exponent must be strictly positive.
    InvalidExponent(f64),
    /// Widths or leaky slope do not describe a valid architecture.
    InvalidArchitecture(String),
    /// Operand shapes do not agree.
    Shape { expected: (usize, usize), got: (usize, usize) },
    /// The conversion requires a ReLU network (leaky slope 0).
    NotRelu(f64),
    /// Composition operands do not line up.
    Composition(String),
    /// Requested depth is below the minimum the construction needs.
    Depth { requested: usize, minimum: usize },
    /// Class label outside `1..=classes`.
    Label { label: usize, classes: usize },
    /// Training produced a non-finite loss at `step`.
    Divergence { step: usize, last: Box<DivergedState> },
    /// No run reached the fit tolerance; reports the best data term seen.
    Unfit { best_data_term: f64 },
    /// An operation that maximizes over probe points got an empty probe set.
    NoProbes,
    /// The activation batch is constant (or has fewer than two columns).
    DegenerateBatch,
    /// Path problems need at least two points.
    TooFewPoints(usize),
    /// Inputs have zero diameter.
    DegenerateInputs,
    /// No projection direction separated all inputs after the retry budget.
    Projection,
    /// The kernel system is too ill-conditioned to solve at tolerance.
    IllConditioned,
    /// Generator dimensions are inconsistent.
    Dim(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMatrix => write!(f, "matrix has non-finite entries"),
            Error::InvalidSpectrum => {
                write!(f, "singular values must be nonnegative and nonincreasing")
            }
            Error::InvalidExponent(p) => write!(f, "Schatten exponent must be > 0, got {p}"),
            Error::InvalidArchitecture(msg) => write!(f, "invalid architecture: {msg}"),
            Error::Shape { expected, got } => write!(
                f,
                "shape mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::NotRelu(a) => write!(f, "expected a ReLU network (a = 0), got a = {a}"),
            Error::Composition(msg) => write!(f, "composition error: {msg}"),
            Error::Depth { requested, minimum } => {
                write!(f, "depth {requested} below construction minimum {minimum}")
            }
            Error::Label { label, classes } => {
                write!(f, "label {label} outside 1..={classes}")
            }
            Error::Divergence { step, .. } => {
                write!(f, "training diverged (non-finite loss) at step {step}")
            }
            Error::Unfit { best_data_term } => write!(
                f,
                "no run fit within tolerance; best data term {best_data_term:e}"
            ),
            Error::NoProbes => write!(f, "probe set is empty"),
            Error::DegenerateBatch => write!(f, "batch is constant or too small"),
            Error::TooFewPoints(n) => write!(f, "need at least 2 points, got {n}"),
            Error::DegenerateInputs => write!(f, "inputs have zero diameter"),
            Error::Projection => write!(f, "no collision-free projection direction found"),
            Error::IllConditioned => write!(f, "kernel system is ill-conditioned"),
            Error::Dim(msg) => write!(f, "dimension error: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
