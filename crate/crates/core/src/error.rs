use thiserror::Error;

use crate::jet::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet order {0} outside the supported range 1..=6")]
    OrderOutOfRange(u8),
    #[error("expected {expected} Taylor coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("jets expanded at different points {left:?} and {right:?}")]
    BaseMismatch { left: Point, right: Point },
    #[error("jets of different orders {left} and {right}")]
    OrderMismatch { left: u8, right: u8 },
    #[error("division by a jet with zero value at {base:?}")]
    DivisionByZero { base: Point },
    #[error("{function} undefined at value {value}")]
    Domain { function: &'static str, value: f64 },
    #[error("derivative budget exhausted at {base:?}; raise the jet order")]
    BudgetExhausted { base: Point },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at column {position}: {message}")]
pub struct ParseError {
    /// Zero-based character offset into the input.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("the 1-form vanishes at {0:?}")]
    VanishingForm(Point),
    #[error("metric is not positive definite at {0:?}")]
    MetricNotPositive(Point),
    #[error("distribution is not contact at {point:?} (nonholonomity {lambda:e})")]
    NonContact { point: Point, lambda: f64 },
    #[error("symmetry system is degenerate at {0:?}")]
    Degenerate(Point),
    #[error("singular linear system at {0:?}")]
    SingularMatrix(Point),
    #[error("distribution is not transversal to the level set of the nonholonomity at {0:?}")]
    NotTransversal(Point),
    #[error("no characteristic field at {point:?}: {reason}")]
    NoCharacteristicField { point: Point, reason: String },
    #[error("integrability residual {residual:e} at {point:?} exceeds {tolerance:e}")]
    ResidualTooLarge {
        point: Point,
        residual: f64,
        tolerance: f64,
    },
    #[error("quadrature did not converge on [{start}, {end}]")]
    QuadratureDivergence { start: f64, end: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
