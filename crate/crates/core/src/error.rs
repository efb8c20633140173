use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series centers differ: {0} vs {1}")]
    CenterMismatch(Complex64, Complex64),
    #[error("seminorm weight overflows at order {order}")]
    WeightOverflow { order: usize },
    #[error("invalid seminorm parameters: {0}")]
    InvalidSeminorm(String),
    #[error("series has no exact coefficients left to differentiate")]
    TruncationExhausted,
    #[error("cannot re-center a truncated series: its tail is unknown")]
    NotPolynomial,
    #[error("point {point} lies outside the validity region of the function model")]
    OutOfRegion { point: Complex64 },
    #[error("{point} is not a zero: |h(point)| = {value:e}")]
    NotAZero { point: Complex64, value: f64 },
    #[error("order of the zero at {point} is undecidable at probe depth {depth}")]
    OrderUndecidable { point: Complex64, depth: usize },
    #[error("zero search needs a polynomial model; declare zeros for builtin functions")]
    ZeroSearchUnsupported,
    #[error("stability bound requires k >= 2 and s >= 1/(k-1) (k = {order}, s = {s})")]
    StabilityOutOfRange { order: usize, s: f64 },
    #[error("element has {found} components but {expected} zeros were declared")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("the zero list is empty: the universal algebra is trivial")]
    NoZeros,
    #[error("series order {available} is too low; at least {needed} is required")]
    InsufficientOrder { needed: usize, available: usize },
    #[error("[X, Y] = h(Y) has no solution in dimension {dim}: residual {residual:e}")]
    Infeasible {
        dim: usize,
        residual: f64,
        trace_obstruction: bool,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}
