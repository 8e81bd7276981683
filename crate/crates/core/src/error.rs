use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("`{name}` requires n = {required}, got n = {got}")]
    IncompatibleDimension {
        name: String,
        required: usize,
        got: usize,
    },
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("symbol is numerically singular at xi = {xi:?} (condition number {condition:e})")]
    SingularSymbol { xi: Vec<f64>, condition: f64 },
    #[error("constant-rank violation at xi = {xi:?}: expected rank {expected}, found {found}")]
    RankViolation {
        xi: Vec<f64>,
        expected: usize,
        found: usize,
    },
    #[error("exponent p = {p} must satisfy 1 <= p < n = {n}")]
    ExponentOutOfRange { p: f64, n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
