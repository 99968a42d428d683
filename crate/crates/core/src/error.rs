use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid nodes: {0}")]
    InvalidNodes(String),

    #[error("too few nodes: need at least {needed}, got {got}")]
    TooFewNodes { needed: usize, got: usize },

    #[error("basis index {index} out of range (number of basis functions: {count})")]
    IndexError { index: usize, count: usize },

    #[error("point {z} lies outside the knot span [{lo}, {hi}]")]
    DomainError { z: f64, lo: f64, hi: f64 },

    #[error("degree {degree} too low: second derivatives need degree >= 2")]
    DegreeError { degree: usize },

    #[error("shape mismatch: {0}")]
    ShapeError(String),

    #[error(
        "matrix is singular: pivot {pivot:e} at column {column} is below tolerance {tolerance:e}"
    )]
    SingularMatrix {
        column: usize,
        pivot: f64,
        tolerance: f64,
    },

    #[error("reconstruction infeasible: {survivors} distinct survivors, at least 4 required")]
    ReconstructionInfeasible { survivors: usize },

    #[error("encoding point {beta} lies outside the survivor span [{lo}, {hi}]")]
    ExtrapolationError { beta: f64, lo: f64, hi: f64 },

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("non-finite value produced by {0}")]
    NumericalOverflow(String),

    #[error("missing input: {0}")]
    MissingInput(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid range: lo = {lo} must be below hi = {hi}")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("invalid straggler count S = {stragglers} for N = {workers} (need 0 <= S <= N - 4)")]
    InvalidStragglerCount { stragglers: usize, workers: usize },

    #[error("reference output has zero norm")]
    DegenerateReference,

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
