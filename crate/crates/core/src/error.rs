//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by construction, validation, and numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("block {index} is not square ({rows}x{cols})")]
    NonSquareBlock {
        index: usize,
        rows: usize,
        cols: usize,
    },

    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("matrix entries must be finite: {context}")]
    NonFiniteEntry { context: &'static str },

    #[error("matrix is not symmetric: max |A - A^T| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotSymmetric { deviation: f64, tolerance: f64 },

    #[error("{algorithm} did not converge after {iterations} iterations (residual {residual:.3e}{diagnostics})")]
    NoConvergence {
        algorithm: &'static str,
        iterations: usize,
        residual: f64,
        diagnostics: String,
    },

    #[error("matrix is singular or numerically singular (1-norm condition estimate {condition:.3e} > {limit:.3e})")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("matrix is singular: zero pivot at column {column}")]
    SingularMatrix { column: usize },

    #[error("index out of range: {context} (got {value}, valid 1..={max})")]
    IndexOutOfRange {
        context: &'static str,
        value: usize,
        max: usize,
    },

    #[error("edge weight must be >= 0: layer {layer}, edge ({u},{v}) has weight {weight}")]
    NegativeWeight {
        layer: usize,
        u: usize,
        v: usize,
        weight: f64,
    },

    #[error("duplicate edge in layer {layer}: ({u},{v}) listed more than once")]
    DuplicateEdge { layer: usize, u: usize, v: usize },

    #[error("self-loop not allowed: layer {layer}, patch {u}")]
    SelfLoop { layer: usize, u: usize },

    #[error("not a valid Laplacian: {reason}")]
    InvalidLaplacian { reason: String },

    #[error("domain violation: {denominator} is singular at the evaluation point")]
    DomainViolation { denominator: &'static str },

    #[error("patch {patch}: {source}")]
    Patch { patch: usize, source: Box<Error> },

    #[error("equilibrium residual too large: {context} has |f| = {residual:.3e} > {tolerance:.1e}")]
    ResidualTooLarge {
        context: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("bisection bracket invalid: abscissa({lo}) = {f_lo:.6e} and abscissa({hi}) = {f_hi:.6e} have the same sign")]
    BracketSameSign {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("degenerate eigenbasis: {reason}")]
    DegenerateBasis { reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Attach a 1-based patch number to an error raised inside a patch
    /// evaluation.
    pub fn at_patch(self, patch: usize) -> Error {
        Error::Patch {
            patch,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
