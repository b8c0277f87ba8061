//! Crate-wide error type.
//!
//! Construction errors (bad graphs, bad parameters, malformed inputs) are
//! distinguished from computation errors (solvers failing to converge,
//! degenerate spectra). The CLI maps the former to exit code 1 and the
//! latter to exit code 2.

use thiserror::Error;

/// Every fallible operation in this crate returns this error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rate on edge {u} -> {v} must be positive, got {rate}")]
    NonpositiveRate { u: String, v: String, rate: f64 },

    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(String),

    #[error("edge {u} -> {v} has no reverse edge; the adjacency relation must be symmetric")]
    AsymmetricAdjacency { u: String, v: String },

    #[error("duplicate edge {u} -> {v}")]
    DuplicateEdge { u: String, v: String },

    #[error("unknown vertex label {0:?}")]
    UnknownVertex(String),

    #[error("graph is not connected")]
    NotConnected,

    #[error(
        "rates are not reversible: cycle condition fails on edge {u} <-> {v} ({lhs} vs {rhs})"
    )]
    NotReversible {
        u: String,
        v: String,
        lhs: f64,
        rhs: f64,
    },

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("invalid path system: {0}")]
    InvalidPath(String),

    #[error("graph is not a tree; unique paths are undefined")]
    NotATree,

    #[error("weight function must be nonnegative, got {value} at vertex {vertex}")]
    NegativePhi { vertex: String, value: f64 },

    #[error("operation requires the graph Laplacian model (rates 1/deg), got general rates")]
    NotLaplacian,

    #[error("operation requires the uniform stationary measure")]
    NotUniform,

    #[error("{what} too large: limit {limit}, got {got}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("iteration failed to converge: {0}")]
    NonConvergence(String),

    #[error("spectral gap is numerically degenerate (second eigenvalue below threshold)")]
    DegenerateSpectrum,

    #[error("linear system is numerically singular")]
    SingularSystem,

    #[error("bad objective for weight optimization: {0}")]
    BadObjective(String),

    #[error("invalid measure: {0}")]
    BadMeasure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by invalid input (graphs, parameters, files)
    /// as opposed to a computation that failed on valid input.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NonConvergence(_) | Error::DegenerateSpectrum | Error::SingularSystem
        )
    }
}
