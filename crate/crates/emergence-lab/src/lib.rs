//! Exact computation of entropy, entropy order and emergence quantities for
//! symbolic dynamical systems and the systems they induce on probability
//! measures and on the hyperspace of closed sets.
//!
//! Everything is computed with rational arithmetic at finite cylinder
//! resolution: distances are powers of the contraction base, transport costs
//! come from an exact min-cost-flow solver, and counting certificates carry
//! machine-checkable witnesses. Floats appear only in reports.
//!
//! The guide in `book/` walks through the concepts; its code snippets are
//! compiled as doctests of this crate.

#![forbid(unsafe_code)]

use thiserror::Error as ThisError;

pub mod certificates;
pub mod counting;
pub mod emergence;
pub mod formats;
pub mod hyperspace;
pub mod measures;
pub mod rational;
pub mod sampling;
pub mod systems;

#[cfg(doctest)]
mod book;

pub use num::bigint::{BigInt, BigUint};
pub use num::rational::BigRational;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("points belong to different systems")]
    SystemMismatch,

    #[error("symbol {symbol} outside alphabet of size {m}")]
    IllegalSymbol { symbol: u8, m: usize },

    #[error("transition {from}->{to} is forbidden")]
    ForbiddenTransition { from: u8, to: u8 },

    #[error("word too short: need length >= {needed}, got {got}")]
    WordTooShort { needed: usize, got: usize },

    #[error("word is not cyclically admissible: {0}")]
    CyclicInadmissible(String),

    #[error("resource cap exceeded for {what}: {size} > {cap}")]
    ResourceCap {
        what: String,
        size: String,
        cap: String,
    },

    #[error("distance not determined at this resolution")]
    InexactDistance,

    #[error("covering infeasible: element {element} not covered by any candidate")]
    InfeasibleCover { element: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("transition graph is not mixing: no connector from {from} to {to}")]
    NotMixing { from: u8, to: u8 },

    #[error("certificate rejected: {0}")]
    CertificateInvalid(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
