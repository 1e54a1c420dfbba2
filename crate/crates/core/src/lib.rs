//! Forward analysis of well-structured transition systems.
//!
//! States are taken in the ideal completion of the concrete state space
//! (`ℕ_ω^k` for counter systems, word-products for channel systems). The
//! [`engine`] computes clovers, the finite antichains of maximal elements of
//! the closure of the cover, through lub-acceleration and a Hoare fixpoint
//! test. [`analyses`] answers coverability and boundedness queries from a
//! (possibly partial) run, and [`kmtree`] provides the generalized
//! Karp-Miller tree as a baseline.

pub mod acs;
pub mod analyses;
pub mod engine;
pub mod flattening;
pub mod flcs;
pub mod kmtree;
pub mod model;
pub mod omega;
pub mod order;
pub mod words;

pub use acs::{AcsModel, AffineMap};
pub use engine::{run_clover, Accelerated, Budgets, CloverRun, RunOptions, RunStatus, Wsts};
pub use flcs::{FlcsModel, FlcsState};
pub use model::Model;
pub use omega::{OmegaNat, OmegaVec};
pub use order::OrderedDomain;
pub use words::{Letter, WordProduct};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{0}")]
    Value(String),
    #[error("line {line}: {message}")]
    At { line: usize, message: String },
    #[error("{0}")]
    Model(#[from] ModelError),
}

/// Violations of model well-formedness.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("map `{map}`: expected dimension {expected}, found {found}")]
    Dimension {
        map: String,
        expected: usize,
        found: usize,
    },
    #[error("map `{map}`: image of the guard is negative at coordinate {coord}")]
    NegativeImage { map: String, coord: usize },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("{0}")]
    Other(String),
}
