//! Path-method bounds for functional inequalities of reversible
//! nearest-neighbor Markov processes on finite connected graphs.
//!
//! The crate computes, for a reversible model (graph, rates, stationary
//! measure):
//!
//! * combinatorial upper bounds on the Poincare, log-Sobolev, Gaussian
//!   transport, and Cheeger-type constants, driven by geodesic counting and
//!   edge congestion ([`bounds`], [`paths`]);
//! * exact small-graph oracles that certify those bounds: the spectral gap,
//!   Wasserstein-1 distances with dual witnesses, entropy and Fisher
//!   information, subset Cheeger ratios, and certified log-Sobolev lower
//!   bounds ([`oracles`]);
//! * optimization of the edge-length function the bounds depend on
//!   ([`wopt`]);
//! * continuous-time simulation with empirical concentration checks
//!   ([`sim`]).
//!
//! The `pathineq` binary exposes the same functionality as a CLI ([`cli`]).

pub mod bounds;
pub mod cli;
pub mod error;
pub mod metric;
pub mod model;
pub mod oracles;
pub mod paths;
pub mod report;
pub mod sim;
pub mod wopt;

pub use error::{Error, Result};
