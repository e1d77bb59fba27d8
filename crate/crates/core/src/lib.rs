//! Exact stochastic calculus on finite filtered probability spaces.
//!
//! Everything here runs over arbitrary-precision rationals: martingale
//! checks, Doob decompositions, stochastic integrals, martingale-measure
//! polytopes, predictable-representation (completeness) decisions and
//! filtration-enlargement diagnostics are all decided exactly, with no
//! tolerance parameter anywhere.
//!
//! Module map:
//!
//! - [`space`] — outcomes, partitions, filtrations, measures, conditional
//!   expectation, adaptedness and predictability.
//! - [`calculus`] — Doob decomposition, stochastic integrals, quadratic
//!   (co)variation, compensators, structure condition, Doléans exponential,
//!   orthogonality and independence tests.
//! - [`measures`] — martingale-measure polytopes: feasibility, equivalence,
//!   uniqueness, vertex enumeration, minimal measures, product densities and
//!   the second fundamental theorem of asset pricing report.
//! - [`representation`] — integral spans, completeness decisions,
//!   representation solving and the triplet decomposition reports.
//! - [`enlargement`] — enlargement operators, the first strict-inclusion
//!   time, immersion checks and the representation-loss witness.

pub mod calculus;
pub mod enlargement;
mod error;
pub mod linalg;
pub mod measures;
pub mod rational;
pub mod sampling;
pub mod representation;
pub mod space;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use rational::Rat;
