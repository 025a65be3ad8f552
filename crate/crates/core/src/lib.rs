//! Exact checkers for Kannan- and Chatterjea-type contraction conditions.
//!
//! * [`metric`]: finite metric spaces, self-maps, random instances.
//! * [`orbit`]: Picard orbits with cycle detection and gap sequences.
//! * [`conditions`]: contraction constants, the strict conditions (CM) and
//!   (CM2), and the epsilon-delta conditions over finite `(S, D)` pair sets.
//! * [`picard`]: iteration with diagnostics on finite spaces and on
//!   closed-form interval fixtures.
//! * [`sequences`]: decision procedures for the epsilon-delta conditions on
//!   strictly decreasing sequences, with a brute-force oracle.
//! * [`verifier`]: theorem sweeps, counterexample search, and the
//!   completeness demonstration.

#![allow(clippy::needless_range_loop)]

pub mod conditions;
pub mod io;
pub mod metric;
pub mod orbit;
pub mod picard;
pub mod rational;
pub mod sequences;
pub mod verifier;

pub use metric::{FiniteMetricSpace, SelfMap};
pub use rational::Rational;
