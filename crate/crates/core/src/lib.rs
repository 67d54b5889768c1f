//! Compiler, analyzer, verifier and simulator for execution-bounded chemical
//! reaction networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`crn`]: species, reactions, configurations, deciders (CRDs) and
//!   computers (CRCs);
//! - [`semilinear`]: predicate and piecewise-affine function ASTs with direct
//!   evaluators;
//! - [`format`]: the `.crn` and s-expression text formats;
//! - [`compiler`]: constructions turning predicates and functions into
//!   execution-bounded networks;
//! - [`analysis`]: linear potential functions, Farkas witnesses and
//!   feedforward orderings;
//! - [`verifier`]: exhaustive reachability with self-covering detection and
//!   stable-computation verdicts;
//! - [`simulator`]: Gillespie simulation and stabilization-time benchmarks.

pub mod analysis;
pub mod compiler;
pub mod crn;
pub mod format;
pub mod semilinear;
pub mod simulator;
pub mod verifier;

pub use crn::{Configuration, Crc, Crd, Crn, CrnBuilder, CrnError, OutputSpec, Reaction, SpeciesId};
pub use semilinear::{AffinePiece, ModAtom, PiecewiseFn, Predicate, PredicateExpr, SpecError, ThresholdAtom};
