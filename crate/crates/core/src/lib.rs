//! Generalization bounds built from convex comparator functions under
//! cumulant-generating-function (CGF) constraints.
//!
//! The crate is organised bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`families`] | the seven bounding families: CGFs, t-domains, closed-form Cramér functions, samplers |
//! | [`conjugate`] | numeric convex conjugation of a CGF (the oracle for the closed forms) |
//! | [`inversion`] | comparators and the bound-inversion operators |
//! | [`upsilon`] | the moment quantity `Υ_Δ(n)` and union-bound corrections |
//! | [`bounds`] | the named average / PAC-Bayesian / samplewise bounds and comparison surfaces |
//! | [`verify`] | a Monte-Carlo validity harness on synthetic finite-hypothesis problems |
//! | [`cli`] | the command-line front end |
//!
//! All numerical routines are pure functions of their inputs and may be
//! called from any number of threads.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod conjugate;
mod error;
pub mod families;
pub mod inversion;
pub mod rng;
pub mod search;
pub mod special;
pub mod upsilon;
pub mod verify;

pub use bounds::{BoundKind, BoundSpec, Correction, DiffKind};
pub use conjugate::{numeric_conjugate, parametric_value, CgfHandle, ConjugateValue};
pub use error::{Error, Result};
pub use families::{Family, Sidedness, TDomain};
pub use inversion::{invert, BoundQuery, BoundResult, BoundStatus, Comparator, Iota};
pub use upsilon::{UpsilonEstimate, UpsilonMode};

/// Default absolute tolerance of the numeric conjugate.
pub const CONJUGATE_TOL: f64 = 1e-10;

/// Default inversion tolerance (absolute on bounded ranges, relative above 1 on unbounded ones).
pub const INVERSION_TOL: f64 = 1e-9;
