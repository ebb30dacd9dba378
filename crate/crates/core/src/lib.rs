//! Sparse recovery by plain, weighted and two-stage reweighted ℓ1
//! minimization, with per-instance null-space certificates and a seeded
//! Monte Carlo harness for phase-transition experiments.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod lp;
pub mod recover;
pub mod sampling;
pub mod signals;

mod serde_inf;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use sampling::Seed;
