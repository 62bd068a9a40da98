//! Discrete `q`-orthogonal (β = 1) ensembles on exponential lattices:
//! `q`-calculus, classical weights, skew-orthogonal polynomials, Pfaffian
//! partition functions, correlation kernels and brute-force oracles.

// `!(x > t)` is used deliberately: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod kernels;
pub mod oracle;
pub mod pfaffian;
pub mod poly;
pub mod qcore;
pub mod quaternion;
pub mod skew;

pub use error::{Error, Result};
pub use families::{Ensemble, WeightFamily};
pub use poly::PolySeries;
pub use qcore::{LatticePoint, Parity, QContext};
pub use quaternion::{qdet, Quaternion};
