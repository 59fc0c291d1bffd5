//! Extremal dependence of linear transformations of exponential-tailed noise.
//!
//! The crate covers the noise families ([`exptail`]), the finite linear model
//! and its tail coefficients ([`lintrans`]), kernel limits ([`kernels`]),
//! mesh discretizations ([`approx`]) and empirical estimators ([`estimate`]).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod approx;
pub mod error;
pub mod estimate;
pub mod exptail;
pub mod kernels;
pub mod lintrans;
pub mod quad;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use exptail::{Family, GhParams, GigParams, NoiseDistribution};
