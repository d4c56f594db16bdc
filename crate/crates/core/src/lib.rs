//! Exact recovery in the planted partition model via semidefinite programming.
//!
//! The crate samples planted-partition graphs (optionally altered by monotone
//! adversaries), computes the information-theoretic recovery threshold, solves
//! the known-sizes and unknown-sizes SDP relaxations with ADMM, and builds and
//! verifies the dual certificate that proves the planted partition is the
//! unique optimum. A brute-force maximum-likelihood oracle validates all of it
//! on tiny graphs.

pub mod adversary;
pub mod certificate;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod sdp;
pub mod thresholds;

pub use error::{Error, Result};
