//! Exact simulation and estimation toolkit for collective-spin interferometry.
//!
//! States live in the symmetric (Dicke) subspace of `N` two-mode bosons, so
//! every object here is a dense `(N + 1)`-dimensional vector or matrix. The
//! crate is organised bottom-up:
//!
//! - [`spin`]: Dicke states, collective operators, measurement bases, rotations
//!   and one-axis twisting.
//! - [`estimation`]: outcome distributions, the detection-noise channel,
//!   Hellinger distance, classical/quantum Fisher information, method-of-moments
//!   sensitivity and optimal-basis discovery.
//! - [`protocols`]: squeezing angle, protocol construction, pipeline evaluation
//!   and the fixed total-time optimizer.
//! - [`verify`]: the randomized parity-optimality suite.

pub mod error;
pub mod estimation;
pub mod protocols;
pub mod spin;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
