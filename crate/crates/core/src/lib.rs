//! Optimal convex approximation of quantum channels.
//!
//! Given a target channel and a finite set of available channels, find the
//! mixture of the available channels that is least distinguishable from the
//! target, where distinguishability is measured by the diamond norm. The
//! diamond norm itself is computed by a small dense interior-point SDP solver
//! that returns primal and dual certificates.

pub mod error;
pub mod qmat;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex matrix used throughout the channel layer.
pub type ComplexMatrix = qmat::Matrix<f64>;
/// Single-precision complex matrix.
pub type ComplexMatrix32 = qmat::Matrix<f32>;
/// Double-precision Hermitian eigendecomposition.
pub type HermEigen = qmat::HermEigen<f64>;

pub mod approx;
pub mod channels;
pub mod cli;
pub mod diamond;
pub mod sdp;
