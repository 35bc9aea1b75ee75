//! Weighted ℓ1 reconstruction of signals and images from subsampled or noisy
//! measurements, over orthonormal wavelet and Haar-framelet coefficients.
//!
//! The crate is organised bottom-up:
//!
//! - [`dwt`]: periodic orthonormal wavelet transforms and the matrix-free
//!   sampling operator.
//! - [`tree`]: the closed-tree sparsity model and its complexity quantities.
//! - [`weights`]: level-dependent weights and the reweighting rules.
//! - [`solver`]: accelerated proximal gradient for the weighted ℓ1 and
//!   row-group (MMV) problems, plus the reweighting outer loop.
//! - [`framelet`]: Haar convolutional framelets.
//! - [`harness`]: synthetic data, noise, metrics and scheme comparisons.

pub mod dwt;
pub mod error;
pub mod framelet;
pub mod harness;
pub mod linalg;
pub mod solver;
pub mod tree;
pub mod weights;

pub use error::{Error, Result};
