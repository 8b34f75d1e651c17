//! Linear canonical transforms and generalized AWGN capacity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod matrix;
pub mod sampling;
pub mod signal;
pub mod band;
pub mod capacity;
pub mod channel;
pub mod transform;

pub use error::{Error, Result};
pub use matrix::{LctMatrix, MatrixKind, MatrixSpec};
pub use num_complex::Complex64;
pub use signal::{NoiseSpec, SampledSignal};
