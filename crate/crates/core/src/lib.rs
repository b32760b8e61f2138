//! Curvature tensors of Riemannian metrics, the relative-curvature
//! directedness test for `nabla R`, rotational hypersurfaces and their
//! meridian profiles.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod directed;
pub mod distribution;
pub mod error;
pub mod metric;
pub mod numeric;
pub mod rotational;
pub mod tensor;
pub mod tensorcalc;

pub use error::{Error, Result};
