//! Weighted hyperbolic-cross polynomial approximation for tensor-product
//! Freud weights `w(x) = prod_i exp(-a|x_i|^lambda + b)` on `R^d`.
//!
//! The crate is `no_std` and only needs `alloc`. It contains
//!
//! * [`weights`]: weight parameters and the scalar rate exponents,
//! * [`orthopoly`]: orthonormal polynomials for `w^2`, Gauss rules and
//!   differentiation matrices,
//! * [`spectral`]: sparse coefficient tensors, diagonal multipliers and
//!   hyperbolic-cross index sets,
//! * [`analysis`]: weighted norms, coefficient extraction, approximation
//!   errors, inequality probes and rate fits,
//! * [`widths`]: exact Kolmogorov widths of coefficient ellipsoids.
//!
//! IO, configuration files and the command line live in the `freudhc` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// reference constants in tests keep all digits of their source
#![cfg_attr(test, allow(clippy::excessive_precision))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub(crate) mod linalg;
pub(crate) mod math;
pub mod orthopoly;
pub mod spectral;
pub mod weights;
pub mod widths;

pub use error::{Error, Result};
pub use weights::{LpIndex, RateExponents, WeightParams};

/// Version of this crate, recorded in experiment artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
