//! Exact and numerical kernels for the local objects attached to the
//! Spin L-function of GSp4: the symplectic similitude group and its
//! five-dimensional orthogonal representation, p-adic lattice integrals,
//! Satake-parameter generating series, and archimedean Gamma-factor
//! integrals.
//!
//! The crate is `no_std` and only needs `alloc`. Floating point
//! transcendental functions come from `libm` through `num-traits`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arch;
pub mod error;
pub mod exact_algebra;
pub mod gsp4;
pub mod local_unramified;
pub mod padic;
pub mod satake;
pub mod siegel;

pub use error::{Error, Result};
