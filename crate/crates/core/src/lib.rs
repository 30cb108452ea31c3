//! Computable Orlicz-space constructions.
//!
//! Every quantity is carried as a [`Log2Value`], a nonnegative real stored by
//! its base-2 logarithm, so that values such as `F(2^(2^18))` are ordinary
//! numbers. On top of that kernel the crate provides:
//!
//! - [`orlicz`]: Orlicz function specifications with log-domain evaluation,
//!   inversion, integral convexification, Young conjugation and indices.
//! - [`construction`]: the counterexample function built from disjoint
//!   dyadic-log intervals, with its structural, defect and floor probes.
//! - [`luxemburg`]: modulars and Luxemburg norms of disjointly supported
//!   simple functions and finite sequences.
//! - [`dh`]: finite-scale diagnostics for disjoint homogeneity (ratio curves,
//!   envelopes, regular variation, growth and duality probes).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// NaN must fail range checks, and log-domain products are sums of exponents
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::suspicious_arithmetic_impl)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod bisect;
pub mod construction;
pub mod dh;
mod error;
pub mod logdomain;
pub mod luxemburg;
pub mod orlicz;

pub use construction::{Construction, PlacedInterval, Prop3Params, RRule};
pub use error::{Error, Result};
pub use logdomain::Log2Value;
pub use luxemburg::{Atom, NormResult, SimpleFunction};
pub use orlicz::{OrliczFunctionSpec, PiecewiseLogAffine};
