//! Harmonic analysis on `F_q^d` over the quadratic varieties
//! `S = {x : a_1 x_1^2 + ... + a_d x_d^2 = 0}`.
//!
//! The crate is `no_std` (with `alloc`). It covers exact field arithmetic,
//! Gauss sums, measure-aware Fourier transforms, the extension, restriction
//! and averaging operators attached to `S`, lower-bound estimation of their
//! `L^p -> L^r` norms, and the sweep/fit machinery used to decide whether a
//! norm stays bounded as `q` grows.
//!
//! Enable the `parallel` feature to fan independent trials and restarts out
//! over a rayon pool; results do not depend on scheduling.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop, clippy::manual_is_multiple_of, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod charsums;
pub mod experiments;
pub mod exponent;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod linalg;
pub mod norms;
pub mod operators;
pub mod variety;

mod math;
mod par;
pub mod seed;

pub use num_complex::Complex64;

pub use exponent::Exponent;
pub use field::{Elem, FieldError, FiniteField};
pub use fourier::{Dual, GridFunction, Primal};
pub use grid::Grid;
pub use variety::{QuadraticForm, Variety};

/// Crate version, folded into cache keys and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
