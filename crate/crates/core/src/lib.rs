//! Operator-algebra numerics for Grüss-type inequalities of unital
//! n-positive maps on matrix algebras.
//!
//! Everything here is a pure function of its inputs and builds without
//! `std`; only `alloc` is required. File formats, the command line and
//! wall-clock timing live in the companion `gruss-lab` crate.
//!
//! Module map:
//!
//! - [`matrix`], [`linalg`], [`random`]: dense complex matrices, the
//!   Jacobi eigensolver, SVD, polar decomposition and seeded ensembles.
//! - [`distance`]: distance of an operator from the scalars, by the
//!   spectral disk, convex minimization and a grid oracle.
//! - [`posmap`]: linear maps in Kraus, Choi and superoperator form,
//!   amplification, CP tests and the n-positivity witness search.
//! - [`stinespring`]: explicit dilations of unital CP maps.
//! - [`unitary_sum`]: writing a small-norm matrix as a mean of unitaries.
//! - [`harness`]: the Grüss defect and the checks built on it.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod distance;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod math;
pub mod matrix;
pub mod posmap;
pub mod random;
pub mod stinespring;
pub mod unitary_sum;

pub use error::{Error, Result};
pub use matrix::{c64, ComplexMatrix, C64};
