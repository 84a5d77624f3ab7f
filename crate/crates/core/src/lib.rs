//! Block Kronecker linearizations of matrix polynomials, complete
//! eigenstructures of pencils, and the finite backward-error map from pencil
//! perturbations to polynomial perturbations.
//!
//! The crate is `no_std` and needs only `alloc`. Scalars are `Complex<f64>`;
//! real data is embedded with zero imaginary parts.

#![no_std]
#![deny(unsafe_code)]
// Float methods come from `num_traits::Float` in no_std builds and are inherent whenever std is in the graph.
#![allow(unused_imports)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod backward_error;
pub mod block_kronecker;
pub mod eigenstructure;
mod error;
pub mod linalg;
pub mod matpoly;
pub mod minimal_bases;
pub mod spectral;

pub use error::Error;
pub use linalg::{c64, Matrix, RankDecision, RankPolicy, C64};
pub use matpoly::{MatrixPolynomial, Pencil};
