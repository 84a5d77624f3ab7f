//! Dense complex kernels: matrix type, Jacobi SVD, rank policy and QZ.

mod matrix;
mod qz;
mod rank;
mod svd;

pub use matrix::{givens, pair_norm, Matrix};
pub use qz::qz_eigenvalues;
pub use rank::{RankDecision, RankPolicy};
pub use svd::{left_compression, right_compression, singular_values, spectral_norm, Svd};

pub type C64 = num_complex::Complex<f64>;

pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
