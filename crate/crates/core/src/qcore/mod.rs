//! Dense complex linear algebra over small Hilbert spaces, plus the
//! information-theoretic scalar functions used throughout the crate.
//!
//! Tensor products use the convention that the first factor carries the slow
//! (most significant) index: `(A ⊗ B)[(i1·rB + i2), (j1·cB + j2)] = A[i1,j1]·B[i2,j2]`.

mod info;
mod linalg;

pub use info::{binary_entropy, entropy_bits, mutual_information, shannon_entropy, ProbVec};
pub use linalg::{gram, kron, schmidt_rank, CMat, CVec};

pub use num_complex::Complex64;

/// Tolerance for structural predicates (orthogonality, PSD, rank).
pub const STRUCT_TOL: f64 = 1e-10;
/// Tolerance for algebraic identities.
pub const ALG_TOL: f64 = 1e-12;

#[allow(non_camel_case_types)]
pub type c64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}
