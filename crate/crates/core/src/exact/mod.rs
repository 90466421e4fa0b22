//! Exact arithmetic in `Q(√p₁, …, √pₛ)` and full-rank certificates for
//! sector blocks of √prime states.
//!
//! Elements are multilinear polynomials in the `√p_j` with rational
//! coefficients. Square roots of distinct primes give linearly independent
//! monomials over `Q`, so an element is zero exactly when its coefficient
//! map is empty. A nonzero minor computed here is therefore a proof of rank.

mod certify;
mod multiquad;

pub use certify::{
    certify_full_rank, certify_unfolding, mq_det, BlockCertificate, BlockStatus,
    CutCertificate, ExactMatrix, DET_CAP,
};
pub use multiquad::{Monomial, MultiQuad};
