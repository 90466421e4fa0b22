//! Occupation-number analysis of fermionic wavefunctions.
//!
//! The crate converts configuration-interaction (CI) coefficient maps into
//! dense occupation tensors over `{0,1}^L`, decomposes them into matrix
//! product states with a left-to-right TT-SVD sweep, applies orbital
//! reorderings with the correct fermionic sign, and certifies unfolding
//! ranks of square-root-of-prime states in exact arithmetic over
//! `Q(√p₁, …, √pₛ)`.
//!
//! Module map:
//!
//! * [`fock`]: CI states, occupation tensors, unfoldings and particle-number
//!   sector blocks.
//! * [`states`]: Bell states, √prime states, Slater expansions, random states.
//! * [`mps`]: TT-SVD, contraction, explicit Bell cores.
//! * [`exact`]: multi-quadratic field arithmetic and rank certificates.
//! * [`ordering`]: permutations, entropies, mutual information, Fiedler and
//!   exhaustive ordering search.
//! * [`spectra`]: singular-value spectra, entropies, CSV export.
//! * [`verify`]: end-to-end Bell and prime pipelines with PASS/FAIL reports.
//!
//! With the default `parallel` feature, sweeps over orderings, pairs and
//! blocks run on rayon; without it every such loop runs sequentially with
//! identical results.

pub mod error;
pub mod exact;
pub mod fock;
pub mod format;
pub(crate) mod linalg;
pub mod mps;
pub mod ordering;
pub(crate) mod par;
pub mod spectra;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{
    binomial, ci_to_occupation, max_sector_rank, occupation_to_ci, unfold, CIState,
    OccupationBitstring, OccupationTensor, OrbitalIndexTuple, SectorBlock, Unfolding,
};
pub use mps::{bell_mps_explicit, tt_svd, Mps, MpsCore};
pub use ordering::{apply_permutation, pairing_permutation, OrbitalPermutation};
pub use spectra::{SpectrumRecord, DEFAULT_RANK_TOL};
pub use states::{bell_state, prime_state, primes_below, random_state, slater_expand, PrimePool};

/// Largest orbital count for which dense `2^L` tensors are materialised.
pub const DENSE_CAP: usize = 20;

/// Whether this build runs sweeps on rayon.
pub const PARALLEL: bool = cfg!(feature = "parallel");
