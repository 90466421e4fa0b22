//! Synthetic states: fermionic Bell states, √prime states, Slater
//! expansions and Gaussian random states.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fock::{binomial, combinations, CIState};

/// Identifier of the generator behind every seeded draw.
pub const PRNG_ID: &str = "ChaCha8Rng/rand_chacha-0.9/seed_from_u64";

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ascending primes below an exclusive bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePool {
    primes: Vec<u64>,
    bound: u64,
}

impl PrimePool {
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }
}

/// Sieve of Eratosthenes over odd numbers, bit-packed.
pub fn primes_below(bound: u64) -> PrimePool {
    let mut primes = Vec::new();
    if bound > 2 {
        primes.push(2);
    }
    // bit i stands for 2i + 1
    let odd = (bound / 2) as usize;
    let mut composite = vec![0u64; odd / 64 + 1];
    let is_set = |c: &[u64], i: usize| c[i / 64] >> (i % 64) & 1 == 1;
    let mut i = 1;
    while i < odd {
        if !is_set(&composite, i) {
            let p = 2 * i + 1;
            primes.push(p as u64);
            let mut j = (p * p) / 2;
            while j < odd {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }
    primes.retain(|&p| p < bound);
    PrimePool { primes, bound }
}

/// Largest `N + L` for which the full pool below `2^{N+L}` is sieved.
pub const MAX_PRIME_BITS: usize = 30;

/// Assigns `√p` for `C(L, N)` pairwise distinct primes `p < 2^{N+L}`.
///
/// Tuples are visited in lexicographic order. Without a seed they receive the
/// smallest primes in ascending order; with a seed, the first `C(L, N)`
/// entries of a Fisher–Yates shuffle of the whole pool.
pub fn prime_state(
    orbitals: usize,
    electrons: usize,
    seed: Option<u64>,
    normalize: bool,
) -> Result<CIState> {
    if electrons == 0 || electrons > orbitals {
        return Err(Error::InvalidSize { orbitals, electrons });
    }
    let exponent = orbitals + electrons;
    if exponent > MAX_PRIME_BITS {
        return Err(Error::InvalidArgument(format!(
            "prime bound 2^{exponent} is beyond the sieve range"
        )));
    }
    let state = prime_state_from_pool(orbitals, electrons, &primes_below(1u64 << exponent), seed)?;
    if normalize {
        state.normalized()
    } else {
        Ok(state)
    }
}

/// As [`prime_state`], drawing from an explicit pool.
pub fn prime_state_from_pool(
    orbitals: usize,
    electrons: usize,
    pool: &PrimePool,
    seed: Option<u64>,
) -> Result<CIState> {
    if electrons == 0 || electrons > orbitals {
        return Err(Error::InvalidSize { orbitals, electrons });
    }
    let needed = binomial(orbitals, electrons);
    if pool.len() < needed {
        return Err(Error::InsufficientPrimes {
            needed,
            bound: pool.bound,
            available: pool.len(),
        });
    }
    let chosen = match seed {
        None => pool.primes[..needed].to_vec(),
        Some(seed) => draw_without_replacement(&pool.primes, needed, seed),
    };
    let terms = combinations(orbitals, electrons)
        .into_iter()
        .zip(chosen)
        .map(|(t, p)| (t, (p as f64).sqrt()))
        .collect::<BTreeMap<_, _>>();
    Ok(CIState::from_map_unchecked(orbitals, electrons, terms))
}

/// First `count` entries of a forward Fisher–Yates shuffle of `pool`.
fn draw_without_replacement(pool: &[u64], count: usize, seed: u64) -> Vec<u64> {
    let mut pool = pool.to_vec();
    let mut rng = rng(seed);
    for i in 0..count {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

/// Orbital coefficient matrix of a Slater determinant: row `k` expands the
/// occupied orbital `ψ_k` over the basis `φ₁…φ_L`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlaterCoefficientMatrix(DMatrix<f64>);

impl SlaterCoefficientMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (n, l) = matrix.shape();
        if n == 0 || n > l {
            return Err(Error::InvalidSize { orbitals: l, electrons: n });
        }
        Ok(SlaterCoefficientMatrix(matrix))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `λ_{j₁<…<j_N} = det C[:, (j₁…j_N)]`.
pub fn slater_expand(c: &SlaterCoefficientMatrix) -> CIState {
    let (n, l) = c.0.shape();
    let terms = combinations(l, n)
        .into_iter()
        .filter_map(|tuple| {
            let cols: Vec<usize> = tuple.as_slice().iter().map(|j| j - 1).collect();
            let minor = c.0.select_columns(cols.iter());
            let det = minor.determinant();
            (det != 0.0).then_some((tuple, det))
        })
        .collect();
    CIState::from_map_unchecked(l, n, terms)
}

/// `|ψ₁…ψ_N⟩` with `ψ_k = (φ_k + φ_{k+N})/√2` on `L = 2N` orbitals.
pub fn bell_state(electrons: usize) -> Result<CIState> {
    if electrons == 0 {
        return Err(Error::InvalidSize { orbitals: 0, electrons });
    }
    let l = 2 * electrons;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = DMatrix::from_fn(electrons, l, |k, j| if j == k || j == k + electrons { h } else { 0.0 });
    Ok(slater_expand(&SlaterCoefficientMatrix::new(c)?))
}

/// Standard-normal coefficients on every tuple, normalised.
pub fn random_state(orbitals: usize, electrons: usize, seed: u64) -> Result<CIState> {
    if electrons == 0 || electrons > orbitals {
        return Err(Error::InvalidSize { orbitals, electrons });
    }
    let mut rng = rng(seed);
    let terms: BTreeMap<_, f64> = combinations(orbitals, electrons)
        .into_iter()
        .map(|t| (t, rng.sample(StandardNormal)))
        .filter(|(_, c)| *c != 0.0)
        .collect();
    CIState::from_map_unchecked(orbitals, electrons, terms).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sieves() {
        assert_eq!(primes_below(10).primes(), &[2, 3, 5, 7]);
        assert!(primes_below(2).is_empty());
        assert_eq!(primes_below(3).primes(), &[2]);
        assert_eq!(primes_below(12).primes(), &[2, 3, 5, 7, 11]);
        assert_eq!(primes_below(1 << 16).len(), 6542);
    }

    #[test]
    fn fig2_pool_is_large_enough() {
        let pool = primes_below(1 << 18);
        assert_eq!(pool.len(), 23000);
        assert!(pool.len() >= binomial(12, 6));
    }

    #[test]
    fn lexicographic_prime_state() {
        let s = prime_state(4, 2, None, false).unwrap();
        let expected = [
            ([1, 2], 2.0),
            ([1, 3], 3.0),
            ([1, 4], 5.0),
            ([2, 3], 7.0),
            ([2, 4], 11.0),
            ([3, 4], 13.0),
        ];
        for (t, p) in expected {
            assert_eq!(s.coeff(&t), f64::sqrt(p));
        }
    }

    #[test]
    fn seeded_prime_state_draws_distinct_small_primes() {
        let s = prime_state(4, 2, Some(17), false).unwrap();
        assert_eq!(s.len(), 6);
        let mut squares: Vec<u64> = s.terms().map(|(_, c)| (c * c).round() as u64).collect();
        let pool = primes_below(64);
        assert!(squares.iter().all(|&p| pool.contains(p)));
        squares.sort();
        squares.dedup();
        assert_eq!(squares.len(), 6);
        assert_eq!(s, prime_state(4, 2, Some(17), false).unwrap());
        assert_ne!(s, prime_state(4, 2, Some(18), false).unwrap());
    }

    #[test]
    fn normalised_prime_state() {
        let s = prime_state(5, 2, Some(1), true).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_slater_matrix() {
        let mut c = DMatrix::zeros(3, 5);
        for k in 0..3 {
            c[(k, k)] = 1.0;
        }
        let s = slater_expand(&SlaterCoefficientMatrix::new(c).unwrap());
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&[1, 2, 3]), 1.0);
    }

    #[test]
    fn one_electron_expansion_copies_row() {
        let c = DMatrix::from_row_slice(1, 3, &[0.2, -0.7, 0.0]);
        let s = slater_expand(&SlaterCoefficientMatrix::new(c).unwrap());
        assert_eq!(s.coeff(&[1]), 0.2);
        assert_eq!(s.coeff(&[2]), -0.7);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn rank_deficient_matrix_gives_zero_state() {
        let c = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert!(slater_expand(&SlaterCoefficientMatrix::new(c).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn bell_one() {
        let s = bell_state(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.coeff(&[1]) - h).abs() < 1e-15);
        assert!((s.coeff(&[2]) - h).abs() < 1e-15);
    }

    #[test]
    fn random_state_is_deterministic_and_normalised() {
        let a = random_state(6, 3, 99).unwrap();
        assert_eq!(a, random_state(6, 3, 99).unwrap());
        assert_eq!(a.len(), 20);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn insufficient_primes_reported() {
        let pool = primes_below(12);
        assert!(matches!(
            prime_state_from_pool(4, 2, &pool, Some(3)),
            Err(Error::InsufficientPrimes { needed: 6, available: 5, .. })
        ));
        assert!(prime_state_from_pool(5, 1, &pool, None).is_ok());
        assert!(matches!(prime_state(4, 0, None, false), Err(Error::InvalidSize { .. })));
    }
}
