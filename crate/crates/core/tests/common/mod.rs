//! Brute-force oracles kept independent of the library's code paths.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use mpslab::{CIState, OrbitalPermutation};
use nalgebra::DMatrix;

/// Sign from the cycle decomposition: `(−1)^{n − #cycles}`.
pub fn parity_by_cycles(p: &[usize]) -> f64 {
    let mut seen = vec![false; p.len()];
    let mut cycles = 0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
        }
    }
    if (p.len() - cycles) % 2 == 0 { 1.0 } else { -1.0 }
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, out);
            if k % 2 == 0 { a.swap(i, k - 1) } else { a.swap(0, k - 1) }
        }
        heap(k - 1, a, out);
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

/// Full antisymmetric tensor `Σ_T λ_T Σ_π sgn(π) e_{T_π(1)} ⊗ … ⊗ e_{T_π(N)}`
/// over ordered 1-based index tuples.
pub fn antisymmetrize(state: &CIState) -> HashMap<Vec<usize>, f64> {
    let perms = permutations(state.electrons());
    let mut out: HashMap<Vec<usize>, f64> = HashMap::new();
    for (tuple, coeff) in state.terms() {
        let t = tuple.as_slice();
        for p in &perms {
            let idx: Vec<usize> = p.iter().map(|&k| t[k]).collect();
            *out.entry(idx).or_insert(0.0) += parity_by_cycles(p) * coeff;
        }
    }
    out
}

/// Reordered CI coefficients: relabel tensor indices `old orbital σ(j) → j`,
/// then read the coefficients at sorted tuples.
pub fn oracle_reorder(state: &CIState, sigma: &OrbitalPermutation) -> BTreeMap<Vec<usize>, f64> {
    let mut new_label = vec![0; state.orbitals() + 1];
    for j in 1..=state.orbitals() {
        new_label[sigma.orbital_at(j)] = j;
    }
    antisymmetrize(state)
        .into_iter()
        .map(|(idx, c)| (idx.iter().map(|&o| new_label[o]).collect::<Vec<_>>(), c))
        .filter(|(idx, c)| idx.windows(2).all(|w| w[0] < w[1]) && *c != 0.0)
        .collect()
}

/// `ψ₁ ∧ … ∧ ψ_N` from coefficient rows, read at sorted tuples.
pub fn wedge_coefficients(c: &DMatrix<f64>) -> BTreeMap<Vec<usize>, f64> {
    let (n, l) = c.shape();
    let perms = permutations(n);
    let mut out = BTreeMap::new();
    // all increasing tuples by bitmask enumeration
    for mask in 0u32..(1 << l) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let cols: Vec<usize> = (0..l).filter(|j| mask >> j & 1 == 1).collect();
        let mut value = 0.0;
        for p in &perms {
            // ψ_{p(0)} ⊗ … ⊗ ψ_{p(n-1)} evaluated at (cols[0], …, cols[n-1])
            let prod: f64 = (0..n).map(|slot| c[(p[slot], cols[slot])]).product();
            value += parity_by_cycles(p) * prod;
        }
        if value != 0.0 {
            out.insert(cols.iter().map(|j| j + 1).collect(), value);
        }
    }
    out
}

pub fn state_map(state: &CIState) -> BTreeMap<Vec<usize>, f64> {
    state.terms().map(|(t, c)| (t.as_slice().to_vec(), c)).collect()
}

/// Dense unfolding built from bitstring text: row `μ₁…μ_k`, column `μ_{k+1}…μ_L`.
pub fn oracle_unfolding(state: &CIState, k: usize) -> DMatrix<f64> {
    let l = state.orbitals();
    let mut m = DMatrix::zeros(1 << k, 1 << (l - k));
    for (tuple, coeff) in state.terms() {
        let text: String =
            (1..=l).map(|i| if tuple.as_slice().contains(&i) { '1' } else { '0' }).collect();
        let r = usize::from_str_radix(&text[..k], 2).unwrap();
        let c = usize::from_str_radix(&text[k..], 2).unwrap();
        m[(r, c)] = coeff;
    }
    m
}

/// Descending singular values of the full dense matrix.
pub fn dense_sigmas(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn dense_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = dense_sigmas(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

pub fn entropy_of(sigmas: &[f64]) -> f64 {
    let total: f64 = sigmas.iter().map(|s| s * s).sum();
    sigmas
        .iter()
        .map(|s| s * s / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}
