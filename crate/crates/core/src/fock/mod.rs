//! Occupation-number representation of N-electron states in L spin-orbitals.
//!
//! A CI state maps strictly increasing orbital tuples `(i₁ < … < i_N)` to
//! coefficients. Its occupation tensor is the dense array `ψ` over
//! bitstrings `μ₁…μ_L` with `ψ[μ] = λ_T` when `μ_k = 1` exactly for `k ∈ T`.
//!
//! Bit order: `μ₁` is the leftmost character of a bitstring and the most
//! significant bit of its integer encoding. Orbitals are 1-based.

mod json;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::DENSE_CAP;

pub use json::{read_state, state_from_json, state_to_json, write_state, StateMeta};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All strictly increasing `n`-tuples over `1..=l`, lexicographic.
pub fn combinations(l: usize, n: usize) -> Vec<OrbitalIndexTuple> {
    let mut out = Vec::with_capacity(binomial(l, n));
    if n > l {
        return out;
    }
    let mut cur: Vec<usize> = (1..=n).collect();
    loop {
        out.push(OrbitalIndexTuple(cur.clone()));
        // rightmost position that can still advance
        let Some(i) = (0..n).rev().find(|&i| cur[i] < l - (n - 1 - i)) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..n {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// Strictly increasing 1-based orbital indices of an occupied determinant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitalIndexTuple(Vec<usize>);

impl OrbitalIndexTuple {
    pub fn new(indices: Vec<usize>) -> Self {
        OrbitalIndexTuple(indices)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Valid for `(l, n)`: length `n`, strictly increasing, entries in `1..=l`.
    pub fn is_valid_for(&self, l: usize, n: usize) -> bool {
        self.0.len() == n
            && self.0.iter().all(|&i| (1..=l).contains(&i))
            && self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub fn to_bitstring(&self, l: usize) -> OccupationBitstring {
        let bits = self.0.iter().fold(0u32, |acc, &i| acc | 1 << (l - i));
        OccupationBitstring { bits, len: l }
    }
}

impl From<Vec<usize>> for OrbitalIndexTuple {
    fn from(v: Vec<usize>) -> Self {
        OrbitalIndexTuple(v)
    }
}

/// Occupation pattern `μ₁…μ_L`; `μ₁` is the most significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OccupationBitstring {
    bits: u32,
    len: usize,
}

impl OccupationBitstring {
    pub fn from_index(index: usize, len: usize) -> Result<Self> {
        if len > DENSE_CAP {
            return Err(Error::Capacity { orbitals: len, cap: DENSE_CAP });
        }
        if index >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "index {index} does not fit in {len} bits"
            )));
        }
        Ok(OccupationBitstring { bits: index as u32, len })
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `μ_site`, 1-based.
    pub fn occupied(&self, site: usize) -> bool {
        (self.bits >> (self.len - site)) & 1 == 1
    }

    pub fn popcount(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn to_tuple(&self) -> OrbitalIndexTuple {
        OrbitalIndexTuple((1..=self.len).filter(|&k| self.occupied(k)).collect())
    }
}

impl fmt::Display for OccupationBitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 1..=self.len {
            f.write_str(if self.occupied(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for OccupationBitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > DENSE_CAP {
            return Err(Error::Capacity { orbitals: s.len(), cap: DENSE_CAP });
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::Parse(format!("bad occupation string {s:?}"))),
                };
        }
        Ok(OccupationBitstring { bits, len: s.len() })
    }
}

/// Sparse CI expansion `Σ λ_T |φ_T⟩`. Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct CIState {
    orbitals: usize,
    electrons: usize,
    terms: BTreeMap<OrbitalIndexTuple, f64>,
}

impl CIState {
    pub fn empty(orbitals: usize, electrons: usize) -> Result<Self> {
        if electrons == 0 || electrons > orbitals {
            return Err(Error::InvalidSize { orbitals, electrons });
        }
        Ok(CIState { orbitals, electrons, terms: BTreeMap::new() })
    }

    /// Builds a state from `(tuple, λ)` pairs, dropping exact zeros.
    pub fn from_terms<I, T>(orbitals: usize, electrons: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, f64)>,
        T: Into<OrbitalIndexTuple>,
    {
        let mut state = Self::empty(orbitals, electrons)?;
        for (tuple, coeff) in terms {
            let tuple = tuple.into();
            if !tuple.is_valid_for(orbitals, electrons) {
                return Err(Error::InvalidTuple {
                    tuple: tuple.into_vec(),
                    orbitals,
                    electrons,
                });
            }
            if coeff == 0.0 {
                continue;
            }
            if state.terms.contains_key(&tuple) {
                return Err(Error::DuplicateTuple(tuple.into_vec()));
            }
            state.terms.insert(tuple, coeff);
        }
        Ok(state)
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn electrons(&self) -> usize {
        self.electrons
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `λ_T`, zero for absent tuples.
    pub fn coeff(&self, tuple: &[usize]) -> f64 {
        self.terms.get(&OrbitalIndexTuple(tuple.to_vec())).copied().unwrap_or(0.0)
    }

    /// Terms in lexicographic tuple order.
    pub fn terms(&self) -> impl Iterator<Item = (&OrbitalIndexTuple, f64)> + '_ {
        self.terms.iter().map(|(t, &c)| (t, c))
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> CIState {
        CIState {
            orbitals: self.orbitals,
            electrons: self.electrons,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.clone(), c * factor))
                .filter(|(_, c)| *c != 0.0)
                .collect(),
        }
    }

    /// Divides by the 2-norm.
    pub fn normalized(&self) -> Result<CIState> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(1.0 / norm))
    }

    pub(crate) fn from_map_unchecked(
        orbitals: usize,
        electrons: usize,
        terms: BTreeMap<OrbitalIndexTuple, f64>,
    ) -> Self {
        debug_assert!(terms.keys().all(|t| t.is_valid_for(orbitals, electrons)));
        debug_assert!(terms.values().all(|&c| c != 0.0));
        CIState { orbitals, electrons, terms }
    }
}

/// Dense coefficient array `ψ` of length `2^L`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupationTensor {
    orbitals: usize,
    electrons: usize,
    psi: Vec<f64>,
}

impl OccupationTensor {
    pub fn zeros(orbitals: usize, electrons: usize) -> Result<Self> {
        check_cap(orbitals)?;
        if electrons > orbitals {
            return Err(Error::InvalidSize { orbitals, electrons });
        }
        Ok(OccupationTensor { orbitals, electrons, psi: vec![0.0; 1 << orbitals] })
    }

    /// Wraps a raw array. Only the length is checked; the particle-number
    /// sector is enforced by [`occupation_to_ci`].
    pub fn from_vec(orbitals: usize, electrons: usize, psi: Vec<f64>) -> Result<Self> {
        check_cap(orbitals)?;
        if electrons > orbitals {
            return Err(Error::InvalidSize { orbitals, electrons });
        }
        if psi.len() != 1 << orbitals {
            return Err(Error::SizeMismatch { expected: 1 << orbitals, actual: psi.len() });
        }
        Ok(OccupationTensor { orbitals, electrons, psi })
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn electrons(&self) -> usize {
        self.electrons
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.psi
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.psi
    }

    pub fn get(&self, bits: &OccupationBitstring) -> f64 {
        self.psi[bits.index()]
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest entry outside the `N`-particle sector.
    pub fn off_sector_max(&self) -> f64 {
        self.psi
            .iter()
            .enumerate()
            .filter(|(i, _)| i.count_ones() as usize != self.electrons)
            .fold(0.0, |m, (_, x)| m.max(x.abs()))
    }
}

fn check_cap(orbitals: usize) -> Result<()> {
    if orbitals > DENSE_CAP {
        Err(Error::Capacity { orbitals, cap: DENSE_CAP })
    } else {
        Ok(())
    }
}

pub fn ci_to_occupation(state: &CIState) -> Result<OccupationTensor> {
    let mut t = OccupationTensor::zeros(state.orbitals, state.electrons)?;
    for (tuple, coeff) in state.terms() {
        t.psi[tuple.to_bitstring(state.orbitals).index()] = coeff;
    }
    Ok(t)
}

pub fn occupation_to_ci(t: &OccupationTensor) -> Result<CIState> {
    let l = t.orbitals;
    if t.electrons == 0 {
        return Err(Error::InvalidSize { orbitals: l, electrons: 0 });
    }
    let mut terms = BTreeMap::new();
    for (index, &x) in t.psi.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        if index.count_ones() as usize != t.electrons {
            let bits = OccupationBitstring::from_index(index, l)?;
            return Err(Error::MalformedTensor(format!(
                "nonzero entry {x} at {bits} outside the N = {} sector",
                t.electrons
            )));
        }
        let bits = OccupationBitstring { bits: index as u32, len: l };
        terms.insert(bits.to_tuple(), x);
    }
    Ok(CIState::from_map_unchecked(l, t.electrons, terms))
}

/// Matricisation `ψ^{μ₁…μ_k}_{μ_{k+1}…μ_L}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Unfolding {
    cut: usize,
    orbitals: usize,
    electrons: usize,
    matrix: DMatrix<f64>,
}

impl Unfolding {
    pub fn cut(&self) -> usize {
        self.cut
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn electrons(&self) -> usize {
        self.electrons
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Inverse reshape.
    pub fn refold(&self) -> OccupationTensor {
        let right = self.orbitals - self.cut;
        let mut psi = vec![0.0; 1 << self.orbitals];
        for r in 0..self.matrix.nrows() {
            for c in 0..self.matrix.ncols() {
                psi[(r << right) | c] = self.matrix[(r, c)];
            }
        }
        OccupationTensor { orbitals: self.orbitals, electrons: self.electrons, psi }
    }

    /// Particle-number blocks, ascending in the left count `n`.
    pub fn sector_blocks(&self) -> Vec<SectorBlock> {
        sector_layout(self.orbitals, self.electrons, self.cut)
            .into_iter()
            .map(|(n, rows, cols)| {
                let entries =
                    DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.matrix[(rows[i], cols[j])]);
                SectorBlock { cut: self.cut, left_count: n, rows, cols, entries }
            })
            .collect()
    }
}

pub fn unfold(t: &OccupationTensor, cut: usize) -> Result<Unfolding> {
    let l = t.orbitals;
    if cut == 0 || cut >= l {
        return Err(Error::CutOutOfRange { cut, max: l.saturating_sub(1) });
    }
    let right = l - cut;
    // ψ is row-major in (left bits, right bits)
    let matrix = DMatrix::from_row_slice(1 << cut, 1 << right, &t.psi);
    Ok(Unfolding { cut, orbitals: l, electrons: t.electrons, matrix })
}

/// Fixed-particle-number submatrix of an unfolding.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBlock {
    pub cut: usize,
    /// Particles left of the cut.
    pub left_count: usize,
    /// Left bitstrings (as `k`-bit integers) with popcount `left_count`, ascending.
    pub rows: Vec<usize>,
    /// Right bitstrings with popcount `N − left_count`, ascending.
    pub cols: Vec<usize>,
    pub entries: DMatrix<f64>,
}

impl SectorBlock {
    /// `min(rows, cols)`: the largest rank the block can have.
    pub fn square_dim(&self) -> usize {
        self.rows.len().min(self.cols.len())
    }
}

/// Feasible `(n, rows, cols)` triples for a cut.
pub(crate) fn sector_layout(
    l: usize,
    electrons: usize,
    cut: usize,
) -> Vec<(usize, Vec<usize>, Vec<usize>)> {
    let right = l - cut;
    let lo = electrons.saturating_sub(right);
    let hi = cut.min(electrons);
    (lo..=hi)
        .map(|n| {
            let rows = (0..1usize << cut).filter(|r| r.count_ones() as usize == n).collect();
            let cols = (0..1usize << right)
                .filter(|c| c.count_ones() as usize == electrons - n)
                .collect();
            (n, rows, cols)
        })
        .collect()
}

/// `Σ_n min(C(k, n), C(L−k, N−n))`: the largest unfolding rank any
/// N-particle state can reach at cut `k`.
pub fn max_sector_rank(l: usize, electrons: usize, cut: usize) -> usize {
    if cut > l || electrons > l {
        return 0;
    }
    let right = l - cut;
    (electrons.saturating_sub(right)..=cut.min(electrons))
        .map(|n| binomial(cut, n).min(binomial(right, electrons - n)))
        .sum()
}
