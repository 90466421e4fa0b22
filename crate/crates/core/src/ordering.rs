//! Orbital reorderings with fermionic signs, orbital entropies, mutual
//! information, Fiedler ordering and best-ordering search.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ci_to_occupation, CIState, OrbitalIndexTuple};
use crate::par;
use crate::spectra::{cut_singular_values, entropy_bits, rank_profile, DEFAULT_RANK_TOL};
use crate::states;

/// Bijection on `1..=L`: new position `k` holds old orbital `σ(k)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitalPermutation(Vec<usize>);

impl OrbitalPermutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let l = perm.len();
        let mut seen = vec![false; l + 1];
        for &o in &perm {
            if o == 0 || o > l || seen[o] {
                return Err(Error::InvalidPermutation(format!(
                    "{perm:?} is not a permutation of 1..={l}"
                )));
            }
            seen[o] = true;
        }
        Ok(OrbitalPermutation(perm))
    }

    pub fn identity(l: usize) -> Self {
        OrbitalPermutation((1..=l).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Old orbital at new position `k` (1-based).
    pub fn orbital_at(&self, k: usize) -> usize {
        self.0[k - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (k, &o) in self.0.iter().enumerate() {
            inv[o - 1] = k + 1;
        }
        OrbitalPermutation(inv)
    }

    /// Apply `self` first, then `next` (both as relabelings).
    pub fn then(&self, next: &OrbitalPermutation) -> Self {
        OrbitalPermutation(next.0.iter().map(|&k| self.0[k - 1]).collect())
    }

    pub fn reversed(&self) -> Self {
        OrbitalPermutation(self.0.iter().rev().copied().collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(k, &o)| o == k + 1)
    }
}

impl fmt::Display for OrbitalPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{o}")?;
        }
        f.write_str(")")
    }
}

pub const PERM_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct PermFile {
    perm: Vec<usize>,
    #[serde(default)]
    schema_version: Option<u32>,
}

pub fn permutation_from_json(text: &str) -> Result<OrbitalPermutation> {
    let raw: PermFile = serde_json::from_str(text)?;
    OrbitalPermutation::new(raw.perm)
}

pub fn permutation_to_json(perm: &OrbitalPermutation) -> String {
    let file = PermFile { perm: perm.0.clone(), schema_version: Some(PERM_SCHEMA_VERSION) };
    serde_json::to_string(&file).expect("permutation serialises") + "\n"
}

pub fn read_permutation(path: &Path) -> Result<OrbitalPermutation> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    permutation_from_json(&text)
}

/// Uniform random permutation (forward Fisher–Yates, [`states::PRNG_ID`]).
pub fn random_permutation(l: usize, seed: u64) -> OrbitalPermutation {
    let mut perm: Vec<usize> = (1..=l).collect();
    let mut rng = states::rng(seed);
    for i in 0..l.saturating_sub(1) {
        let j = rng.random_range(i..l);
        perm.swap(i, j);
    }
    OrbitalPermutation(perm)
}

/// Re-expresses `state` in the basis `φ̃_k = φ_{σ(k)}`.
///
/// Each determinant `|φ_{i₁} … φ_{i_N}⟩` becomes `|φ̃_{σ⁻¹(i₁)} … φ̃_{σ⁻¹(i_N)}⟩`;
/// sorting those labels contributes the parity of the sorting permutation.
pub fn apply_permutation(state: &CIState, sigma: &OrbitalPermutation) -> Result<CIState> {
    if sigma.len() != state.orbitals() {
        return Err(Error::SizeMismatch { expected: state.orbitals(), actual: sigma.len() });
    }
    let inv = sigma.inverse();
    let terms: BTreeMap<_, _> = state
        .terms()
        .map(|(tuple, coeff)| {
            let mut labels: Vec<usize> = tuple.as_slice().iter().map(|&o| inv.0[o - 1]).collect();
            let odd = inversions(&labels) % 2 == 1;
            labels.sort_unstable();
            (OrbitalIndexTuple::new(labels), if odd { -coeff } else { coeff })
        })
        .collect();
    Ok(CIState::from_map_unchecked(state.orbitals(), state.electrons(), terms))
}

fn inversions(xs: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if xs[i] > xs[j] {
                count += 1;
            }
        }
    }
    count
}

/// `(φ₁, φ_{N+1}, φ₂, φ_{N+2}, …, φ_N, φ_{2N})`.
pub fn pairing_permutation(electrons: usize) -> OrbitalPermutation {
    OrbitalPermutation((1..=electrons).flat_map(|k| [k, electrons + k]).collect())
}

/// Moves `front` to the leading positions, keeping the rest in order.
fn front_permutation(l: usize, front: &[usize]) -> OrbitalPermutation {
    let mut perm = front.to_vec();
    perm.extend((1..=l).filter(|o| !front.contains(o)));
    OrbitalPermutation(perm)
}

fn subsystem_entropy(state: &CIState, orbitals: &[usize]) -> Result<f64> {
    let l = state.orbitals();
    if let Some(&bad) = orbitals.iter().find(|&&i| i == 0 || i > l) {
        return Err(Error::InvalidArgument(format!("orbital {bad} outside 1..={l}")));
    }
    if orbitals.len() >= l {
        return Err(Error::InvalidArgument(format!("subsystem {orbitals:?} leaves no complement")));
    }
    if state.norm() == 0.0 {
        return Err(Error::ZeroState);
    }
    let moved = apply_permutation(state, &front_permutation(l, orbitals))?.normalized()?;
    let sigmas = cut_singular_values(&ci_to_occupation(&moved)?, orbitals.len())?;
    Ok(entropy_bits(&sigmas, 1.0))
}

/// Entropy (bits) of orbital `i` against the rest.
pub fn site_entropy(state: &CIState, i: usize) -> Result<f64> {
    subsystem_entropy(state, &[i])
}

/// Entropy (bits) of the orbital pair `{i, j}` against the rest.
pub fn pair_entropy(state: &CIState, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidArgument(format!("pair entropy needs i != j, got {i}")));
    }
    subsystem_entropy(state, &[i, j])
}

/// Symmetric, zero-diagonal, nonnegative `I_ij = ½(S_i + S_j − S_ij)` in bits.
#[derive(Clone, Debug, PartialEq)]
pub struct MutualInfoMatrix(DMatrix<f64>);

impl MutualInfoMatrix {
    /// Symmetrises, zeroes the diagonal and clamps negatives.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        let n = m.nrows();
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                (0.5 * (m[(i, j)] + m[(j, i)])).max(0.0)
            }
        });
        Ok(MutualInfoMatrix(m))
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    /// `I_ij` for 1-based orbitals.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

pub fn mutual_information_matrix(state: &CIState) -> Result<MutualInfoMatrix> {
    let l = state.orbitals();
    if l < 3 {
        // pair entropies need a nonempty complement
        return Err(Error::InvalidArgument(format!("mutual information needs L >= 3, got {l}")));
    }
    let singles = par::map_range(l, |i| site_entropy(state, i + 1))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> =
        (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).collect();
    let joint = par::map(&pairs, |&(i, j)| pair_entropy(state, i + 1, j + 1))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut m = DMatrix::zeros(l, l);
    for (&(i, j), s_ij) in pairs.iter().zip(joint) {
        let v = (0.5 * (singles[i] + singles[j] - s_ij)).max(0.0);
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    Ok(MutualInfoMatrix(m))
}

/// Entries at or below this weight do not connect orbitals.
pub const EDGE_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are treated as degenerate.
pub const EIGEN_TOL: f64 = 1e-10;

/// Orders orbitals by the Fiedler vector of `D − I`.
///
/// Connected components (edges with weight above [`EDGE_TOL`]) are placed by
/// their smallest member and ordered internally by their own Fiedler vector.
/// Entries are compared on a `1e−9` grid with ties broken by orbital index;
/// of the two orientations the lexicographically smaller one is kept.
pub fn fiedler_order(mi: &MutualInfoMatrix) -> OrbitalPermutation {
    let l = mi.len();
    let mut order = Vec::with_capacity(l);
    for comp in components(mi) {
        if comp.len() <= 2 {
            order.extend(comp.iter().map(|i| i + 1));
            continue;
        }
        let vector = fiedler_vector(mi, &comp);
        let grid: Vec<i64> = vector.iter().map(|x| (x * 1e9).round() as i64).collect();
        let oriented = |sign: i64| {
            let mut idx: Vec<usize> = (0..comp.len()).collect();
            idx.sort_by_key(|&a| (sign * grid[a], comp[a]));
            idx.into_iter().map(|a| comp[a] + 1).collect::<Vec<_>>()
        };
        let (up, down) = (oriented(1), oriented(-1));
        order.extend(if up <= down { up } else { down });
    }
    OrbitalPermutation(order)
}

/// Components as ascending 0-based member lists, sorted by smallest member.
fn components(mi: &MutualInfoMatrix) -> Vec<Vec<usize>> {
    let l = mi.len();
    let mut label = vec![usize::MAX; l];
    let mut out = Vec::new();
    for start in 0..l {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        label[start] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in 0..l {
                if label[w] == usize::MAX && mi.0[(v, w)] > EDGE_TOL {
                    label[w] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn fiedler_vector(mi: &MutualInfoMatrix, comp: &[usize]) -> DVector<f64> {
    let n = comp.len();
    let w = DMatrix::from_fn(n, n, |a, b| mi.0[(comp[a], comp[b])]);
    let degree = DVector::from_fn(n, |a, _| w.row(a).sum());
    let lap = DMatrix::from_diagonal(&degree) - w;
    let eig = nalgebra::SymmetricEigen::new(lap);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let second = eig.eigenvalues[idx[1]];
    let degenerate: Vec<usize> = idx[1..]
        .iter()
        .copied()
        .filter(|&i| (eig.eigenvalues[i] - second).abs() <= EIGEN_TOL)
        .collect();
    if degenerate.len() == 1 {
        return eig.eigenvectors.column(idx[1]).into_owned();
    }
    // rotate within the degenerate space towards a fixed probe vector
    let mean = (n as f64 - 1.0) / 2.0;
    let probes = std::iter::once(DVector::from_fn(n, |a, _| a as f64 - mean))
        .chain((0..n).map(|a| DVector::from_fn(n, |b, _| if a == b { 1.0 } else { 0.0 })));
    for probe in probes {
        let mut v = DVector::zeros(n);
        for &i in &degenerate {
            let col = eig.eigenvectors.column(i);
            v += col * col.dot(&probe);
        }
        if v.norm() > 1e-8 {
            return v.normalize();
        }
    }
    eig.eigenvectors.column(idx[1]).into_owned()
}

/// Ordering objective. `MaxRank` minimises the largest bond dimension,
/// then `Σ log₂ r_k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    MaxRank,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxrank" => Ok(Objective::MaxRank),
            other => Err(Error::Parse(format!("unknown objective {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Score {
    pub max_bond: usize,
    pub log2_sum: f64,
    pub bond_dims: Vec<usize>,
}

impl Score {
    fn key(&self) -> (usize, i64) {
        (self.max_bond, (self.log2_sum * 1e9).round() as i64)
    }
}

/// Score of the state reordered by `perm`.
pub fn score_ordering(
    state: &CIState,
    perm: &OrbitalPermutation,
    objective: Objective,
) -> Result<Score> {
    let Objective::MaxRank = objective;
    let t = ci_to_occupation(&apply_permutation(state, perm)?)?;
    let bond_dims = rank_profile(&t, DEFAULT_RANK_TOL)?;
    Ok(Score {
        max_bond: bond_dims.iter().copied().max().unwrap_or(1),
        log2_sum: bond_dims.iter().map(|&r| (r.max(1) as f64).log2()).sum(),
        bond_dims,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub perm: OrbitalPermutation,
    pub score: Score,
    /// Orderings scored.
    pub evaluated: usize,
    /// Every scored ordering had the same score.
    pub invariant: bool,
    pub exhaustive: bool,
}

impl Serialize for OrbitalPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Largest `L` accepted by [`exhaustive_best_order`].
pub const EXHAUSTIVE_CAP: usize = 8;

/// Lexicographic successor; `false` after the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Scores every ordering up to reversal (`σ(1) < σ(L)`) and returns the
/// minimum, ties going to the lexicographically smallest permutation.
pub fn exhaustive_best_order(state: &CIState, objective: Objective) -> Result<SearchResult> {
    let l = state.orbitals();
    if l > EXHAUSTIVE_CAP {
        return Err(Error::SearchTooLarge { orbitals: l, cap: EXHAUSTIVE_CAP });
    }
    let mut candidates = Vec::new();
    let mut p: Vec<usize> = (1..=l).collect();
    loop {
        if l < 2 || p[0] < p[l - 1] {
            candidates.push(OrbitalPermutation(p.clone()));
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    let scores = par::map(&candidates, |perm| score_ordering(state, perm, objective))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let best = (0..scores.len())
        .min_by_key(|&i| (scores[i].key(), i))
        .expect("at least one ordering");
    let invariant = scores.iter().all(|s| s.key() == scores[0].key());
    Ok(SearchResult {
        perm: candidates[best].clone(),
        score: scores[best].clone(),
        evaluated: candidates.len(),
        invariant,
        exhaustive: true,
    })
}

/// Best-effort search for large `L`: start from the Fiedler order and apply
/// the best improving pairwise swap until none improves.
pub fn heuristic_best_order(state: &CIState, objective: Objective) -> Result<SearchResult> {
    let l = state.orbitals();
    let start = if l >= 3 {
        fiedler_order(&mutual_information_matrix(state)?)
    } else {
        OrbitalPermutation::identity(l)
    };
    let mut current = start;
    let mut score = score_ordering(state, &current, objective)?;
    let mut evaluated = 1;
    let mut invariant = true;
    let swaps: Vec<(usize, usize)> = (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).collect();
    loop {
        let trials: Vec<OrbitalPermutation> = swaps
            .iter()
            .map(|&(i, j)| {
                let mut p = current.0.clone();
                p.swap(i, j);
                OrbitalPermutation(p)
            })
            .collect();
        let scores = par::map(&trials, |p| score_ordering(state, p, objective))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        evaluated += trials.len();
        invariant &= scores.iter().all(|s| s.key() == score.key());
        let Some(best) = (0..trials.len())
            .filter(|&i| scores[i].key() < score.key())
            .min_by_key(|&i| (scores[i].key(), &trials[i].0))
        else {
            break;
        };
        current = trials[best].clone();
        score = scores[best].clone();
    }
    Ok(SearchResult { perm: current, score, evaluated, invariant, exhaustive: false })
}
