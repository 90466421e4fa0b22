use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fock::{max_sector_rank, unfold, OccupationTensor, SectorBlock};
use crate::par;
use crate::states::PrimePool;

use super::MultiQuad;

/// Largest square size handled by [`mq_det`].
pub const DET_CAP: usize = 10;

/// Dense row-major matrix over `Q(√p₁, …, √pₛ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MultiQuad>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<MultiQuad>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::SizeMismatch { expected: rows * cols, actual: entries.len() });
        }
        Ok(ExactMatrix { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> MultiQuad) -> Self {
        let entries = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        ExactMatrix { rows, cols, entries }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiQuad {
        &self.entries[r * self.cols + c]
    }

    /// Primes occurring anywhere in the matrix.
    pub fn prime_universe(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.entries.iter().flat_map(|e| e.primes()).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).to_f64())
    }
}

pub fn mq_det(m: &ExactMatrix) -> Result<MultiQuad> {
    if m.rows != m.cols {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    if m.rows > DET_CAP {
        return Err(Error::DeterminantCap { size: m.rows, cap: DET_CAP });
    }
    let idx: Vec<usize> = (0..m.rows).collect();
    Ok(minor_det(m, &idx, &idx))
}

/// Determinant of the submatrix on `rows × cols` by Laplace expansion along
/// the last row, memoised over column subsets and built up one row at a time.
fn minor_det(m: &ExactMatrix, rows: &[usize], cols: &[usize]) -> MultiQuad {
    let n = rows.len();
    debug_assert_eq!(n, cols.len());
    if n == 0 {
        return MultiQuad::one();
    }
    let full = 1usize << n;
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for mask in 1..full {
        by_level[mask.count_ones() as usize].push(mask);
    }
    let mut memo: Vec<Option<MultiQuad>> = vec![None; full];
    memo[0] = Some(MultiQuad::one());
    for level in 1..=n {
        let row = rows[level - 1];
        for &mask in &by_level[level] {
            let mut acc = MultiQuad::zero();
            let mut pos = 0;
            for (t, &col) in cols.iter().enumerate() {
                if mask >> t & 1 == 0 {
                    continue;
                }
                let sub = memo[mask ^ (1 << t)].as_ref().expect("previous level computed");
                let entry = m.get(row, col);
                acc.add_product(entry, sub, (level - 1 + pos) % 2 == 1);
                pos += 1;
            }
            memo[mask] = Some(acc);
        }
        // minors two levels down are no longer needed
        for &mask in &by_level[level - 1] {
            memo[mask] = None;
        }
    }
    memo[full - 1].take().expect("full minor computed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockStatus {
    Pass,
    Fail,
    /// Block larger than the exact cap; not attempted.
    Skipped,
}

#[derive(Clone, Debug)]
pub struct BlockCertificate {
    pub cut: usize,
    pub left_count: usize,
    pub shape: (usize, usize),
    pub status: BlockStatus,
    /// Rank proven by the witness minor (0 unless `Pass`).
    pub certified_rank: usize,
    /// Block-local row and column indices of the nonzero minor.
    pub witness_rows: Vec<usize>,
    pub witness_cols: Vec<usize>,
    pub determinant: Option<MultiQuad>,
    pub minors_tried: usize,
}

impl BlockCertificate {
    pub fn square_dim(&self) -> usize {
        self.shape.0.min(self.shape.1)
    }
}

/// Advances a sorted 0-based index set within `0..n`; `false` after the last.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Reads `x = ±√p` back into exact form.
fn lift_entry(x: f64, row: usize, col: usize, pool: &PrimePool) -> Result<(MultiQuad, u64)> {
    let unsupported = || Error::UnsupportedEntry { row, col, value: x };
    if x == 0.0 || !x.is_finite() {
        return Err(unsupported());
    }
    let square = (x * x).round();
    if square < 2.0 || square >= u64::MAX as f64 {
        return Err(unsupported());
    }
    let p = square as u64;
    let root = (p as f64).sqrt();
    if !pool.contains(p) || (x.abs() - root).abs() > 1e-9 * root {
        return Err(unsupported());
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    Ok((MultiQuad::scaled_sqrt_prime(sign, p), p))
}

/// Proves that a block of `±√p` entries (pairwise distinct primes) has rank
/// `min(rows, cols)` by exhibiting a nonzero maximal minor.
///
/// The leading square submatrix is tried first; the remaining maximal minors
/// are only enumerated if it vanishes.
pub fn certify_full_rank(block: &SectorBlock, pool: &PrimePool) -> Result<BlockCertificate> {
    let (nr, nc) = block.entries.shape();
    let dim = nr.min(nc);
    if dim > DET_CAP {
        return Err(Error::DeterminantCap { size: dim, cap: DET_CAP });
    }
    let mut seen = HashSet::with_capacity(nr * nc);
    let mut entries = Vec::with_capacity(nr * nc);
    for r in 0..nr {
        for c in 0..nc {
            let (q, p) = lift_entry(block.entries[(r, c)], r, c, pool)?;
            if !seen.insert(p) {
                return Err(Error::RepeatedEntry { prime: p });
            }
            entries.push(q);
        }
    }
    let exact = ExactMatrix::new(nr, nc, entries)?;

    let mut cert = BlockCertificate {
        cut: block.cut,
        left_count: block.left_count,
        shape: (nr, nc),
        status: BlockStatus::Fail,
        certified_rank: 0,
        witness_rows: Vec::new(),
        witness_cols: Vec::new(),
        determinant: None,
        minors_tried: 0,
    };
    let fixed: Vec<usize> = (0..dim).collect();
    let wide = nc >= nr;
    let larger = if wide { nc } else { nr };
    // lexicographic order, leading choice first; generated lazily because
    // C(larger, dim) is huge for long blocks
    let mut chosen = fixed.clone();
    loop {
        let (rows, cols) = if wide { (&fixed, &chosen) } else { (&chosen, &fixed) };
        cert.minors_tried += 1;
        let det = minor_det(&exact, rows, cols);
        if !det.is_zero() {
            cert.status = BlockStatus::Pass;
            cert.certified_rank = dim;
            cert.witness_rows = rows.clone();
            cert.witness_cols = cols.clone();
            cert.determinant = Some(det);
            break;
        }
        if !next_combination(&mut chosen, larger) {
            break;
        }
    }
    Ok(cert)
}

/// Certificates for every sector block at one cut.
#[derive(Clone, Debug)]
pub struct CutCertificate {
    pub cut: usize,
    pub blocks: Vec<BlockCertificate>,
    /// Sum of certified block ranks.
    pub certified_total: usize,
    pub max_sector_rank: usize,
}

impl CutCertificate {
    pub fn any_failed(&self) -> bool {
        self.blocks.iter().any(|b| b.status == BlockStatus::Fail)
    }

    pub fn fully_certified(&self) -> bool {
        self.blocks.iter().all(|b| b.status == BlockStatus::Pass)
    }
}

/// Certifies every block of `unfold(t, cut)` whose square dimension is at
/// most `cap` (clamped to [`DET_CAP`]); larger blocks are marked skipped.
pub fn certify_unfolding(
    t: &OccupationTensor,
    cut: usize,
    pool: &PrimePool,
    cap: usize,
) -> Result<CutCertificate> {
    let cap = cap.min(DET_CAP);
    let blocks = unfold(t, cut)?.sector_blocks();
    let certs = par::map(&blocks, |b| {
        if b.square_dim() > cap {
            Ok(BlockCertificate {
                cut,
                left_count: b.left_count,
                shape: b.entries.shape(),
                status: BlockStatus::Skipped,
                certified_rank: 0,
                witness_rows: Vec::new(),
                witness_cols: Vec::new(),
                determinant: None,
                minors_tried: 0,
            })
        } else {
            certify_full_rank(b, pool)
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(CutCertificate {
        cut,
        certified_total: certs.iter().map(|c| c.certified_rank).sum(),
        blocks: certs,
        max_sector_rank: max_sector_rank(t.orbitals(), t.electrons(), cut),
    })
}
