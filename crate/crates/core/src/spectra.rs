//! Singular-value spectra of unfoldings under orbital orderings.
//!
//! Spectra are assembled from the particle-number sector blocks, so values
//! the sector structure forbids are exact zeros rather than round-off.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fock::{ci_to_occupation, unfold, CIState, OccupationTensor};
use crate::format::sci17;
use crate::linalg;
use crate::ordering::{apply_permutation, OrbitalPermutation};

/// Default relative cutoff for numerical ranks.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

pub const CSV_HEADER: &str = "ordering,cut,index,sigma";

/// One curve: the descending spectrum of one cut under one ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRecord {
    pub ordering_label: String,
    pub cut: usize,
    /// Length `min(2^k, 2^{L−k})`, zero-padded.
    pub sigmas: Vec<f64>,
    pub norm: f64,
}

/// Descending singular values of `unfold(t, cut)`, padded with exact zeros
/// to `min(2^k, 2^{L−k})`.
pub fn cut_singular_values(t: &OccupationTensor, cut: usize) -> Result<Vec<f64>> {
    let u = unfold(t, cut)?;
    let full = u.matrix().nrows().min(u.matrix().ncols());
    let mut sigmas: Vec<f64> =
        u.sector_blocks().iter().flat_map(|b| linalg::singular_values(&b.entries)).collect();
    linalg::sort_descending(&mut sigmas);
    sigmas.resize(full, 0.0);
    Ok(sigmas)
}

/// Numerical ranks of every unfolding, `k = 1 … L−1`.
pub fn rank_profile(t: &OccupationTensor, rel_tol: f64) -> Result<Vec<usize>> {
    (1..t.orbitals())
        .map(|k| Ok(linalg::rank_of(&cut_singular_values(t, k)?, rel_tol)))
        .collect()
}

/// `−Σ p log₂ p` with `p = (σ/scale)²`; zero terms are skipped.
pub(crate) fn entropy_bits(sigmas: &[f64], scale: f64) -> f64 {
    sigmas
        .iter()
        .map(|s| (s / scale).powi(2))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

pub fn singular_spectrum(
    state: &CIState,
    sigma: &OrbitalPermutation,
    cut: usize,
    label: &str,
) -> Result<SpectrumRecord> {
    let norm = state.norm();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let reordered = apply_permutation(state, sigma)?;
    let sigmas = cut_singular_values(&ci_to_occupation(&reordered)?, cut)?;
    Ok(SpectrumRecord { ordering_label: label.to_string(), cut, sigmas, norm })
}

pub fn numerical_rank(rec: &SpectrumRecord, rel_tol: f64) -> usize {
    linalg::rank_of(&rec.sigmas, rel_tol)
}

/// Entanglement entropy (bits) of the normalised state across the cut.
pub fn entanglement_entropy(rec: &SpectrumRecord) -> Result<f64> {
    let norm = rec.sigmas.iter().map(|s| s * s).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(entropy_bits(&rec.sigmas, norm))
}

/// `ordering,cut,index,sigma`, one row per singular value, 1-based index,
/// values with 17 significant digits (`%.16e`).
pub fn write_csv<W: Write>(records: &[SpectrumRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for rec in records {
        for (i, s) in rec.sigmas.iter().enumerate() {
            writeln!(out, "{},{},{},{}", rec.ordering_label, rec.cut, i + 1, sci17(*s))?;
        }
    }
    out.flush()
}

pub fn export_csv(records: &[SpectrumRecord], destination: &Path) -> Result<()> {
    let file = File::create(destination).map_err(|e| Error::io(destination, e))?;
    write_csv(records, BufWriter::new(file)).map_err(|e| Error::io(destination, e))
}

/// Parses a spectrum CSV back into records (grouped by consecutive
/// `(ordering, cut)`; `norm` is recomputed from the values).
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SpectrumRecord>> {
    let mut lines = BufReader::new(input).lines();
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == CSV_HEADER => {}
        Some(Err(e)) => return Err(Error::Parse(e.to_string())),
        _ => return Err(Error::Parse(format!("missing header {CSV_HEADER:?}"))),
    }
    let mut records: Vec<SpectrumRecord> = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Parse(format!("line {}: {what}: {line:?}", n + 2));
        let fields: Vec<&str> = line.split(',').collect();
        let [label, cut, index, sigma] = fields[..] else {
            return Err(bad("expected 4 fields"));
        };
        let cut: usize = cut.parse().map_err(|_| bad("bad cut"))?;
        let index: usize = index.parse().map_err(|_| bad("bad index"))?;
        let sigma: f64 = sigma.parse().map_err(|_| bad("bad sigma"))?;
        let same = records.last().is_some_and(|r| r.ordering_label == label && r.cut == cut);
        if !same {
            records.push(SpectrumRecord {
                ordering_label: label.to_string(),
                cut,
                sigmas: Vec::new(),
                norm: 0.0,
            });
        }
        let rec = records.last_mut().expect("pushed above");
        if index != rec.sigmas.len() + 1 {
            return Err(bad("non-contiguous index"));
        }
        rec.sigmas.push(sigma);
    }
    for rec in &mut records {
        rec.norm = rec.sigmas.iter().map(|s| s * s).sum::<f64>().sqrt();
    }
    Ok(records)
}
