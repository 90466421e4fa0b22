//! Matrix product states `ψ_{μ₁…μ_L} = A₁[μ₁] ⋯ A_L[μ_L]`.
//!
//! [`tt_svd`] sweeps left to right: at each cut the remainder is reshaped to
//! `(r_{k−1}·2) × 2^{L−k}`, decomposed, and singular values at or below
//! `rel_tol · σ₁` of that cut are discarded. No canonical form is kept
//! beyond what the sweep produces.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{OccupationBitstring, OccupationTensor};
use crate::linalg;
use crate::DENSE_CAP;

/// Site tensor: `A_k[0]` and `A_k[1]`, each `r_{k−1} × r_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsCore {
    pub site: usize,
    pub mats: [DMatrix<f64>; 2],
}

impl MpsCore {
    pub fn left_dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn right_dim(&self) -> usize {
        self.mats[0].ncols()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    cores: Vec<MpsCore>,
    electrons: usize,
}

impl Mps {
    /// Checks that boundary dimensions are 1 and shapes chain.
    pub fn new(cores: Vec<MpsCore>, electrons: usize) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::InvalidArgument("an MPS needs at least one core".into()));
        }
        let mut left = 1;
        for (k, core) in cores.iter().enumerate() {
            let (r, c) = core.mats[0].shape();
            if core.mats[1].shape() != (r, c) || r != left {
                return Err(Error::InvalidArgument(format!(
                    "core {} has shape {r}x{c} / {:?}, expected {left} rows",
                    k + 1,
                    core.mats[1].shape()
                )));
            }
            left = c;
        }
        if left != 1 {
            return Err(Error::InvalidArgument("last core must have one column".into()));
        }
        Ok(Mps { cores, electrons })
    }

    pub fn cores(&self) -> &[MpsCore] {
        &self.cores
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn electrons(&self) -> usize {
        self.electrons
    }

    /// `r₁ … r_{L−1}`.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.cores[..self.cores.len() - 1].iter().map(MpsCore::right_dim).collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// `A₁[μ₁] ⋯ A_L[μ_L]`.
    pub fn contract(&self, bits: &OccupationBitstring) -> Result<f64> {
        if bits.len() != self.cores.len() {
            return Err(Error::SizeMismatch { expected: self.cores.len(), actual: bits.len() });
        }
        let mut row = DMatrix::from_element(1, 1, 1.0);
        for (k, core) in self.cores.iter().enumerate() {
            row *= &core.mats[bits.occupied(k + 1) as usize];
        }
        Ok(row[(0, 0)])
    }

    /// Evaluates every coefficient.
    pub fn reconstruct(&self) -> Result<OccupationTensor> {
        let l = self.cores.len();
        if l > DENSE_CAP {
            return Err(Error::Capacity { orbitals: l, cap: DENSE_CAP });
        }
        // grow the left environment one site at a time: rows are prefixes
        let mut env: Vec<DVector<f64>> = vec![DVector::from_element(1, 1.0)];
        for core in &self.cores {
            let mut next = Vec::with_capacity(env.len() * 2);
            for v in &env {
                for mat in &core.mats {
                    next.push(mat.tr_mul(v));
                }
            }
            env = next;
        }
        let psi = env.into_iter().map(|v| v[0]).collect();
        OccupationTensor::from_vec(l, self.electrons, psi)
    }
}

/// Result of a sweep together with the full spectrum seen at every cut.
#[derive(Clone, Debug)]
pub struct TtDecomposition {
    pub mps: Mps,
    /// Singular values of cut `k` (index `k − 1`), before truncation.
    pub cut_spectra: Vec<Vec<f64>>,
}

pub fn tt_svd(t: &OccupationTensor, rel_tol: f64) -> Mps {
    tt_svd_detailed(t, rel_tol).mps
}

pub fn tt_svd_detailed(t: &OccupationTensor, rel_tol: f64) -> TtDecomposition {
    let l = t.orbitals();
    let mut cores = Vec::with_capacity(l);
    let mut cut_spectra = Vec::with_capacity(l.saturating_sub(1));
    // remainder, row-major (r_{k-1}, 2^{L-k+1})
    let mut rest = t.as_slice().to_vec();
    let mut left = 1usize;
    for site in 1..l {
        let cols = 1usize << (l - site);
        let m = DMatrix::from_row_slice(left * 2, cols, &rest);
        let (u, s, v_t) = linalg::svd(m);
        let zero = s.first().is_none_or(|&top| top == 0.0);
        let keep = linalg::rank_of(&s, rel_tol).max(1);
        let mats = std::array::from_fn(|mu| {
            DMatrix::from_fn(left, keep, |a, b| if zero { 0.0 } else { u[(a * 2 + mu, b)] })
        });
        cores.push(MpsCore { site, mats });
        rest = Vec::with_capacity(keep * cols);
        for b in 0..keep {
            for c in 0..cols {
                rest.push(if zero { 0.0 } else { s[b] * v_t[(b, c)] });
            }
        }
        cut_spectra.push(s);
        left = keep;
    }
    let mats = std::array::from_fn(|mu| DMatrix::from_fn(left, 1, |a, _| rest[a * 2 + mu]));
    cores.push(MpsCore { site: l, mats });
    TtDecomposition { mps: Mps { cores, electrons: t.electrons() }, cut_spectra }
}

/// Bond-dimension-2 cores of the Bell state in paired orbital order
/// `(φ₁, φ_{N+1}, φ₂, φ_{N+2}, …)`.
///
/// The state index carried along the bond records whether the first orbital
/// of the current pair is empty (0) or occupied (1); the second orbital of
/// the pair must take the opposite value. `A₁` carries the factor `2^{−N/2}`.
pub fn bell_mps_explicit(electrons: usize) -> Result<Mps> {
    if electrons == 0 {
        return Err(Error::InvalidSize { orbitals: 0, electrons });
    }
    let l = 2 * electrons;
    let delta = |a: usize, mu: usize| if a == mu { 1.0 } else { 0.0 };
    let scale = 2f64.powf(-(electrons as f64) / 2.0);
    let cores = (1..=l)
        .map(|site| {
            let mats = std::array::from_fn(|mu| {
                if site == 1 {
                    DMatrix::from_row_slice(1, 2, &[scale * delta(0, mu), scale * delta(1, mu)])
                } else if site == l {
                    DMatrix::from_column_slice(2, 1, &[delta(1, mu), delta(0, mu)])
                } else if site % 2 == 0 {
                    DMatrix::from_row_slice(2, 2, &[delta(1, mu), 0.0, 0.0, delta(0, mu)])
                } else {
                    DMatrix::from_row_slice(
                        2,
                        2,
                        &[delta(0, mu), delta(1, mu), delta(0, mu), delta(1, mu)],
                    )
                }
            });
            MpsCore { site, mats }
        })
        .collect();
    Mps::new(cores, electrons)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::fock::{ci_to_occupation, CIState};

    fn bits(s: &str) -> OccupationBitstring {
        s.parse().unwrap()
    }

    #[test]
    fn two_site_bell() {
        let s = CIState::from_terms(2, 1, [(vec![1], FRAC_1_SQRT_2), (vec![2], FRAC_1_SQRT_2)])
            .unwrap();
        let mps = tt_svd(&ci_to_occupation(&s).unwrap(), 1e-10);
        assert_eq!(mps.bond_dims(), vec![2]);
        assert!((mps.contract(&bits("10")).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(mps.contract(&bits("11")).unwrap().abs() < 1e-15);
    }

    #[test]
    fn all_ones_cores() {
        let one = DMatrix::from_element(1, 1, 1.0);
        let cores = (1..=3)
            .map(|site| MpsCore { site, mats: [one.clone(), one.clone()] })
            .collect();
        let mps = Mps::new(cores, 0).unwrap();
        assert!(mps.reconstruct().unwrap().as_slice().iter().all(|&x| x == 1.0));
        assert_eq!(mps.bond_dims(), vec![1, 1]);
    }

    #[test]
    fn zero_tensor_has_unit_bonds() {
        let t = OccupationTensor::zeros(5, 2).unwrap();
        let mps = tt_svd(&t, 1e-10);
        assert_eq!(mps.bond_dims(), vec![1; 4]);
        assert!(mps.cores().iter().all(|c| c.mats.iter().all(|m| m.iter().all(|&x| x == 0.0))));
        assert_eq!(mps.reconstruct().unwrap(), t);
    }

    #[test]
    fn contract_length_checked() {
        let mps = bell_mps_explicit(2).unwrap();
        assert!(matches!(mps.contract(&bits("101")), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn explicit_bell_values() {
        let one = bell_mps_explicit(1).unwrap();
        let psi = one.reconstruct().unwrap();
        assert_eq!(psi.as_slice(), &[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);

        let two = bell_mps_explicit(2).unwrap();
        assert!((two.contract(&bits("1010")).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(two.contract(&bits("1100")).unwrap(), 0.0);
        for n in 1..=6 {
            assert!(bell_mps_explicit(n).unwrap().bond_dims().iter().all(|&r| r == 2));
        }
    }

    #[test]
    fn malformed_chain_rejected() {
        let a = DMatrix::zeros(1, 2);
        let b = DMatrix::zeros(3, 1);
        let cores = vec![
            MpsCore { site: 1, mats: [a.clone(), a] },
            MpsCore { site: 2, mats: [b.clone(), b] },
        ];
        assert!(Mps::new(cores, 1).is_err());
    }
}
