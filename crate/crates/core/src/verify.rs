//! End-to-end pipelines with PASS/FAIL reports: Bell-state collapse under
//! pairing and ordering-invariant maximal rank of √prime states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{certify_unfolding, BlockStatus};
use crate::fock::{ci_to_occupation, max_sector_rank};
use crate::mps::{bell_mps_explicit, tt_svd};
use crate::ordering::{apply_permutation, pairing_permutation, random_permutation, OrbitalPermutation};
use crate::par;
use crate::spectra::{rank_profile, DEFAULT_RANK_TOL};
use crate::states::{bell_state, prime_state, primes_below};

/// Largest `N` for [`verify_bell`].
pub const BELL_CAP: usize = 5;
/// Largest `L` for exhaustive [`verify_prime`].
pub const EXHAUSTIVE_PRIME_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            writeln!(f, "  {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Canonical bond dimension `2^N`, paired bond dimension 2, and agreement of
/// the explicit cores with the reordered Slater expansion.
pub fn verify_bell(electrons: usize) -> Result<Report> {
    if electrons == 0 || electrons > BELL_CAP {
        return Err(Error::InvalidArgument(format!(
            "verify bell supports 1 <= N <= {BELL_CAP}, got {electrons}"
        )));
    }
    let mut report = Report { title: format!("bell N={electrons}"), checks: Vec::new() };
    let bell = bell_state(electrons)?;

    let canonical = tt_svd(&ci_to_occupation(&bell)?, DEFAULT_RANK_TOL);
    let want = 1usize << electrons;
    report.check(
        "canonical-rank",
        canonical.max_bond_dim() == want,
        format!("max bond dim {} (expected {want}), bonds {:?}", canonical.max_bond_dim(), canonical.bond_dims()),
    );

    let paired_state = apply_permutation(&bell, &pairing_permutation(electrons))?;
    let paired_tensor = ci_to_occupation(&paired_state)?;
    let paired = tt_svd(&paired_tensor, DEFAULT_RANK_TOL);
    report.check(
        "paired-rank",
        paired.max_bond_dim() == 2,
        format!("max bond dim {} (expected 2), bonds {:?}", paired.max_bond_dim(), paired.bond_dims()),
    );

    let explicit = bell_mps_explicit(electrons)?.reconstruct()?;
    let err = explicit
        .as_slice()
        .iter()
        .zip(paired_tensor.as_slice())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    report.check(
        "explicit-cores",
        err <= 1e-12,
        format!("max |explicit − reordered| = {err:.3e}"),
    );
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeMode {
    /// All `L!` orderings.
    Exhaustive,
    /// `count` seeded random orderings.
    Sampled { count: usize, seed: u64 },
}

/// Outcome for one ordering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingOutcome {
    pub perm: OrbitalPermutation,
    pub ranks: Vec<usize>,
    pub maximal: bool,
    pub blocks_certified: usize,
    pub blocks_failed: usize,
    pub blocks_skipped: usize,
}

/// Checks that every ordering keeps every cut at `max_sector_rank`, and
/// certifies blocks with square dimension at most `exact_cap` exactly.
pub fn verify_prime(
    orbitals: usize,
    electrons: usize,
    mode: PrimeMode,
    state_seed: Option<u64>,
    exact_cap: usize,
) -> Result<(Report, Vec<OrderingOutcome>)> {
    let orderings = match mode {
        PrimeMode::Exhaustive => {
            if orbitals > EXHAUSTIVE_PRIME_CAP {
                return Err(Error::InvalidArgument(format!(
                    "exhaustive mode supports L <= {EXHAUSTIVE_PRIME_CAP}, got {orbitals}"
                )));
            }
            all_permutations(orbitals)
        }
        PrimeMode::Sampled { count, seed } => (0..count as u64)
            .map(|i| random_permutation(orbitals, seed.wrapping_add(i)))
            .collect(),
    };
    let state = prime_state(orbitals, electrons, state_seed, false)?;
    let pool = primes_below(1u64 << (orbitals + electrons));
    let want: Vec<usize> = (1..orbitals).map(|k| max_sector_rank(orbitals, electrons, k)).collect();

    let outcomes = par::map(&orderings, |perm| -> Result<OrderingOutcome> {
        let t = ci_to_occupation(&apply_permutation(&state, perm)?)?;
        let ranks = rank_profile(&t, DEFAULT_RANK_TOL)?;
        let mut outcome = OrderingOutcome {
            perm: perm.clone(),
            maximal: ranks == want,
            ranks,
            blocks_certified: 0,
            blocks_failed: 0,
            blocks_skipped: 0,
        };
        if exact_cap > 0 {
            for k in 1..orbitals {
                for b in certify_unfolding(&t, k, &pool, exact_cap)?.blocks {
                    match b.status {
                        BlockStatus::Pass => outcome.blocks_certified += 1,
                        BlockStatus::Fail => outcome.blocks_failed += 1,
                        BlockStatus::Skipped => outcome.blocks_skipped += 1,
                    }
                }
            }
        }
        Ok(outcome)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mode_label = match mode {
        PrimeMode::Exhaustive => "exhaustive".to_string(),
        PrimeMode::Sampled { count, seed } => format!("sampled {count}, seed {seed}"),
    };
    let mut report = Report {
        title: format!("prime L={orbitals} N={electrons} ({mode_label})"),
        checks: Vec::new(),
    };
    let maximal = outcomes.iter().filter(|o| o.maximal).count();
    let first_drop = outcomes.iter().find(|o| !o.maximal);
    report.check(
        "maximal-rank",
        maximal == outcomes.len(),
        match first_drop {
            None => format!("{maximal}/{} orderings at ranks {want:?}", outcomes.len()),
            Some(o) => format!(
                "{maximal}/{} orderings maximal; {} has ranks {:?}, expected {want:?}",
                outcomes.len(),
                o.perm,
                o.ranks
            ),
        },
    );
    if exact_cap > 0 {
        let certified: usize = outcomes.iter().map(|o| o.blocks_certified).sum();
        let failed: usize = outcomes.iter().map(|o| o.blocks_failed).sum();
        let skipped: usize = outcomes.iter().map(|o| o.blocks_skipped).sum();
        report.check(
            "exact-certificates",
            failed == 0,
            format!("{certified} blocks certified, {failed} failed, {skipped} above size {exact_cap} skipped"),
        );
    }
    Ok((report, outcomes))
}

fn all_permutations(l: usize) -> Vec<OrbitalPermutation> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<OrbitalPermutation>) {
        if prefix.len() == used.len() {
            out.push(OrbitalPermutation::new(prefix.clone()).expect("bijection by construction"));
            return;
        }
        for o in 0..used.len() {
            if !used[o] {
                used[o] = true;
                prefix.push(o + 1);
                extend(prefix, used, out);
                prefix.pop();
                used[o] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(l), &mut vec![false; l], &mut out);
    out
}
