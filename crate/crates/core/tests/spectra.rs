mod common;

use common::*;
use mpslab::exact::certify_unfolding;
use mpslab::ordering::*;
use mpslab::spectra::*;
use mpslab::*;
use proptest::prelude::*;

#[test]
fn prime_twelve_six_middle_cut() {
    let state = prime_state(12, 6, Some(1), false).unwrap();
    let rec = singular_spectrum(&state, &OrbitalPermutation::identity(12), 6, "canonical").unwrap();
    assert_eq!(rec.sigmas.len(), 64);
    assert_eq!(numerical_rank(&rec, DEFAULT_RANK_TOL), 64);
    assert!(rec.sigmas.iter().all(|&s| s > 0.0));
    assert!(rec.sigmas.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn squared_sigmas_sum_to_squared_norm() {
    let states = [
        bell_state(4).unwrap(),
        prime_state(10, 5, Some(2), false).unwrap(),
        random_state(9, 4, 8).unwrap(),
    ];
    for s in &states {
        let perm = random_permutation(s.orbitals(), 3);
        for k in 1..s.orbitals() {
            let rec = singular_spectrum(s, &perm, k, "random").unwrap();
            let sum: f64 = rec.sigmas.iter().map(|x| x * x).sum();
            assert!((sum - s.norm().powi(2)).abs() <= 1e-12 * s.norm().powi(2));
            assert_eq!(rec.sigmas.len(), 1 << k.min(s.orbitals() - k));
        }
    }
}

#[test]
fn spectra_match_dense_oracle() {
    let s = prime_state(8, 4, Some(4), false).unwrap();
    let perm = random_permutation(8, 12);
    let reordered = apply_permutation(&s, &perm).unwrap();
    for k in 1..8 {
        let rec = singular_spectrum(&s, &perm, k, "x").unwrap();
        let dense = dense_sigmas(&oracle_unfolding(&reordered, k));
        for (a, b) in rec.sigmas.iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-12 * dense[0]);
        }
    }
}

#[test]
fn within_side_reordering_keeps_spectrum() {
    // permuting orbitals inside each half of a cut only permutes rows and
    // columns of the unfolding, possibly with signs
    let s = prime_state(4, 2, Some(3), false).unwrap();
    let base = singular_spectrum(&s, &OrbitalPermutation::identity(4), 2, "canonical").unwrap();
    for p in [[2, 1, 3, 4], [1, 2, 4, 3], [2, 1, 4, 3]] {
        let rec = singular_spectrum(&s, &OrbitalPermutation::new(p.to_vec()).unwrap(), 2, "p").unwrap();
        for (a, b) in rec.sigmas.iter().zip(&base.sigmas) {
            assert!((a - b).abs() <= 1e-10 * base.sigmas[0]);
        }
    }
}

#[test]
fn numerical_rank_agrees_with_certificate() {
    for seed in 0..10 {
        for (l, n) in [(6, 3), (7, 3), (8, 4), (8, 2)] {
            let s = prime_state(l, n, Some(seed), false).unwrap();
            let pool = primes_below(1 << (l + n));
            let t = ci_to_occupation(&s).unwrap();
            for k in 1..l {
                let cert = certify_unfolding(&t, k, &pool, 8).unwrap();
                assert!(!cert.any_failed());
                let rec = singular_spectrum(&s, &OrbitalPermutation::identity(l), k, "c").unwrap();
                if cert.fully_certified() {
                    assert_eq!(cert.certified_total, numerical_rank(&rec, DEFAULT_RANK_TOL));
                }
                assert_eq!(numerical_rank(&rec, DEFAULT_RANK_TOL), max_sector_rank(l, n, k));
            }
        }
    }
}

#[test]
fn zero_state_is_rejected() {
    let s = CIState::empty(4, 2).unwrap();
    assert!(matches!(
        singular_spectrum(&s, &OrbitalPermutation::identity(4), 2, "z"),
        Err(Error::ZeroState)
    ));
}

#[test]
fn entropy_of_bell_cuts() {
    let bell = bell_state(3).unwrap();
    for k in 1..6 {
        let rec = singular_spectrum(&bell, &OrbitalPermutation::identity(6), k, "c").unwrap();
        let s = entanglement_entropy(&rec).unwrap();
        assert!((s - k.min(6 - k) as f64).abs() < 1e-12);
    }
}

#[test]
fn csv_round_trip_through_file() {
    let s = prime_state(6, 3, Some(2), false).unwrap();
    let records: Vec<SpectrumRecord> = [OrbitalPermutation::identity(6), random_permutation(6, 1)]
        .iter()
        .zip(["canonical", "random:1"])
        .map(|(p, label)| singular_spectrum(&s, p, 3, label).unwrap())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectra.csv");
    export_csv(&records, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert_eq!(text.lines().count(), 1 + 16);
    let back = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back.len(), 2);
    for (a, b) in back.iter().zip(&records) {
        assert_eq!(a.ordering_label, b.ordering_label);
        assert_eq!(a.cut, b.cut);
        assert_eq!(a.sigmas, b.sigmas);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_is_bounded(l in 2usize..=9, frac in 0.0f64..1.0, seed in any::<u64>(), cut in 1usize..9) {
        let n = 1 + ((l - 1) as f64 * frac) as usize;
        let k = 1 + cut % (l - 1);
        let s = random_state(l, n, seed).unwrap();
        let rec = singular_spectrum(&s, &random_permutation(l, seed ^ 5), k, "r").unwrap();
        let h = entanglement_entropy(&rec).unwrap();
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= k.min(l - k) as f64 + 1e-12);
        prop_assert!((h - entropy_of(&rec.sigmas.iter().map(|x| x / s.norm()).collect::<Vec<_>>())).abs() < 1e-12);
    }
}
