mod args;
mod manifest;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;
use serde_json::json;

use args::*;
use mpslab::exact::{certify_unfolding, BlockStatus, CutCertificate};
use mpslab::fock::{read_state, state_to_json, StateMeta};
use mpslab::mps::tt_svd_detailed;
use mpslab::ordering::{
    exhaustive_best_order, fiedler_order, heuristic_best_order, mutual_information_matrix,
    permutation_to_json, random_permutation, read_permutation, Objective, EXHAUSTIVE_CAP,
};
use mpslab::spectra::{rank_profile, singular_spectrum, write_csv};
use mpslab::verify::{verify_bell, verify_prime, PrimeMode, Report};
use mpslab::*;

const REPORT_SCHEMA_VERSION: u32 = 1;

/// Verification outcome of a successful run.
enum Verdict {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(&cli.command) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("MPSLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().with_context(|| format!("MPSLAB_THREADS={raw:?}"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(command: &Command) -> anyhow::Result<Verdict> {
    match command {
        Command::Gen(a) => gen(command, a),
        Command::Tt(a) => tt(command, a),
        Command::Reorder(a) => reorder(command, a),
        Command::Spectrum(a) => spectrum(command, a),
        Command::Certify(a) => certify(command, a),
        Command::SearchOrder(a) => search(command, a),
        Command::Verify(VerifyCommand::Bell(a)) => {
            let report = verify_bell(a.electrons as usize)?;
            finish_report(command, None, &report, a.out.as_deref(), json!(null))
        }
        Command::Verify(VerifyCommand::Prime(a)) => {
            let mode = match a.mode {
                Mode::Exhaustive => PrimeMode::Exhaustive,
                Mode::Sampled => PrimeMode::Sampled { count: a.samples, seed: a.seed },
            };
            let (report, outcomes) =
                verify_prime(a.orbitals, a.electrons, mode, a.state_seed, a.exact_cap as usize)?;
            let seed = matches!(a.mode, Mode::Sampled).then_some(a.seed);
            finish_report(command, seed, &report, a.out.as_deref(), serde_json::to_value(&outcomes)?)
        }
    }
}

/// Writes `text` to `out` plus its manifest, or to stdout.
fn emit(command: &Command, seed: Option<u64>, out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            manifest::write_manifest(command, seed, path)
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn load(path: &Path) -> anyhow::Result<CIState> {
    Ok(read_state(path).with_context(|| format!("reading state {}", path.display()))?.0)
}

fn gen(command: &Command, a: &GenArgs) -> anyhow::Result<Verdict> {
    let n = a.electrons;
    let (state, seed) = match a.kind {
        Kind::Bell => {
            if let Some(l) = a.orbitals {
                if l != 2 * n {
                    bail!("a Bell state with N = {n} has L = {}, got --L {l}", 2 * n);
                }
            }
            (bell_state(n)?, None)
        }
        Kind::Prime => {
            let l = a.orbitals.context("--L is required for prime states")?;
            (prime_state(l, n, a.seed, false)?, a.seed)
        }
        Kind::Random => {
            let l = a.orbitals.context("--L is required for random states")?;
            let seed = a.seed.unwrap_or(0);
            (random_state(l, n, seed)?, Some(seed))
        }
    };
    let state = if a.normalize { state.normalized()? } else { state };
    let kind = match a.kind {
        Kind::Prime => "prime",
        Kind::Bell => "bell",
        Kind::Random => "random",
    };
    let meta = StateMeta {
        kind: kind.to_string(),
        seed,
        prng: seed.map(|_| mpslab::states::PRNG_ID.to_string()),
        normalized: a.normalize || matches!(a.kind, Kind::Bell | Kind::Random),
    };
    emit(command, seed, a.out.as_deref(), &state_to_json(&state, Some(&meta)))?;
    Ok(Verdict::Ok)
}

fn tt(command: &Command, a: &TtArgs) -> anyhow::Result<Verdict> {
    let state = load(&a.state)?;
    let t = ci_to_occupation(&state)?;
    let detail = tt_svd_detailed(&t, a.tol);
    let back = detail.mps.reconstruct()?;
    let diff: f64 = t.as_slice().iter().zip(back.as_slice()).map(|(x, y)| (x - y).powi(2)).sum();
    let error = if t.norm() > 0.0 { diff.sqrt() / t.norm() } else { diff.sqrt() };
    let bond_dims = detail.mps.bond_dims();
    let cuts: Vec<_> = detail
        .cut_spectra
        .iter()
        .zip(&bond_dims)
        .enumerate()
        .map(|(i, (sigmas, kept))| {
            json!({
                "cut": i + 1,
                "singular_values": sigmas.len(),
                "nonzero": sigmas.iter().filter(|&&s| s > 0.0).count(),
                "kept": kept,
                "max_sector_rank": max_sector_rank(state.orbitals(), state.electrons(), i + 1),
            })
        })
        .collect();
    let report = json!({
        "L": state.orbitals(),
        "N": state.electrons(),
        "tol": a.tol,
        "bond_dims": bond_dims,
        "max_bond_dim": detail.mps.max_bond_dim(),
        "cuts": cuts,
        "reconstruction_error": error,
        "schema_version": REPORT_SCHEMA_VERSION,
    });
    match &a.report {
        Some(path) => {
            emit(command, None, Some(path), &to_json(&report)?)?;
            println!("bond dims {bond_dims:?}, relative reconstruction error {error:.3e}");
        }
        None => emit(command, None, None, &to_json(&report)?)?,
    }
    Ok(Verdict::Ok)
}

fn reorder(command: &Command, a: &ReorderArgs) -> anyhow::Result<Verdict> {
    let (state, meta) = read_state(&a.state).with_context(|| format!("reading state {}", a.state.display()))?;
    let perm = read_permutation(&a.perm).with_context(|| format!("reading permutation {}", a.perm.display()))?;
    let out = apply_permutation(&state, &perm)?;
    emit(command, None, a.out.as_deref(), &state_to_json(&out, meta.as_ref()))?;
    Ok(Verdict::Ok)
}

fn resolve_order(state: &CIState, order: &str) -> anyhow::Result<OrbitalPermutation> {
    let l = state.orbitals();
    Ok(match order {
        "canonical" => OrbitalPermutation::identity(l),
        "fiedler" => fiedler_order(&mutual_information_matrix(state)?),
        "pairing" => {
            if l != 2 * state.electrons() {
                bail!("pairing order needs L = 2N, got L = {l}, N = {}", state.electrons());
            }
            pairing_permutation(state.electrons())
        }
        _ => {
            if let Some(path) = order.strip_prefix("perm:") {
                let perm = read_permutation(Path::new(path))?;
                if perm.len() != l {
                    bail!("permutation {path} has length {}, state has L = {l}", perm.len());
                }
                perm
            } else if let Some(seed) = order.strip_prefix("random:") {
                random_permutation(l, seed.parse().with_context(|| format!("bad seed in {order:?}"))?)
            } else {
                bail!("unknown ordering {order:?}; expected canonical, fiedler, pairing, perm:<file> or random:<seed>")
            }
        }
    })
}

fn spectrum(command: &Command, a: &SpectrumArgs) -> anyhow::Result<Verdict> {
    let state = load(&a.state)?;
    let mut records = Vec::with_capacity(a.orders.len());
    for order in &a.orders {
        let perm = resolve_order(&state, order)?;
        records.push(singular_spectrum(&state, &perm, a.cut, order)?);
    }
    let mut buf = Vec::new();
    write_csv(&records, &mut buf)?;
    let seed = a.orders.iter().find_map(|s| s.strip_prefix("random:")?.parse().ok());
    emit(command, seed, a.out.as_deref(), std::str::from_utf8(&buf)?)?;
    Ok(Verdict::Ok)
}

fn cut_json(cert: &CutCertificate, numerical: usize) -> serde_json::Value {
    let blocks: Vec<_> = cert
        .blocks
        .iter()
        .map(|b| {
            json!({
                "left_count": b.left_count,
                "shape": [b.shape.0, b.shape.1],
                "status": match b.status {
                    BlockStatus::Pass => "PASS",
                    BlockStatus::Fail => "FAIL",
                    BlockStatus::Skipped => "SKIPPED",
                },
                "certified_rank": b.certified_rank,
                "witness_rows": b.witness_rows,
                "witness_cols": b.witness_cols,
                "determinant": b.determinant.as_ref().map(|d| d.to_string()),
                "determinant_value": b.determinant.as_ref().map(|d| d.to_f64()),
                "minors_tried": b.minors_tried,
            })
        })
        .collect();
    json!({
        "cut": cert.cut,
        "certified_total": cert.certified_total,
        "max_sector_rank": cert.max_sector_rank,
        "numerical_rank": numerical,
        "fully_certified": cert.fully_certified(),
        "blocks": blocks,
    })
}

fn certify(command: &Command, a: &CertifyArgs) -> anyhow::Result<Verdict> {
    let state = load(&a.state)?;
    let (l, n) = (state.orbitals(), state.electrons());
    let cuts: Vec<usize> = if a.all_cuts { (1..l).collect() } else { vec![a.cut.expect("clap requires --cut")] };
    let bound = match a.prime_bound {
        Some(b) => b,
        None => 1u64.checked_shl((l + n) as u32).context("default prime bound overflows; pass --prime-bound")?,
    };
    let pool = primes_below(bound);
    let t = ci_to_occupation(&state)?;
    let ranks = rank_profile(&t, DEFAULT_RANK_TOL)?;
    let mut failed = false;
    let mut out = Vec::new();
    for k in cuts {
        let cert = certify_unfolding(&t, k, &pool, a.exact_cap as usize)?;
        failed |= cert.any_failed();
        eprintln!(
            "cut {k}: certified {} of max {}, numerical rank {}{}",
            cert.certified_total,
            cert.max_sector_rank,
            ranks[k - 1],
            if cert.any_failed() { ", FAIL" } else { "" }
        );
        out.push(cut_json(&cert, ranks[k - 1]));
    }
    let report = json!({
        "L": l,
        "N": n,
        "prime_bound": bound,
        "exact_cap": a.exact_cap,
        "cuts": out,
        "passed": !failed,
        "schema_version": REPORT_SCHEMA_VERSION,
    });
    emit(command, None, a.out.as_deref(), &to_json(&report)?)?;
    Ok(if failed { Verdict::Failed } else { Verdict::Ok })
}

fn search(command: &Command, a: &SearchArgs) -> anyhow::Result<Verdict> {
    let state = load(&a.state)?;
    let objective: Objective = a.objective.parse()?;
    let exhaustive = match a.method {
        Method::Auto => state.orbitals() <= EXHAUSTIVE_CAP,
        Method::Exhaustive => true,
        Method::Heuristic => false,
    };
    let result = if exhaustive {
        exhaustive_best_order(&state, objective)?
    } else {
        heuristic_best_order(&state, objective)?
    };
    eprintln!(
        "{} search over {} orderings: {} with bond dims {:?}{}",
        if result.exhaustive { "exhaustive" } else { "heuristic" },
        result.evaluated,
        result.perm,
        result.score.bond_dims,
        if result.invariant { " (every ordering scored the same)" } else { "" }
    );
    match &a.out {
        Some(path) => emit(command, None, Some(path), &permutation_to_json(&result.perm))?,
        None => emit(command, None, None, &to_json(&result)?)?,
    }
    Ok(Verdict::Ok)
}

fn finish_report(
    command: &Command,
    seed: Option<u64>,
    report: &Report,
    out: Option<&Path>,
    details: serde_json::Value,
) -> anyhow::Result<Verdict> {
    print!("{report}");
    if let Some(path) = out {
        let body = json!({
            "title": report.title,
            "passed": report.passed(),
            "checks": report.checks,
            "orderings": details,
            "schema_version": REPORT_SCHEMA_VERSION,
        });
        emit(command, seed, Some(path), &to_json(&body)?)?;
    }
    Ok(if report.passed() { Verdict::Ok } else { Verdict::Failed })
}
