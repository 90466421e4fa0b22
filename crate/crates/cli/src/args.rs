use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "mpslab", version, about = "Tensor-train tools for fixed-particle-number fermionic states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a state file.
    Gen(GenArgs),
    /// TT-SVD a state and report bond dimensions.
    Tt(TtArgs),
    /// Apply an orbital permutation with fermionic signs.
    Reorder(ReorderArgs),
    /// Singular values of one cut under one or more orderings, as CSV.
    Spectrum(SpectrumArgs),
    /// Exact full-rank certificates for the sector blocks of a cut.
    Certify(CertifyArgs),
    /// Search for an ordering that minimizes bond dimensions.
    SearchOrder(SearchArgs),
    /// End-to-end checks with PASS/FAIL output.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Prime,
    Bell,
    Random,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Orbitals; defaults to 2N for bell.
    #[arg(long = "L")]
    pub orbitals: Option<usize>,
    /// Electrons.
    #[arg(long = "N")]
    pub electrons: usize,
    /// Prime draw or random-state seed. Unseeded prime states take the first C(L,N) primes.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub normalize: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct TtArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Relative singular value cutoff.
    #[arg(long, default_value_t = mpslab::DEFAULT_RANK_TOL)]
    pub tol: f64,
    /// JSON report file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ReorderArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Permutation JSON, `{"perm":[...]}` with new position -> old orbital.
    #[arg(long)]
    pub perm: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub cut: usize,
    /// canonical | fiedler | pairing | perm:<file> | random:<seed>; repeatable.
    #[arg(long = "order", default_value = "canonical")]
    pub orders: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, required_unless_present = "all_cuts")]
    pub cut: Option<usize>,
    #[arg(long, conflicts_with = "cut")]
    pub all_cuts: bool,
    /// Largest block square dimension attempted exactly.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..=mpslab::exact::DET_CAP as u64))]
    pub exact_cap: u64,
    /// Upper bound of the admissible prime pool; defaults to 2^(L+N).
    #[arg(long)]
    pub prime_bound: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Exhaustive up to the size cap, heuristic beyond.
    Auto,
    Exhaustive,
    Heuristic,
}

#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value = "maxrank")]
    pub objective: String,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Permutation JSON output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCommand {
    /// Bell bond-dimension collapse and explicit cores.
    Bell(VerifyBellArgs),
    /// Ordering-invariant maximal rank of a prime state.
    Prime(VerifyPrimeArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyBellArgs {
    #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..=mpslab::verify::BELL_CAP as u64))]
    pub electrons: u64,
    /// JSON report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyPrimeArgs {
    #[arg(long = "L")]
    pub orbitals: usize,
    #[arg(long = "N")]
    pub electrons: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Orderings drawn in sampled mode.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Seed of the sampled orderings.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed of the prime draw; first C(L,N) primes when absent.
    #[arg(long)]
    pub state_seed: Option<u64>,
    /// Largest block certified exactly; 0 disables certification.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(0..=mpslab::exact::DET_CAP as u64))]
    pub exact_cap: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
