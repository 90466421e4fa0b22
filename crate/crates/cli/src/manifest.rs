use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::args::Command;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Provenance record written next to every output file.
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub subcommand: &'static str,
    pub flags: &'a Command,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub prng: &'static str,
    pub version: &'static str,
    pub parallel: bool,
    pub timestamp: String,
    pub output: PathBuf,
    pub schema_version: u32,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

pub fn write_manifest(command: &Command, seed: Option<u64>, output: &Path) -> anyhow::Result<()> {
    let manifest = RunManifest {
        subcommand: command.name(),
        flags: command,
        argv: std::env::args().collect(),
        seed,
        prng: mpslab::states::PRNG_ID,
        version: env!("CARGO_PKG_VERSION"),
        parallel: mpslab::PARALLEL,
        timestamp: chrono::Utc::now().to_rfc3339(),
        output: output.to_path_buf(),
        schema_version: MANIFEST_SCHEMA_VERSION,
    };
    let path = manifest_path(output);
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Tt(_) => "tt",
            Command::Reorder(_) => "reorder",
            Command::Spectrum(_) => "spectrum",
            Command::Certify(_) => "certify",
            Command::SearchOrder(_) => "search-order",
            Command::Verify(crate::args::VerifyCommand::Bell(_)) => "verify bell",
            Command::Verify(crate::args::VerifyCommand::Prime(_)) => "verify prime",
        }
    }
}
