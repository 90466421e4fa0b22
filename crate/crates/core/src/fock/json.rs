//! State files: `{"L":4,"N":2,"terms":[{"occ":"1100","coeff":...}],...}`.
//!
//! `occ` is `μ₁…μ_L` left to right. Coefficients are written with 17
//! significant digits in scientific notation.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::{CIState, OccupationBitstring};
use crate::error::{Error, Result};
use crate::format::sci17;

pub const STATE_SCHEMA_VERSION: u32 = 1;

/// Provenance recorded next to the terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StateMeta {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prng: Option<String>,
    #[serde(default)]
    pub normalized: bool,
}

#[derive(Serialize)]
struct TermOut {
    occ: String,
    coeff: Box<RawValue>,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct StateOut<'a> {
    L: usize,
    N: usize,
    terms: Vec<TermOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<&'a StateMeta>,
    schema_version: u32,
}

#[derive(Deserialize)]
struct TermIn {
    occ: String,
    coeff: f64,
}

#[derive(Deserialize)]
#[allow(non_snake_case)]
struct StateIn {
    L: usize,
    N: usize,
    terms: Vec<TermIn>,
    #[serde(default)]
    meta: Option<StateMeta>,
    #[serde(default)]
    schema_version: Option<u32>,
}

pub fn state_to_json(state: &CIState, meta: Option<&StateMeta>) -> String {
    let l = state.orbitals();
    let terms = state
        .terms()
        .map(|(tuple, coeff)| TermOut {
            occ: tuple.to_bitstring(l).to_string(),
            coeff: RawValue::from_string(sci17(coeff)).expect("scientific float is valid JSON"),
        })
        .collect();
    let out = StateOut {
        L: l,
        N: state.electrons(),
        terms,
        meta,
        schema_version: STATE_SCHEMA_VERSION,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("state serialises");
    text.push('\n');
    text
}

pub fn state_from_json(text: &str) -> Result<(CIState, Option<StateMeta>)> {
    let raw: StateIn = serde_json::from_str(text)?;
    if let Some(v) = raw.schema_version {
        if v > STATE_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported state schema version {v}")));
        }
    }
    let mut terms = Vec::with_capacity(raw.terms.len());
    for term in raw.terms {
        let bits: OccupationBitstring = term.occ.parse()?;
        if bits.len() != raw.L {
            return Err(Error::Parse(format!(
                "occupation {:?} has length {}, expected L = {}",
                term.occ,
                bits.len(),
                raw.L
            )));
        }
        if bits.popcount() != raw.N {
            return Err(Error::Parse(format!(
                "occupation {:?} holds {} electrons, expected N = {}",
                term.occ,
                bits.popcount(),
                raw.N
            )));
        }
        terms.push((bits.to_tuple(), term.coeff));
    }
    Ok((CIState::from_terms(raw.L, raw.N, terms)?, raw.meta))
}

pub fn write_state(path: &Path, state: &CIState, meta: Option<&StateMeta>) -> Result<()> {
    fs::write(path, state_to_json(state, meta)).map_err(|e| Error::io(path, e))
}

pub fn read_state(path: &Path) -> Result<(CIState, Option<StateMeta>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    state_from_json(&text)
}
