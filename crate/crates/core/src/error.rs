use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{orbitals} orbitals exceed the dense cap of {cap}")]
    Capacity { orbitals: usize, cap: usize },

    #[error("invalid system size: L = {orbitals}, N = {electrons}")]
    InvalidSize { orbitals: usize, electrons: usize },

    #[error("invalid orbital tuple {tuple:?} for L = {orbitals}, N = {electrons}")]
    InvalidTuple {
        tuple: Vec<usize>,
        orbitals: usize,
        electrons: usize,
    },

    #[error("duplicate orbital tuple {0:?}")]
    DuplicateTuple(Vec<usize>),

    #[error("malformed tensor: {0}")]
    MalformedTensor(String),

    #[error("cut {cut} out of range 1..={max}")]
    CutOutOfRange { cut: usize, max: usize },

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("need {needed} primes below {bound}, only {available} available")]
    InsufficientPrimes {
        needed: usize,
        bound: u64,
        available: usize,
    },

    #[error("operation undefined for the zero state")]
    ZeroState,

    #[error("unsupported entry {value} at ({row}, {col}): not ±√p for a pool prime")]
    UnsupportedEntry { row: usize, col: usize, value: f64 },

    #[error("√{prime} occurs more than once in the block")]
    RepeatedEntry { prime: u64 },

    #[error("matrix of size {size} exceeds the exact determinant cap of {cap}")]
    DeterminantCap { size: usize, cap: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("exhaustive search supports L <= {cap}, got L = {orbitals}; use the heuristic search")]
    SearchTooLarge { orbitals: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
