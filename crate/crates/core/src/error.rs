//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by the region toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` declared more than once")]
    DuplicateVariable(String),

    #[error("variable `{0}` must have cardinality >= 1")]
    ZeroCardinality(String),

    #[error("{what}: expected {expected} entries, got {actual}")]
    ShapeMismatch {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("{what}: negative or non-finite probability {value}")]
    InvalidProbability { what: String, value: f64 },

    #[error("{what}: entries sum to {sum}, not 1")]
    NotNormalized { what: String, sum: f64 },

    #[error("variable sets must be pairwise disjoint (`{0}` appears twice)")]
    OverlappingSets(String),

    #[error("query group {0} is empty")]
    EmptyGroup(&'static str),

    #[error("query syntax error at column {column}: {message}")]
    QuerySyntax { column: usize, message: String },

    #[error("factor file syntax error at line {line}, column {column}: {message}")]
    FactorSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("factor {0} has an empty scope")]
    EmptyFactor(usize),

    #[error("variable `{0}` does not appear in any factor")]
    UncoveredVariable(String),

    #[error("declared Markov chain {chain} does not hold (conditional mutual information {cmi:.3e} bits)")]
    ChainViolated { chain: String, cmi: f64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("missing distortion measure `{0}`")]
    MissingDistortion(&'static str),

    #[error("invalid distortion measure: {0}")]
    InvalidDistortion(String),

    #[error("distortion target {target} for `{which}` is below the full-information floor {floor}")]
    Infeasible {
        which: &'static str,
        target: f64,
        floor: f64,
    },

    #[error("search budget fields must all be >= 1")]
    EmptyBudget,

    #[error("no candidate scheme met the distortion constraints within the search budget")]
    NoFeasibleScheme,

    #[error("enumeration of {size} candidates exceeds the cap of {cap}")]
    EnumerationCap { size: f64, cap: u64 },

    #[error("alphabets too large: {0}")]
    AlphabetsTooLarge(String),

    #[error("covariance matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("independent-rate section requested with r_e = {r_e} < r_d = {r_d}; the general case is an open problem and is not characterized")]
    OpenProblemRegime { r_e: f64, r_d: f64 },

    #[error("fixture: {0}")]
    Fixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
