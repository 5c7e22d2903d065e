//! Achievable rate-distortion regions for two-way source coding with a
//! helper.
//!
//! Rates are in bits (base-2 logarithms) per source symbol. The crate has
//! exact finite-alphabet evaluators and a heuristic optimizer for the
//! single-letter regions, a graph checker for Markov chains, the closed-form
//! Gaussian regions, helper-rate tradeoff tools, and a brute-force oracle
//! used to cross-check everything else.

pub mod distortion;
pub mod error;
pub mod gaussian;
pub mod markov;
pub mod oracle;
pub mod prob;
pub mod region;
pub mod tradeoff;

pub use distortion::DistortionMeasure;
pub use error::{Error, Result};
