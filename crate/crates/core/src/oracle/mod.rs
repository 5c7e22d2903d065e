//! Brute-force references for the evaluators and the optimizer.
//!
//! Everything here enumerates instead of searching, and shares as little
//! code as possible with `region`: the frontier enumerator has its own
//! inner evaluation loop, and the Markov scan builds joints straight from
//! factor tables.

mod fixture;
mod frontier;
mod lattice;
mod scan;

pub use fixture::{format_sig9, read_fixture, write_fixture, FixtureParams, OracleFixture, FIXTURE_FORMAT, FIXTURE_VERSION};
pub use frontier::{exhaustive_frontier, OracleFrontier, OraclePoint, QuantizedKernelSpace, DEFAULT_ENUMERATION_CAP};
pub use lattice::{composition_count, simplex_lattice};
pub use scan::{catalog_check, exhaustive_markov_scan, joint_from_factors, CatalogCheck, ScanReport, ScanViolation};
