//! Finite-alphabet achievable regions.
//!
//! The two-way region uses the joint
//! `p(x,y) p(z|x) p(u|y) p(v|u,z) p(w|u,v,x)` with rates
//! `r1 = I(Y;U|Z)`, `r2 = I(Z;V|U,X)`, `r3 = I(X;W|U,V,Z)`, and
//! reconstructions `z^(U,V,X)` at user X and `x^(U,W,Z)` at user Z. Each
//! user can only use the messages it actually received, which fixes those
//! argument lists.
//!
//! The one-sided helper regions drop `V` and have one kernel `p(w|u,x)`:
//! under `Y - X - Z` the rates are `I(Y;U|Z)` and `I(X;W|U,Z)`; under
//! `Y - Z - X` they are `I(U;Y|X)` and `I(X;W|U,Z)`.
//!
//! Evaluation is exact. Optimization is a seeded heuristic search, so its
//! results are upper bounds on the true minima.

mod envelope;
mod eval;
mod fast;
mod model;
pub mod multistage;
mod optimize;
mod probe;
mod scheme;
pub mod search;

pub use envelope::{lower_convex_envelope, running_min};
pub use eval::{
    evaluate_helper, evaluate_rate_point, evaluate_yzx, optimal_reconstruction, HelperPoint,
    RatePoint,
};
pub use model::{ChainDirection, SourceModel};
pub use optimize::{
    helper_cardinalities, optimize_helper, optimize_region, trace_frontier_helper,
    two_way_cardinalities, FrontierPoint, HelperCards, HelperOptimum, HelperTarget, RegionOptimum,
    TwoWayCards,
};
pub use probe::{cardinality_sufficiency_probe, ProbeReport, ProbeRow};
pub use scheme::{AuxScheme, HelperScheme, ReconMap};
pub use search::SearchBudget;

/// Tolerance used when checking the declared source chain.
pub const CHAIN_TOL: f64 = 1e-9;
