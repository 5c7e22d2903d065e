//! Helper-rate tradeoff for the one-sided problem under `Y - X - Z`.
//!
//! `R(r1)` is the least encoder rate at helper rate `r1`. Its support
//! function is `J*(lambda) = min I(X;W|U,Z) + lambda I(Y;U|Z)`, and its
//! subgradients never exceed 1 in magnitude: one helper bit saves at most
//! one encoder bit.
//!
//! With separate helper links to encoder (`r_e`) and decoder (`r_d`), the
//! section at `r_e >= r_d` equals the common-message section at `r_d`.
//! Below that only a binning bound is known and the general case is open.

use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information as cmi, joint_from_kernels, mutual_information, Kernel};
use crate::region::{
    optimize_helper, trace_frontier_helper, FrontierPoint, HelperCards, HelperPoint, HelperTarget,
    SearchBudget, SourceModel, CHAIN_TOL,
};

/// One point of the support function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportLineQuery {
    pub lambda: f64,
    pub d: f64,
}

/// `J*(lambda)` and the scheme point attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportValue {
    pub lambda: f64,
    pub value: f64,
    pub point: HelperPoint,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0 (got {lambda})")));
    }
    Ok(())
}

/// Best value of `I(X;W|U,Z) + lambda I(Y;U|Z)` found under `E dx <= d`.
/// This is a search result, hence an upper bound on `J*(lambda)`.
pub fn j_star(
    model: &SourceModel,
    q: &SupportLineQuery,
    budget: &SearchBudget,
    cards: Option<HelperCards>,
) -> Result<SupportValue> {
    check_lambda(q.lambda)?;
    let target = HelperTarget {
        d: q.d,
        lambda: q.lambda,
        rate_weight: 1.0,
        r1_cap: None,
    };
    let opt = optimize_helper(model, &target, budget, cards, &[])?;
    Ok(SupportValue {
        lambda: q.lambda,
        value: opt.point.r + q.lambda * opt.point.r1,
        point: opt.point,
    })
}

/// `J*` on a grid of `lambda` values. Every searched point `(r1, r)` is
/// pooled, and each output is `min over the pool of r + lambda r1`. A
/// minimum of affine functions is concave and nondecreasing in `lambda`
/// by construction, and pooling can only lower each value.
pub fn j_star_curve(
    model: &SourceModel,
    d: f64,
    lambdas: &[f64],
    budget: &SearchBudget,
    cards: Option<HelperCards>,
) -> Result<Vec<SupportValue>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    let mut pool: Vec<HelperPoint> = Vec::new();
    let mut warm = Vec::new();
    for &lambda in lambdas {
        check_lambda(lambda)?;
        let target = HelperTarget {
            d,
            lambda,
            rate_weight: 1.0,
            r1_cap: None,
        };
        let opt = optimize_helper(model, &target, budget, cards, &warm)?;
        pool.push(opt.point);
        pool.extend(opt.restart_points.iter().filter(|p| p.d <= d));
        warm = vec![opt.blocks];
    }
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let point = *pool
                .iter()
                .min_by(|a, b| (a.r + lambda * a.r1).total_cmp(&(b.r + lambda * b.r1)))
                .expect("pool holds one point per lambda");
            SupportValue {
                lambda,
                value: point.r + lambda * point.r1,
                point,
            }
        })
        .collect())
}

/// Largest slope magnitude of the traced frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeCertificate {
    pub max_slope: f64,
    /// The frontier the slopes were taken from.
    pub frontier: Vec<FrontierPoint>,
}

/// Trace `R(r1)` over `r1_grid` and return the largest
/// `|delta r / delta r1|` between consecutive points of its lower convex
/// envelope. The true curve has all slopes `<= 1`.
pub fn slope_certificate(
    model: &SourceModel,
    d: f64,
    r1_grid: &[f64],
    budget: &SearchBudget,
    cards: Option<HelperCards>,
) -> Result<SlopeCertificate> {
    let mut distinct = r1_grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidArgument(
            "slope certificate needs at least two distinct r1 values".into(),
        ));
    }
    let frontier = trace_frontier_helper(model, d, &distinct, budget, cards)?;
    let max_slope = frontier
        .windows(2)
        .map(|w| ((w[1].r - w[0].r) / (w[1].r1 - w[0].r1)).abs())
        .fold(0.0, f64::max);
    Ok(SlopeCertificate { max_slope, frontier })
}

/// Helper rates toward the encoder (`r_e`) and the decoder (`r_d`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependentRatesQuery {
    pub r_e: f64,
    pub r_d: f64,
    pub d: f64,
}

/// Section of the independent-rates region at `(r_e, r_d)`: every encoder
/// rate `>= min_rate` is achievable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSection {
    pub r_e: f64,
    pub r_d: f64,
    pub d: f64,
    pub min_rate: f64,
}

/// For `r_e >= r_d` the section equals the common-message section at
/// `r_d`, so extra encoder-side helper rate buys nothing. Smaller `r_e` is
/// rejected with [`Error::OpenProblemRegime`].
pub fn independent_rates_section(
    model: &SourceModel,
    q: &IndependentRatesQuery,
    budget: &SearchBudget,
    cards: Option<HelperCards>,
) -> Result<RegionSection> {
    for (name, v) in [("r_e", q.r_e), ("r_d", q.r_d)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0 (got {v})")));
        }
    }
    if q.r_e < q.r_d {
        return Err(Error::OpenProblemRegime { r_e: q.r_e, r_d: q.r_d });
    }
    let frontier = trace_frontier_helper(model, q.d, &[0.0, q.r_d], budget, cards)?;
    let min_rate = frontier
        .iter()
        .find(|p| p.r1 == q.r_d)
        .map(|p| p.r)
        .expect("the frontier contains every requested cap");
    Ok(RegionSection {
        r_e: q.r_e,
        r_d: q.r_d,
        d: q.d,
        min_rate,
    })
}

/// Encoder-side helper rate after binning the helper description against
/// `X`, and the decoder-side rate it is compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinnedRate {
    /// `I(V;Y) - I(V;X)`.
    pub r_e: f64,
    /// `I(V;Y) - I(V;Z)`.
    pub r_prime: f64,
    /// Whether `r_e <= r_prime` held numerically.
    pub certified: bool,
}

/// Binned encoder rate for a helper description `V` given by `p(v | ..)`,
/// a kernel conditioned on some of `X, Y, Z`. The chain `V - Y - (X, Z)`
/// is checked numerically and must hold.
pub fn binned_encoder_rate(model: &SourceModel, v: &Kernel) -> Result<BinnedRate> {
    if model.chain() != crate::region::ChainDirection::Yxz {
        return Err(Error::InvalidArgument("binned rates need a source with chain Y-X-Z".into()));
    }
    let name = v.to_var().name.clone();
    let j = joint_from_kernels(model.joint(), std::slice::from_ref(v))?;
    let leak = cmi(&j, &[name.as_str()], &["X", "Z"], &["Y"])?;
    if leak > CHAIN_TOL {
        return Err(Error::ChainViolated {
            chain: format!("{name}-Y-X-Z"),
            cmi: leak,
        });
    }
    let ivy = mutual_information(&j, &[name.as_str()], &["Y"])?;
    let r_e = (ivy - mutual_information(&j, &[name.as_str()], &["X"])?).max(0.0);
    let r_prime = (ivy - mutual_information(&j, &[name.as_str()], &["Z"])?).max(0.0);
    Ok(BinnedRate {
        r_e,
        r_prime,
        certified: r_e <= r_prime + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{conditional_entropy, Var};

    fn quick() -> SearchBudget {
        SearchBudget {
            restarts: 4,
            refinement_rounds: 16,
            grid_levels: 8,
            seed: 1,
        }
    }

    #[test]
    fn binned_rate_of_full_description() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let v = Kernel::deterministic(vec![m.var("Y").unwrap()], Var::new("V", 2), |s| s[0]).unwrap();
        let b = binned_encoder_rate(&m, &v).unwrap();
        let hyx = conditional_entropy(m.joint(), &["Y"], &["X"]).unwrap();
        assert!((b.r_e - hyx).abs() < 1e-12);
        assert!(b.certified && b.r_e < b.r_prime);
    }

    #[test]
    fn binned_rate_rejects_leaky_description() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let v = Kernel::deterministic(vec![m.var("X").unwrap()], Var::new("V", 2), |s| s[0]).unwrap();
        assert!(matches!(binned_encoder_rate(&m, &v), Err(Error::ChainViolated { .. })));
    }

    #[test]
    fn independent_description_costs_nothing() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let v = Kernel::constant(vec![m.var("Y").unwrap()], Var::new("V", 3)).unwrap();
        let b = binned_encoder_rate(&m, &v).unwrap();
        assert_eq!((b.r_e, b.r_prime), (0.0, 0.0));
    }

    #[test]
    fn open_regime_is_rejected() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let q = IndependentRatesQuery { r_e: 0.1, r_d: 0.2, d: 0.05 };
        assert!(matches!(
            independent_rates_section(&m, &q, &quick(), None),
            Err(Error::OpenProblemRegime { .. })
        ));
    }

    #[test]
    fn curve_is_concave_and_nondecreasing() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let lambdas: Vec<f64> = (0..=5).map(|i| i as f64 * 0.2).collect();
        let c = j_star_curve(&m, 0.05, &lambdas, &quick(), None).unwrap();
        for w in c.windows(2) {
            assert!(w[1].value >= w[0].value - 1e-12);
        }
        for w in c.windows(3) {
            assert!(w[1].value >= 0.5 * (w[0].value + w[2].value) - 1e-12);
        }
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        assert!(slope_certificate(&m, 0.05, &[0.1, 0.1], &quick(), None).is_err());
    }
}
