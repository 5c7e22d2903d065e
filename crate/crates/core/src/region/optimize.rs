use crate::distortion::DistortionMeasure;
use crate::error::{Error, Result};
use crate::prob::{Kernel, Var};

use super::envelope::{lower_convex_envelope, running_min};
use super::eval::{HelperPoint, RatePoint};
use super::fast::DenseTwoWay;
use super::model::{ChainDirection, SourceModel};
use super::scheme::{AuxScheme, HelperScheme, ReconMap};
use super::search::{constant_start, deterministic_start, minimize, Blocks, Score, SearchBudget, SearchProblem, Shape};

/// Auxiliary alphabet sizes for the two-way region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoWayCards {
    pub u: usize,
    pub v: usize,
    pub w: usize,
}

/// Sizes that provably exhaust the two-way region:
/// `|U| = |Y|+4`, `|V| = |Z||U|+3`, `|W| = |U||V||X|+1`.
pub fn two_way_cardinalities(model: &SourceModel) -> TwoWayCards {
    let u = model.card_y() + 4;
    let v = model.card_z() * u + 3;
    TwoWayCards {
        u,
        v,
        w: u * v * model.card_x() + 1,
    }
}

/// Auxiliary alphabet sizes for a one-sided helper region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HelperCards {
    pub u: usize,
    pub w: usize,
}

/// `|U| = |Y|+2`, `|W| = |X|(|Y|+2)+1`; the same numbers hold for both
/// chain directions.
pub fn helper_cardinalities(model: &SourceModel) -> HelperCards {
    HelperCards {
        u: model.card_y() + 2,
        w: model.card_x() * (model.card_y() + 2) + 1,
    }
}

/// Weighted two-way objective with distortion caps and an optional cap on
/// `r1`.
struct TwoWayProblem<'a> {
    dense: DenseTwoWay<'a>,
    weights: [f64; 3],
    dx_max: f64,
    dz_max: f64,
    r1_cap: Option<f64>,
}

impl TwoWayProblem<'_> {
    fn point(&self, b: &[Vec<f64>]) -> RatePoint {
        self.dense.evaluate(&b[0], &b[1], &b[2])
    }
}

impl SearchProblem for TwoWayProblem<'_> {
    fn shapes(&self) -> Vec<Shape> {
        let d = &self.dense;
        vec![
            Shape { rows: d.ny, cols: d.nu },
            Shape { rows: d.nu * d.nz, cols: d.nv },
            Shape { rows: d.nu * d.nv * d.nx, cols: d.nw },
        ]
    }

    fn score(&self, b: &[Vec<f64>]) -> Score {
        let p = self.point(b);
        let [a, c, e] = self.weights;
        let mut violation = (p.dx - self.dx_max).max(0.0);
        if self.dz_max.is_finite() {
            violation += (p.dz - self.dz_max).max(0.0);
        }
        if let Some(cap) = self.r1_cap {
            violation += (p.r1 - cap).max(0.0);
        }
        Score {
            value: a * p.r1 + c * p.r2 + e * p.r3,
            violation,
        }
    }

    fn row_masses(&self, b: &[Vec<f64>], block: usize) -> Vec<f64> {
        match block {
            0 => self.dense.masses_u(),
            1 => self.dense.masses_v(&b[0]),
            _ => self.dense.masses_w(&b[0], &b[1]),
        }
    }

    fn named_starts(&self) -> Vec<Blocks> {
        let shapes = self.shapes();
        let (nz, nx) = (self.dense.nz, self.dense.nx);
        // Every user forwards its own source symbol.
        let copy = deterministic_start(&shapes, |b, r| match b {
            0 => r,
            1 => r % nz,
            _ => r % nx,
        });
        vec![constant_start(&shapes), copy]
    }
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weights.iter().all(|w| *w == 0.0) {
        return Err(Error::InvalidArgument(
            "weights must be finite, nonnegative and not all zero".into(),
        ));
    }
    Ok(())
}

pub(crate) fn check_cards(cards: &[usize]) -> Result<()> {
    if cards.contains(&0) {
        return Err(Error::ZeroCardinality("auxiliary".into()));
    }
    Ok(())
}

pub(crate) fn require_yxz(model: &SourceModel) -> Result<()> {
    if model.chain() != ChainDirection::Yxz {
        return Err(Error::InvalidArgument(
            "optimization is implemented for sources with chain Y-X-Z".into(),
        ));
    }
    Ok(())
}

/// Best two-way scheme found and its evaluation.
#[derive(Debug, Clone)]
pub struct RegionOptimum {
    pub scheme: AuxScheme,
    pub point: RatePoint,
    pub value: f64,
}

fn dense_kernels(model: &SourceModel, cards: (usize, usize, usize), b: &[Vec<f64>]) -> Result<[Kernel; 3]> {
    let (u, v, w) = (Var::new("U", cards.0), Var::new("V", cards.1), Var::new("W", cards.2));
    Ok([
        Kernel::new(vec![model.var("Y")?], u.clone(), b[0].clone())?,
        Kernel::new(vec![u.clone(), model.var("Z")?], v.clone(), b[1].clone())?,
        Kernel::new(vec![u, v, model.var("X")?], w, b[2].clone())?,
    ])
}

/// Minimize `w1 r1 + w2 r2 + w3 r3` over two-way schemes with `E dx <=
/// dx_max` and `E dz <= dz_max` (`f64::INFINITY` disables a cap).
/// Reconstructions are always the optimal maps. The result is the best
/// point the seeded search found, an upper bound on the true minimum.
/// `cards` defaults to [`two_way_cardinalities`].
pub fn optimize_region(
    model: &SourceModel,
    dx_max: f64,
    dz_max: f64,
    weights: [f64; 3],
    budget: &SearchBudget,
    cards: Option<TwoWayCards>,
) -> Result<RegionOptimum> {
    require_yxz(model)?;
    check_weights(&weights)?;
    budget.validate()?;
    let dxm = model.require_dx()?;
    let dzm = model.require_dz()?;
    model.check_dx_target(dx_max)?;
    if dz_max.is_finite() {
        model.check_dz_target(dz_max)?;
    } else if dz_max.is_nan() || dz_max < 0.0 {
        return Err(Error::InvalidArgument("dz_max must be >= 0".into()));
    }
    let c = cards.unwrap_or_else(|| two_way_cardinalities(model));
    check_cards(&[c.u, c.v, c.w])?;
    let triple = (c.u, c.v, c.w);
    let problem = TwoWayProblem {
        dense: DenseTwoWay::new(model, triple, dxm, dz_max.is_finite().then_some(dzm)),
        weights,
        dx_max,
        dz_max,
        r1_cap: None,
    };
    let found = minimize(&problem, budget, &[])?;
    let full = DenseTwoWay::new(model, triple, dxm, Some(dzm));
    let b = &found.blocks;
    let point = full.evaluate(&b[0], &b[1], &b[2]);
    let (zt, xt) = full.reconstructions(&b[0], &b[1], &b[2]);
    let [ku, kv, kw] = dense_kernels(model, triple, b)?;
    let zhat = ReconMap::new(
        vec![ku.to_var().clone(), kv.to_var().clone(), model.var("X")?],
        dzm.recon_card(),
        zt,
    )?;
    let xhat = ReconMap::new(
        vec![ku.to_var().clone(), kw.to_var().clone(), model.var("Z")?],
        dxm.recon_card(),
        xt,
    )?;
    Ok(RegionOptimum {
        scheme: AuxScheme::new(model, ku, kv, kw, zhat, xhat)?,
        point,
        value: found.score.value,
    })
}

/// Objective for the one-sided helper search under `Y - X - Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelperTarget {
    /// Cap on `E dx(X, x^)`.
    pub d: f64,
    /// Weight on `r1`.
    pub lambda: f64,
    /// Weight on `r`.
    pub rate_weight: f64,
    /// Optional cap on `r1`.
    pub r1_cap: Option<f64>,
}

/// Best one-sided helper scheme found.
#[derive(Debug, Clone)]
pub struct HelperOptimum {
    pub scheme: HelperScheme,
    pub point: HelperPoint,
    pub value: f64,
    /// Raw search state, reusable as a warm start.
    pub blocks: Blocks,
    /// The best feasible point of every restart.
    pub restart_points: Vec<HelperPoint>,
}

fn helper_point(p: RatePoint) -> HelperPoint {
    HelperPoint {
        r1: p.r1,
        r: p.r3,
        d: p.dx,
    }
}

/// Minimize `lambda r1 + rate_weight r` over one-sided helper schemes
/// (`Y - X - Z`) subject to `E dx <= d` and the optional `r1` cap.
/// `cards` defaults to [`helper_cardinalities`].
pub fn optimize_helper(
    model: &SourceModel,
    target: &HelperTarget,
    budget: &SearchBudget,
    cards: Option<HelperCards>,
    warm: &[Blocks],
) -> Result<HelperOptimum> {
    require_yxz(model)?;
    check_weights(&[target.lambda, target.rate_weight])?;
    budget.validate()?;
    let dxm: &DistortionMeasure = model.require_dx()?;
    model.check_dx_target(target.d)?;
    if let Some(cap) = target.r1_cap {
        if cap.is_nan() || cap < 0.0 {
            return Err(Error::InvalidArgument(format!("r1 cap must be >= 0 (got {cap})")));
        }
    }
    let c = cards.unwrap_or_else(|| helper_cardinalities(model));
    check_cards(&[c.u, c.w])?;
    let triple = (c.u, 1, c.w);
    let problem = TwoWayProblem {
        dense: DenseTwoWay::new(model, triple, dxm, None),
        weights: [target.lambda, 0.0, target.rate_weight],
        dx_max: target.d,
        dz_max: f64::INFINITY,
        r1_cap: target.r1_cap,
    };
    let shapes = problem.shapes();
    let warm: Vec<Blocks> = warm
        .iter()
        .filter(|b| b.len() == 3 && b.iter().zip(&shapes).all(|(v, s)| v.len() == s.rows * s.cols))
        .cloned()
        .collect();
    let found = minimize(&problem, budget, &warm)?;
    let b = &found.blocks;
    let point = helper_point(problem.point(b));
    let (_, xt) = problem.dense.reconstructions(&b[0], &b[1], &b[2]);
    let u = Var::new("U", c.u);
    let w = Var::new("W", c.w);
    let ku = Kernel::new(vec![model.var("Y")?], u.clone(), b[0].clone())?;
    let kw = Kernel::new(vec![u.clone(), model.var("X")?], w.clone(), b[2].clone())?;
    let xhat = ReconMap::new(vec![u, w, model.var("Z")?], dxm.recon_card(), xt)?;
    let restart_points = found
        .per_restart
        .iter()
        .map(|(blocks, _)| helper_point(problem.point(blocks)))
        .collect();
    Ok(HelperOptimum {
        scheme: HelperScheme::new(model, ku, kw, xhat)?,
        point,
        value: found.score.value,
        blocks: found.blocks,
        restart_points,
    })
}

/// Embed a `|U| = 1` helper state into `nu` symbols: all helper mass goes to
/// `u = 0` and every `u` reuses the same `W` rows.
fn lift_constant_u(blocks: &Blocks, nu: usize) -> Blocks {
    let ny = blocks[0].len();
    let mut pu = vec![0.0; ny * nu];
    for y in 0..ny {
        pu[y * nu] = 1.0;
    }
    let pw: Vec<f64> = (0..nu).flat_map(|_| blocks[2].iter().copied()).collect();
    let pv: Vec<f64> = (0..nu).flat_map(|_| blocks[1].iter().copied()).collect();
    vec![pu, pv, pw]
}

/// One row of a traced frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    /// Helper-rate cap.
    pub r1: f64,
    /// Minimal encoder rate after the monotone convex envelope.
    pub r: f64,
    /// Distortion target the point satisfies.
    pub dx: f64,
    /// Encoder rate of the best scheme found at this cap, before the
    /// envelope.
    pub raw_r: f64,
}

/// Trace `R(r1) = min I(X;W|U,Z)` subject to `I(Y;U|Z) <= r1` and
/// `E dx <= d` over the caps in `r1_grid` (sorted and deduplicated). Each
/// cap warm-starts from the previous one. Output values are the lower convex
/// nonincreasing envelope of the per-cap optima.
pub fn trace_frontier_helper(
    model: &SourceModel,
    d: f64,
    r1_grid: &[f64],
    budget: &SearchBudget,
    cards: Option<HelperCards>,
) -> Result<Vec<FrontierPoint>> {
    require_yxz(model)?;
    if r1_grid.is_empty() {
        return Err(Error::InvalidArgument("r1 grid is empty".into()));
    }
    if r1_grid.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidArgument("r1 grid values must be finite and >= 0".into()));
    }
    model.check_dx_target(d)?;
    let mut caps = r1_grid.to_vec();
    caps.sort_by(f64::total_cmp);
    caps.dedup();
    let c = cards.unwrap_or_else(|| helper_cardinalities(model));
    let mut seeds: Vec<Blocks> = Vec::new();
    if c.u > 1 {
        // A constant U is feasible at every cap. Solve that smaller problem
        // first and lift it, so no cap starts worse than plain Wyner-Ziv.
        let target = HelperTarget {
            d,
            lambda: 0.0,
            rate_weight: 1.0,
            r1_cap: None,
        };
        let base = optimize_helper(model, &target, budget, Some(HelperCards { u: 1, w: c.w }), &[])?;
        seeds.push(lift_constant_u(&base.blocks, c.u));
    }
    let mut raw = Vec::with_capacity(caps.len());
    let mut warm: Vec<Blocks> = seeds.clone();
    for &cap in &caps {
        let target = HelperTarget {
            d,
            lambda: 0.0,
            rate_weight: 1.0,
            r1_cap: Some(cap),
        };
        let opt = optimize_helper(model, &target, budget, Some(c), &warm)?;
        raw.push(opt.point.r);
        warm = vec![opt.blocks];
        warm.extend(seeds.iter().cloned());
    }
    let env = lower_convex_envelope(&caps, &running_min(&raw));
    Ok(caps
        .iter()
        .zip(env)
        .zip(raw)
        .map(|((&r1, r), raw_r)| FrontierPoint { r1, r, dx: d, raw_r })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::eval::{evaluate_helper, evaluate_rate_point};

    fn quick() -> SearchBudget {
        SearchBudget {
            restarts: 4,
            refinement_rounds: 16,
            grid_levels: 8,
            seed: 1,
        }
    }

    #[test]
    fn inactive_constraints_give_zero_rates() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let opt = optimize_region(&m, 1.0, 1.0, [1.0, 1.0, 1.0], &quick(), None).unwrap();
        assert_eq!(opt.value, 0.0);
        let p = evaluate_rate_point(&m, &opt.scheme).unwrap();
        assert_eq!((p.r1, p.r2, p.r3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn copy_source_is_free() {
        let m = SourceModel::copy_source(0.3).unwrap();
        let opt = optimize_region(&m, 0.0, 0.0, [1.0, 1.0, 1.0], &quick(), None).unwrap();
        assert!(opt.value.abs() < 1e-12, "{:?}", opt.point);
        assert!(opt.point.dx <= 1e-12 && opt.point.dz <= 1e-12);
    }

    #[test]
    fn reported_point_matches_explicit_evaluation() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let cards = TwoWayCards { u: 2, v: 2, w: 3 };
        let opt = optimize_region(&m, 0.05, 0.05, [0.5, 1.0, 1.0], &quick(), Some(cards)).unwrap();
        let p = evaluate_rate_point(&m, &opt.scheme).unwrap();
        assert!((p.r1 - opt.point.r1).abs() < 1e-10);
        assert!((p.r3 - opt.point.r3).abs() < 1e-10);
        assert!(p.dx <= 0.05 + 1e-9 && p.dz <= 0.05 + 1e-9);
    }

    #[test]
    fn infeasible_and_bad_inputs() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        assert!(matches!(
            optimize_region(&m, -0.1, 1.0, [1.0, 1.0, 1.0], &quick(), None),
            Err(Error::Infeasible { .. })
        ));
        let empty = SearchBudget { refinement_rounds: 0, ..quick() };
        assert!(matches!(
            optimize_region(&m, 0.1, 0.1, [1.0, 1.0, 1.0], &empty, None),
            Err(Error::EmptyBudget)
        ));
        assert!(optimize_region(&m, 0.1, 0.1, [0.0, 0.0, 0.0], &quick(), None).is_err());
        assert!(trace_frontier_helper(&m, 0.1, &[], &quick(), None).is_err());
    }

    #[test]
    fn frontier_endpoints() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let h_y_given_z = crate::prob::conditional_entropy(m.joint(), &["Y"], &["Z"]).unwrap();
        let grid = [0.0, 0.2, 0.5, h_y_given_z + 0.01];
        let f = trace_frontier_helper(&m, 0.05, &grid, &quick(), None).unwrap();
        assert_eq!(f.len(), 4);
        for pair in f.windows(2) {
            assert!(pair[1].r <= pair[0].r + 1e-12);
        }
        // Cap 0 forces U independent of Y: plain Wyner-Ziv.
        let wz = optimize_helper(
            &m,
            &HelperTarget { d: 0.05, lambda: 0.0, rate_weight: 1.0, r1_cap: Some(0.0) },
            &quick(),
            Some(HelperCards { u: 1, w: 9 }),
            &[],
        )
        .unwrap();
        assert!((f[0].raw_r - wz.point.r).abs() < 2e-2, "{} vs {}", f[0].raw_r, wz.point.r);
        let p = evaluate_helper(&m, &wz.scheme).unwrap();
        assert!((p.r - wz.point.r).abs() < 1e-10 && p.d <= 0.05 + 1e-9);
    }
}
