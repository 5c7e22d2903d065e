//! Multi-stage interaction with a helper.
//!
//! The helper sends `U` (a description of `Y`) once. Then for stages
//! `k = 1..K` user Z sends `V_k` from `(Z, U, V^{k-1}, W^{k-1})` and user X
//! replies with `W_k` from `(X, U, V^k, W^{k-1})`. Rates:
//!
//! * `ry = I(U;Y)`, with no conditioning on `Z` because the helper message
//!   precedes everything else,
//! * `rz = sum_k I(Z; V_k | X, U, V^{k-1}, W^{k-1})`,
//! * `rx = sum_k I(X; W_k | Z, U, V^k, W^{k-1})`.
//!
//! The sums telescope to `I(Z; V^K W^K | X, U)` and `I(X; V^K W^K | Z, U)`
//! since every message is a function of its sender's view.

use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information as cmi, joint_from_kernels, JointPmf, Kernel, Var};

use super::eval::{map_distortion, optimal_reconstruction};
use super::model::SourceModel;
use super::optimize::{check_cards, check_weights, require_yxz};
use super::scheme::ReconMap;
use super::search::{constant_start, minimize, Blocks, Score, SearchBudget, SearchProblem, Shape};

/// Name of the stage-`k` message from user Z (1-based).
pub fn v_name(k: usize) -> String {
    format!("V{k}")
}

/// Name of the stage-`k` message from user X (1-based).
pub fn w_name(k: usize) -> String {
    format!("W{k}")
}

/// Conditioning list of `V_k`: `Z, U, V_1..V_{k-1}, W_1..W_{k-1}`.
fn v_inputs(k: usize) -> Vec<String> {
    let mut names = vec!["Z".to_string(), "U".to_string()];
    names.extend((1..k).map(v_name));
    names.extend((1..k).map(w_name));
    names
}

/// Conditioning list of `W_k`: `X, U, V_1..V_k, W_1..W_{k-1}`.
fn w_inputs(k: usize) -> Vec<String> {
    let mut names = vec!["X".to_string(), "U".to_string()];
    names.extend((1..=k).map(v_name));
    names.extend((1..k).map(w_name));
    names
}

/// A `K`-stage scheme: `p(u|y)`, then per stage `p(v_k|..)` and
/// `p(w_k|..)`, plus `x^(U, W^K, Z)` and `z^(U, V^K, X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiStageScheme {
    u: Kernel,
    stages: Vec<(Kernel, Kernel)>,
    xhat: ReconMap,
    zhat: ReconMap,
}

/// Auxiliary alphabet sizes of a `K`-stage scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiStageCards {
    pub u: usize,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
}

impl MultiStageCards {
    /// `|U| = u` and every stage message of size `m`.
    pub fn uniform(k: usize, u: usize, m: usize) -> Self {
        Self {
            u,
            v: vec![m; k],
            w: vec![m; k],
        }
    }

    pub fn stages(&self) -> usize {
        self.v.len()
    }
}

/// The cardinality-bound sizes for `K` stages:
/// `|U| = |Y|+2K+1`,
/// `|V_k| = |Z||U||V^{k-1}||W^{k-1}| + 2(K+1-k) + 1`,
/// `|W_k| = |X||U||V^k||W^{k-1}| + 2(K+1-k)`.
/// They grow very fast and are meant for reporting.
pub fn multistage_cardinalities(model: &SourceModel, k: usize) -> MultiStageCards {
    let u = model.card_y() + 2 * k + 1;
    let (mut v, mut w) = (Vec::with_capacity(k), Vec::with_capacity(k));
    let (mut vprod, mut wprod) = (1usize, 1usize);
    for stage in 1..=k {
        let slack = 2 * (k + 1 - stage);
        let vk = (model.card_z() * u).saturating_mul(vprod).saturating_mul(wprod).saturating_add(slack + 1);
        vprod = vprod.saturating_mul(vk);
        let wk = (model.card_x() * u).saturating_mul(vprod).saturating_mul(wprod).saturating_add(slack);
        wprod = wprod.saturating_mul(wk);
        v.push(vk);
        w.push(wk);
    }
    MultiStageCards { u, v, w }
}

impl MultiStageScheme {
    pub fn new(
        model: &SourceModel,
        u: Kernel,
        stages: Vec<(Kernel, Kernel)>,
        xhat: ReconMap,
        zhat: ReconMap,
    ) -> Result<Self> {
        let s = Self { u, stages, xhat, zhat };
        s.check(model)?;
        Ok(s)
    }

    /// Complete the kernels with the distortion-minimizing reconstructions.
    pub fn with_optimal_reconstruction(model: &SourceModel, u: Kernel, stages: Vec<(Kernel, Kernel)>) -> Result<Self> {
        check_kernels(model, &u, &stages)?;
        let j = stage_joint(model, &u, &stages)?;
        let (xin, zin) = recon_inputs(stages.len());
        let (xhat, _) = optimal_reconstruction(&j, &strs(&xin), "X", model.require_dx()?)?;
        let (zhat, _) = optimal_reconstruction(&j, &strs(&zin), "Z", model.require_dz()?)?;
        Ok(Self { u, stages, xhat, zhat })
    }

    fn check(&self, model: &SourceModel) -> Result<()> {
        check_kernels(model, &self.u, &self.stages)?;
        let k = self.stages.len();
        let (xin, zin) = recon_inputs(k);
        let known = self.all_vars(model)?;
        check_map(&self.xhat, &lookup(&known, &xin)?, model.require_dx()?.recon_card())?;
        check_map(&self.zhat, &lookup(&known, &zin)?, model.require_dz()?.recon_card())
    }

    fn all_vars(&self, model: &SourceModel) -> Result<Vec<Var>> {
        let mut vars = vec![model.var("X")?, model.var("Z")?, self.u.to_var().clone()];
        for (v, w) in &self.stages {
            vars.push(v.to_var().clone());
            vars.push(w.to_var().clone());
        }
        Ok(vars)
    }

    /// Number of stages `K`.
    pub fn stages(&self) -> usize {
        self.stages.len()
    }

    pub fn u(&self) -> &Kernel {
        &self.u
    }

    /// Stage `k` kernels `(p(v_k|..), p(w_k|..))`, 1-based.
    pub fn stage(&self, k: usize) -> Option<&(Kernel, Kernel)> {
        k.checked_sub(1).and_then(|i| self.stages.get(i))
    }

    pub fn xhat(&self) -> &ReconMap {
        &self.xhat
    }

    pub fn zhat(&self) -> &ReconMap {
        &self.zhat
    }

    /// Joint over `X, Y, Z, U, V1, W1, .., VK, WK`.
    pub fn joint(&self, model: &SourceModel) -> Result<JointPmf> {
        stage_joint(model, &self.u, &self.stages)
    }
}

fn stage_joint(model: &SourceModel, u: &Kernel, stages: &[(Kernel, Kernel)]) -> Result<JointPmf> {
    let mut kernels = vec![u.clone()];
    for (v, w) in stages {
        kernels.push(v.clone());
        kernels.push(w.clone());
    }
    joint_from_kernels(model.joint(), &kernels)
}

fn check_kernels(model: &SourceModel, u: &Kernel, stages: &[(Kernel, Kernel)]) -> Result<()> {
    if stages.is_empty() {
        return Err(Error::InvalidArgument("a multi-stage scheme needs K >= 1".into()));
    }
    expect_kernel(u, &[model.var("Y")?], "U")?;
    let mut known = vec![model.var("X")?, model.var("Z")?, u.to_var().clone()];
    for (i, (v, w)) in stages.iter().enumerate() {
        let k = i + 1;
        expect_kernel(v, &lookup(&known, &v_inputs(k))?, &v_name(k))?;
        known.push(v.to_var().clone());
        expect_kernel(w, &lookup(&known, &w_inputs(k))?, &w_name(k))?;
        known.push(w.to_var().clone());
    }
    Ok(())
}

fn recon_inputs(k: usize) -> (Vec<String>, Vec<String>) {
    let mut xin = vec!["U".to_string()];
    xin.extend((1..=k).map(w_name));
    xin.push("Z".into());
    let mut zin = vec!["U".to_string()];
    zin.extend((1..=k).map(v_name));
    zin.push("X".into());
    (xin, zin)
}

fn lookup(known: &[Var], names: &[String]) -> Result<Vec<Var>> {
    names
        .iter()
        .map(|n| {
            known
                .iter()
                .find(|v| &v.name == n)
                .cloned()
                .ok_or_else(|| Error::UnknownVariable(n.clone()))
        })
        .collect()
}

fn expect_kernel(k: &Kernel, from: &[Var], to: &str) -> Result<()> {
    if k.to_var().name != to || k.from_vars() != from {
        let args: Vec<String> = from.iter().map(|v| format!("{}[{}]", v.name, v.card)).collect();
        return Err(Error::AlphabetMismatch(format!(
            "expected kernel p({to} | {})",
            args.join(",")
        )));
    }
    Ok(())
}

fn check_map(map: &ReconMap, inputs: &[Var], recon_card: usize) -> Result<()> {
    if map.inputs() != inputs || map.recon_card() != recon_card {
        let args: Vec<&str> = inputs.iter().map(|v| v.name.as_str()).collect();
        return Err(Error::AlphabetMismatch(format!(
            "reconstruction must be a function of ({}) with {recon_card} symbols",
            args.join(",")
        )));
    }
    Ok(())
}

/// Rates and distortions of a multi-stage scheme.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MultiStagePoint {
    pub ry: f64,
    pub rz: f64,
    pub rx: f64,
    pub dx: f64,
    pub dz: f64,
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Per-stage terms `(I(Z; V_k | X, U, V^{k-1}, W^{k-1}), I(X; W_k | Z, U,
/// V^k, W^{k-1}))`.
pub fn stage_rates(model: &SourceModel, s: &MultiStageScheme) -> Result<Vec<(f64, f64)>> {
    require_yxz(model)?;
    let j = s.joint(model)?;
    stage_terms(&j, s.stages())
}

fn stage_terms(j: &JointPmf, k: usize) -> Result<Vec<(f64, f64)>> {
    (1..=k)
        .map(|stage| {
            let mut cz = vec!["X".to_string(), "U".to_string()];
            cz.extend((1..stage).map(v_name));
            cz.extend((1..stage).map(w_name));
            let mut cx = vec!["Z".to_string(), "U".to_string()];
            cx.extend((1..=stage).map(v_name));
            cx.extend((1..stage).map(w_name));
            let (vk, wk) = (v_name(stage), w_name(stage));
            Ok((
                cmi(j, &["Z"], &[vk.as_str()], &strs(&cz))?,
                cmi(j, &["X"], &[wk.as_str()], &strs(&cx))?,
            ))
        })
        .collect()
}

/// `(I(Z; V^K W^K | X, U), I(X; V^K W^K | Z, U))`, the telescoped forms of
/// the stage sums.
pub fn aggregate_rates(model: &SourceModel, s: &MultiStageScheme) -> Result<(f64, f64)> {
    require_yxz(model)?;
    let j = s.joint(model)?;
    let k = s.stages();
    let mut msgs: Vec<String> = (1..=k).map(v_name).collect();
    msgs.extend((1..=k).map(w_name));
    let msgs = strs(&msgs);
    Ok((cmi(&j, &["Z"], &msgs, &["X", "U"])?, cmi(&j, &["X"], &msgs, &["Z", "U"])?))
}

/// `ry = I(U;Y)`, stage-sum `rz` and `rx`, and the expected distortions of
/// the scheme's maps.
pub fn evaluate_multistage(model: &SourceModel, s: &MultiStageScheme) -> Result<MultiStagePoint> {
    require_yxz(model)?;
    s.check(model)?;
    let j = s.joint(model)?;
    let terms = stage_terms(&j, s.stages())?;
    Ok(MultiStagePoint {
        ry: cmi(&j, &["U"], &["Y"], &[])?,
        rz: terms.iter().map(|t| t.0).sum(),
        rx: terms.iter().map(|t| t.1).sum(),
        dx: map_distortion(&j, &s.xhat, "X", model.require_dx()?)?,
        dz: map_distortion(&j, &s.zhat, "Z", model.require_dz()?)?,
    })
}

/// Kernel skeleton of a scheme: the conditioning variables and output
/// variable of `U` and of every stage message, in joint order.
fn skeleton(model: &SourceModel, cards: &MultiStageCards) -> Result<Vec<(Vec<Var>, Var)>> {
    let u = Var::new("U", cards.u);
    let mut known = vec![model.var("X")?, model.var("Z")?, u.clone()];
    let mut out = vec![(vec![model.var("Y")?], u)];
    for i in 0..cards.stages() {
        let k = i + 1;
        let v = Var::new(v_name(k), cards.v[i]);
        out.push((lookup(&known, &v_inputs(k))?, v.clone()));
        known.push(v);
        let w = Var::new(w_name(k), cards.w[i]);
        out.push((lookup(&known, &w_inputs(k))?, w.clone()));
        known.push(w);
    }
    Ok(out)
}

/// Largest `K` accepted by [`optimize_multistage`].
pub const MAX_OPTIMIZED_STAGES: usize = 2;

/// Cap on the number of free kernel entries in [`optimize_multistage`].
pub const MAX_MULTISTAGE_PARAMETERS: usize = 4096;

struct MultiStageProblem<'a> {
    model: &'a SourceModel,
    skeleton: Vec<(Vec<Var>, Var)>,
    weights: [f64; 3],
    dx_max: f64,
    dz_max: f64,
}

impl MultiStageProblem<'_> {
    fn scheme(&self, b: &[Vec<f64>]) -> Result<MultiStageScheme> {
        let mut kernels = self
            .skeleton
            .iter()
            .zip(b)
            .map(|((from, to), rows)| Kernel::new(from.clone(), to.clone(), rows.clone()));
        let u = kernels.next().ok_or(Error::EmptyBudget)??;
        let mut stages = Vec::new();
        while let Some(v) = kernels.next() {
            let w = kernels.next().ok_or_else(|| Error::InvalidArgument("unpaired stage".into()))?;
            stages.push((v?, w?));
        }
        MultiStageScheme::with_optimal_reconstruction(self.model, u, stages)
    }
}

impl SearchProblem for MultiStageProblem<'_> {
    fn shapes(&self) -> Vec<Shape> {
        self.skeleton
            .iter()
            .map(|(from, to)| Shape {
                rows: from.iter().map(|v| v.card).product(),
                cols: to.card,
            })
            .collect()
    }

    fn score(&self, b: &[Vec<f64>]) -> Score {
        let p = match self.scheme(b).and_then(|s| evaluate_multistage(self.model, &s)) {
            Ok(p) => p,
            Err(_) => {
                return Score {
                    value: f64::INFINITY,
                    violation: f64::INFINITY,
                }
            }
        };
        let [a, c, e] = self.weights;
        let mut violation = (p.dx - self.dx_max).max(0.0);
        if self.dz_max.is_finite() {
            violation += (p.dz - self.dz_max).max(0.0);
        }
        Score {
            value: a * p.ry + c * p.rz + e * p.rx,
            violation,
        }
    }

    fn named_starts(&self) -> Vec<Blocks> {
        vec![constant_start(&self.shapes())]
    }
}

/// Best multi-stage scheme found and its evaluation.
#[derive(Debug, Clone)]
pub struct MultiStageOptimum {
    pub scheme: MultiStageScheme,
    pub point: MultiStagePoint,
    pub value: f64,
}

/// Minimize `w_y ry + w_z rz + w_x rx` over `K`-stage schemes of the given
/// sizes with `E dx <= dx_max` and `E dz <= dz_max`. Offered for
/// `K <= 2`, `|X|, |Y|, |Z| <= 3` and at most
/// [`MAX_MULTISTAGE_PARAMETERS`] kernel entries. Like every search here the
/// result is an upper bound on the true minimum.
pub fn optimize_multistage(
    model: &SourceModel,
    cards: &MultiStageCards,
    dx_max: f64,
    dz_max: f64,
    weights: [f64; 3],
    budget: &SearchBudget,
) -> Result<MultiStageOptimum> {
    require_yxz(model)?;
    check_weights(&weights)?;
    budget.validate()?;
    let k = cards.stages();
    if k == 0 || k > MAX_OPTIMIZED_STAGES || cards.w.len() != k {
        return Err(Error::InvalidArgument(format!(
            "multi-stage optimization needs 1 <= K <= {MAX_OPTIMIZED_STAGES} with one V and one W size per stage"
        )));
    }
    let sizes = [model.card_x(), model.card_y(), model.card_z()];
    if sizes.iter().any(|&c| c > 3) {
        return Err(Error::AlphabetsTooLarge(format!(
            "multi-stage optimization needs |X|, |Y|, |Z| <= 3 (got {sizes:?})"
        )));
    }
    let mut all = vec![cards.u];
    all.extend(&cards.v);
    all.extend(&cards.w);
    check_cards(&all)?;
    model.check_dx_target(dx_max)?;
    if dz_max.is_finite() {
        model.check_dz_target(dz_max)?;
    } else if dz_max.is_nan() || dz_max < 0.0 {
        return Err(Error::InvalidArgument("dz_max must be >= 0".into()));
    }
    let problem = MultiStageProblem {
        model,
        skeleton: skeleton(model, cards)?,
        weights,
        dx_max,
        dz_max,
    };
    let params: usize = problem.shapes().iter().map(|s| s.rows.saturating_mul(s.cols)).sum();
    if params > MAX_MULTISTAGE_PARAMETERS {
        return Err(Error::AlphabetsTooLarge(format!(
            "{params} kernel entries exceed the multi-stage cap of {MAX_MULTISTAGE_PARAMETERS}"
        )));
    }
    let found = minimize(&problem, budget, &[])?;
    let scheme = problem.scheme(&found.blocks)?;
    let point = evaluate_multistage(model, &scheme)?;
    Ok(MultiStageOptimum {
        scheme,
        point,
        value: found.score.value,
    })
}
