use crate::distortion::DistortionMeasure;
use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information as cmi, joint_from_kernels, JointPmf};

use super::model::{ChainDirection, SourceModel};
use super::scheme::{AuxScheme, HelperScheme, ReconMap};

/// Rates in bits and expected distortions of one two-way scheme.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub dx: f64,
    pub dz: f64,
}

/// Helper rate, encoder rate and distortion of one one-sided scheme.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HelperPoint {
    pub r1: f64,
    pub r: f64,
    pub d: f64,
}

/// Best estimate of `target` from `cond`: for every conditioning tuple the
/// symbol minimizing the conditional expected distortion, lowest index on
/// ties. Returns the map and the distortion it achieves.
pub fn optimal_reconstruction(
    j: &JointPmf,
    cond: &[&str],
    target: &str,
    d: &DistortionMeasure,
) -> Result<(ReconMap, f64)> {
    if cond.contains(&target) {
        return Err(Error::OverlappingSets(target.to_string()));
    }
    let mut keep = cond.to_vec();
    keep.push(target);
    let m = j.marginal(&keep)?;
    let sc = m.vars().last().map(|v| v.card).unwrap_or(0);
    if sc != d.source_card() {
        return Err(Error::AlphabetMismatch(format!(
            "distortion has {} source symbols, `{target}` has {sc}",
            d.source_card()
        )));
    }
    let probs = m.probs();
    let tuples = probs.len() / sc;
    let mut table = Vec::with_capacity(tuples);
    let mut total = 0.0;
    for t in 0..tuples {
        let col = &probs[t * sc..(t + 1) * sc];
        let (best, cost) = argmin_cost(col, d);
        table.push(best);
        total += cost;
    }
    let inputs = m.vars()[..cond.len()].to_vec();
    Ok((ReconMap::new(inputs, d.recon_card(), table)?, total))
}

/// `argmin_r sum_s weights[s] d(s, r)`, first index on ties.
pub(crate) fn argmin_cost(weights: &[f64], d: &DistortionMeasure) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for r in 0..d.recon_card() {
        let c: f64 = weights.iter().enumerate().map(|(s, w)| w * d.get(s, r)).sum();
        if c < best.1 {
            best = (r, c);
        }
    }
    best
}

/// `E d(target, map(inputs))` under `j`.
pub(crate) fn map_distortion(j: &JointPmf, map: &ReconMap, target: &str, d: &DistortionMeasure) -> Result<f64> {
    let mut keep: Vec<&str> = map.inputs().iter().map(|v| v.name.as_str()).collect();
    keep.push(target);
    let m = j.marginal(&keep)?;
    let sc = d.source_card();
    Ok(m.probs()
        .chunks(sc)
        .zip(map.table())
        .map(|(col, &r)| col.iter().enumerate().map(|(s, p)| p * d.get(s, r)).sum::<f64>())
        .sum())
}

pub(crate) fn two_way_joint(model: &SourceModel, s: &AuxScheme) -> Result<JointPmf> {
    joint_from_kernels(model.joint(), &[s.u.clone(), s.v.clone(), s.w.clone()])
}

/// Rates and distortions of a two-way scheme, computed from the explicit
/// joint over `X, Y, Z, U, V, W`.
pub fn evaluate_rate_point(model: &SourceModel, s: &AuxScheme) -> Result<RatePoint> {
    if model.chain() != ChainDirection::Yxz {
        return Err(Error::ChainViolated {
            chain: "Y-X-Z".into(),
            cmi: f64::NAN,
        });
    }
    let j = two_way_joint(model, s)?;
    Ok(RatePoint {
        r1: cmi(&j, &["Y"], &["U"], &["Z"])?,
        r2: cmi(&j, &["Z"], &["V"], &["U", "X"])?,
        r3: cmi(&j, &["X"], &["W"], &["U", "V", "Z"])?,
        dx: map_distortion(&j, &s.xhat, "X", model.require_dx()?)?,
        dz: map_distortion(&j, &s.zhat, "Z", model.require_dz()?)?,
    })
}

/// One-sided helper point. Under `Y - X - Z`: `r1 = I(Y;U|Z)`; under
/// `Y - Z - X`: `r1 = I(U;Y|X)`. In both cases `r = I(X;W|U,Z)` and
/// `d = E dx(X, x^(U,W,Z))`.
pub fn evaluate_helper(model: &SourceModel, s: &HelperScheme) -> Result<HelperPoint> {
    let j = joint_from_kernels(model.joint(), &[s.u.clone(), s.w.clone()])?;
    let r1 = match model.chain() {
        ChainDirection::Yxz => cmi(&j, &["Y"], &["U"], &["Z"])?,
        ChainDirection::Yzx => cmi(&j, &["U"], &["Y"], &["X"])?,
    };
    Ok(HelperPoint {
        r1,
        r: cmi(&j, &["X"], &["W"], &["U", "Z"])?,
        d: map_distortion(&j, &s.xhat, "X", model.require_dx()?)?,
    })
}

/// Helper point for a source satisfying `Y - Z - X`.
pub fn evaluate_yzx(model: &SourceModel, s: &HelperScheme) -> Result<HelperPoint> {
    if model.chain() != ChainDirection::Yzx {
        return Err(Error::ChainViolated {
            chain: "Y-Z-X".into(),
            cmi: f64::NAN,
        });
    }
    evaluate_helper(model, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{binary_entropy, conditional_entropy, Kernel, Var};
    use approx::assert_abs_diff_eq;

    fn identity_scheme(m: &SourceModel) -> AuxScheme {
        let (u, v, w) = (Var::new("U", 2), Var::new("V", 2), Var::new("W", 2));
        AuxScheme::with_optimal_reconstruction(
            m,
            Kernel::deterministic(vec![m.var("Y").unwrap()], u.clone(), |t| t[0]).unwrap(),
            Kernel::deterministic(vec![u.clone(), m.var("Z").unwrap()], v.clone(), |t| t[1]).unwrap(),
            Kernel::deterministic(vec![u, v, m.var("X").unwrap()], w, |t| t[2]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn copy_source_is_free() {
        let m = SourceModel::copy_source(0.2).unwrap();
        let one = |n: &str| Var::new(n, 1);
        let s = AuxScheme::new(
            &m,
            Kernel::constant(vec![m.var("Y").unwrap()], one("U")).unwrap(),
            Kernel::constant(vec![one("U"), m.var("Z").unwrap()], one("V")).unwrap(),
            Kernel::constant(vec![one("U"), one("V"), m.var("X").unwrap()], one("W")).unwrap(),
            ReconMap::from_fn(vec![one("U"), one("V"), m.var("X").unwrap()], 2, |t| t[2]).unwrap(),
            ReconMap::from_fn(vec![one("U"), one("W"), m.var("Z").unwrap()], 2, |t| t[2]).unwrap(),
        )
        .unwrap();
        assert_eq!(evaluate_rate_point(&m, &s).unwrap(), RatePoint::default());
    }

    #[test]
    fn independent_helper_costs_nothing() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let (u, v, w) = (Var::new("U", 3), Var::new("V", 2), Var::new("W", 2));
        let s = AuxScheme::with_optimal_reconstruction(
            &m,
            Kernel::from_fn(vec![m.var("Y").unwrap()], u.clone(), |_| vec![0.2, 0.3, 0.5]).unwrap(),
            Kernel::from_fn(vec![u.clone(), m.var("Z").unwrap()], v.clone(), |t| {
                if t[1] == 0 { vec![0.7, 0.3] } else { vec![0.1, 0.9] }
            })
            .unwrap(),
            Kernel::from_fn(vec![u, v, m.var("X").unwrap()], w, |t| {
                if t[2] == 0 { vec![0.8, 0.2] } else { vec![0.3, 0.7] }
            })
            .unwrap(),
        )
        .unwrap();
        assert_eq!(evaluate_rate_point(&m, &s).unwrap().r1, 0.0);
    }

    #[test]
    fn identity_kernels_on_binary_instance() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let s = identity_scheme(&m);
        let p = evaluate_rate_point(&m, &s).unwrap();
        let j = m.joint();
        assert_abs_diff_eq!(p.r1, conditional_entropy(j, &["Y"], &["Z"]).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(p.r2, binary_entropy(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(p.r3, conditional_entropy(j, &["X"], &["Y", "Z"]).unwrap(), epsilon = 1e-12);
        assert_eq!((p.dx, p.dz), (0.0, 0.0));
    }

    #[test]
    fn reconstruction_cases() {
        let x = Var::new("X", 2);
        let j = joint_from_kernels(
            &JointPmf::new(vec![x.clone()], vec![0.7, 0.3]).unwrap(),
            &[
                Kernel::deterministic(vec![x.clone()], Var::new("C", 2), |t| t[0]).unwrap(),
                Kernel::new(vec![x], Var::new("N", 2), vec![0.5, 0.5, 0.5, 0.5]).unwrap(),
            ],
        )
        .unwrap();
        let d = DistortionMeasure::hamming(2);
        let (map, dist) = optimal_reconstruction(&j, &["C"], "X", &d).unwrap();
        assert_eq!(map.table(), &[0, 1]);
        assert_eq!(dist, 0.0);
        let (map, dist) = optimal_reconstruction(&j, &["N"], "X", &d).unwrap();
        assert_eq!(map.table(), &[0, 0]);
        assert_abs_diff_eq!(dist, 0.3, epsilon = 1e-15);
        assert!(optimal_reconstruction(&j, &["Q"], "X", &d).is_err());
    }

    #[test]
    fn squared_error_map_beats_every_map() {
        // 4-letter source observed through a noisy channel, 3-letter recon grid.
        let x = Var::new("X", 4);
        let o = Var::new("O", 3);
        let base = JointPmf::new(vec![x.clone()], vec![0.1, 0.4, 0.3, 0.2]).unwrap();
        let ch = Kernel::from_fn(vec![x], o, |t| match t[0] {
            0 => vec![0.8, 0.15, 0.05],
            1 => vec![0.3, 0.5, 0.2],
            2 => vec![0.1, 0.3, 0.6],
            _ => vec![0.05, 0.15, 0.8],
        })
        .unwrap();
        let j = base.extend(&ch).unwrap();
        let d = DistortionMeasure::squared_error(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.5, 3.0]).unwrap();
        let (map, best) = optimal_reconstruction(&j, &["O"], "X", &d).unwrap();
        let mut exhaustive = f64::INFINITY;
        let mut arg = vec![];
        for code in 0..27usize {
            let table = vec![code % 3, (code / 3) % 3, code / 9];
            let m = ReconMap::new(vec![Var::new("O", 3)], 3, table.clone()).unwrap();
            let v = map_distortion(&j, &m, "X", &d).unwrap();
            if v < exhaustive - 1e-15 {
                exhaustive = v;
                arg = table;
            }
        }
        assert_abs_diff_eq!(best, exhaustive, epsilon = 1e-12);
        assert_eq!(map.table(), arg.as_slice());
    }

    #[test]
    fn yzx_degenerate_cases() {
        let m = SourceModel::binary_yzx(0.2, 0.1).unwrap();
        let u1 = Var::new("U", 1);
        let w = Var::new("W", 2);
        let s = HelperScheme::with_optimal_reconstruction(
            &m,
            Kernel::constant(vec![m.var("Y").unwrap()], u1.clone()).unwrap(),
            Kernel::deterministic(vec![u1, m.var("X").unwrap()], w, |t| t[1]).unwrap(),
        )
        .unwrap();
        let p = evaluate_yzx(&m, &s).unwrap();
        assert_eq!(p.r1, 0.0);
        assert_eq!(p.d, 0.0);
        assert_abs_diff_eq!(p.r, binary_entropy(0.1), epsilon = 1e-12);
        let yxz = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        assert!(evaluate_yzx(&yxz, &s).is_err());
    }
}
