//! Exhaustive one-sided helper frontier over a quantized kernel space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information as cmi, JointPmf, Var};
use crate::region::{ChainDirection, SourceModel};

use super::lattice::{composition_count, simplex_lattice};

/// Default limit on the number of evaluated candidates.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// Quantized helper kernels `p(u|y)` and `p(w|u,x)`: every row is drawn
/// from the simplex lattice with `levels` points per unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizedKernelSpace {
    pub levels: usize,
    pub u_card: usize,
    pub w_card: usize,
    pub cap: u64,
}

impl QuantizedKernelSpace {
    pub fn new(levels: usize, u_card: usize, w_card: usize) -> Self {
        Self {
            levels,
            u_card,
            w_card,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    /// Number of candidates for a source with the given `|X|`, `|Y|`.
    pub fn size(&self, card_x: usize, card_y: usize) -> f64 {
        let t = self.levels.saturating_sub(1);
        composition_count(t, self.u_card).powi(card_y as i32)
            * composition_count(t, self.w_card).powi((self.u_card * card_x) as i32)
    }
}

/// One Pareto-minimal point: helper rate, encoder rate, distortion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePoint {
    pub r1: f64,
    pub r: f64,
    pub dx: f64,
}

/// Pareto-minimal `(r1, r)` points with `E dx <= d`, sorted by `r1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFrontier {
    pub points: Vec<OraclePoint>,
    /// Candidates evaluated.
    pub evaluated: u64,
}

impl OracleFrontier {
    /// Least `r` reachable at helper rate `<= cap` by time-sharing between
    /// oracle points (lower convex envelope), or `None` below the first
    /// point.
    pub fn value_at(&self, cap: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut take = |v: f64| best = Some(best.map_or(v, |b: f64| b.min(v)));
        for (i, a) in self.points.iter().enumerate() {
            if a.r1 > cap {
                continue;
            }
            take(a.r);
            for b in &self.points[i + 1..] {
                if b.r1 > cap {
                    let t = (cap - a.r1) / (b.r1 - a.r1);
                    take(a.r + t * (b.r - a.r));
                }
            }
        }
        best
    }
}

/// Keep the points not dominated in `(r1, r)`; ties go to the smaller
/// distortion. Output sorted by increasing `r1`.
pub(crate) fn pareto(mut pts: Vec<OraclePoint>) -> Vec<OraclePoint> {
    pts.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r.total_cmp(&b.r)).then(a.dx.total_cmp(&b.dx)));
    let mut out: Vec<OraclePoint> = Vec::new();
    for p in pts {
        match out.last() {
            // Equal helper rate up to rounding noise: keep the cheaper one.
            Some(l) if p.r1 - l.r1 <= 1e-12 => {
                if p.r < l.r {
                    out.pop();
                    out.push(p);
                }
            }
            Some(l) if p.r >= l.r => {}
            _ => out.push(p),
        }
    }
    out
}

/// Enumerate every quantized helper scheme, reconstruct optimally, and
/// return the Pareto set of `(r1, r)` among schemes meeting `E dx <= d`.
/// `r1` follows the model's chain: `I(Y;U|Z)` or `I(U;Y|X)`.
pub fn exhaustive_frontier(model: &SourceModel, d: f64, space: &QuantizedKernelSpace) -> Result<OracleFrontier> {
    if space.levels < 2 || space.u_card == 0 || space.w_card == 0 {
        return Err(Error::InvalidArgument(
            "oracle needs levels >= 2 and nonempty auxiliary alphabets".into(),
        ));
    }
    let dxm = model.require_dx()?.clone();
    let (nx, ny, nz) = (model.card_x(), model.card_y(), model.card_z());
    let size = space.size(nx, ny);
    if size > space.cap as f64 {
        return Err(Error::EnumerationCap { size, cap: space.cap });
    }
    let (nu, nw) = (space.u_card, space.w_card);
    let u_rows = simplex_lattice(space.levels, nu);
    let w_rows = simplex_lattice(space.levels, nw);
    let pu_count = u_rows.len().pow(ny as u32);
    let pw_rows = nu * nx;
    let pw_count = w_rows.len().pow(pw_rows as u32);
    let pxyz = model.pxyz();

    let per_pu: Vec<Option<OraclePoint>> = (0..pu_count)
        .into_par_iter()
        .map(|pu_index| -> Result<Option<OraclePoint>> {
            let pu = odometer(pu_index, u_rows.len(), ny);
            // p(x,y,z,u) as an explicit joint, for r1.
            let vars = vec![
                Var::new("X", nx),
                Var::new("Y", ny),
                Var::new("Z", nz),
                Var::new("U", nu),
            ];
            let joint = JointPmf::from_fn(vars, |s| {
                pxyz[(s[0] * ny + s[1]) * nz + s[2]] * u_rows[pu[s[1]]][s[3]]
            })?;
            let r1 = match model.chain() {
                ChainDirection::Yxz => cmi(&joint, &["Y"], &["U"], &["Z"])?,
                ChainDirection::Yzx => cmi(&joint, &["U"], &["Y"], &["X"])?,
            };
            // q[(u,x,z)]
            let q = joint.marginal(&["U", "X", "Z"])?.probs().to_vec();
            let mut best: Option<OraclePoint> = None;
            let mut puxzw = vec![0.0; nu * nx * nz * nw];
            for pw_index in 0..pw_count {
                let pw = odometer(pw_index, w_rows.len(), pw_rows);
                for u in 0..nu {
                    for x in 0..nx {
                        let row = &w_rows[pw[u * nx + x]];
                        for z in 0..nz {
                            let m = q[(u * nx + x) * nz + z];
                            for w in 0..nw {
                                puxzw[((u * nx + x) * nz + z) * nw + w] = m * row[w];
                            }
                        }
                    }
                }
                let (r, dx) = rate_and_distortion(&puxzw, &q, (nu, nx, nz, nw), &dxm);
                if dx <= d && best.is_none_or(|b| r < b.r || (r == b.r && dx < b.dx)) {
                    best = Some(OraclePoint { r1, r, dx });
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(OracleFrontier {
        points: pareto(per_pu.into_iter().flatten().collect()),
        evaluated: (pu_count as u64).saturating_mul(pw_count as u64),
    })
}

/// Digits of `index` in base `base`, most significant first.
fn odometer(mut index: usize, base: usize, digits: usize) -> Vec<usize> {
    let mut out = vec![0; digits];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

/// `I(X;W|U,Z)` and the optimal `E dx(X, x^(U,W,Z))` from `p(u,x,z,w)`
/// and `p(u,x,z)`.
fn rate_and_distortion(
    p: &[f64],
    q: &[f64],
    (nu, nx, nz, nw): (usize, usize, usize, usize),
    dxm: &crate::DistortionMeasure,
) -> (f64, f64) {
    let mut rate = 0.0;
    let mut dist = 0.0;
    let at = |u: usize, x: usize, z: usize, w: usize| ((u * nx + x) * nz + z) * nw + w;
    let mut col = vec![0.0; nx];
    for u in 0..nu {
        for z in 0..nz {
            let puz: f64 = (0..nx).map(|x| q[(u * nx + x) * nz + z]).sum();
            for w in 0..nw {
                let mut puzw = 0.0;
                for x in 0..nx {
                    col[x] = p[at(u, x, z, w)];
                    puzw += col[x];
                }
                if puzw <= 0.0 {
                    continue;
                }
                for x in 0..nx {
                    let pj = col[x];
                    if pj > 0.0 {
                        let puxz = q[(u * nx + x) * nz + z];
                        rate += pj * (pj * puz / (puxz * puzw)).log2();
                    }
                }
                let mut cost = f64::INFINITY;
                for xh in 0..dxm.recon_card() {
                    let c: f64 = (0..nx).map(|x| col[x] * dxm.get(x, xh)).sum();
                    cost = cost.min(c);
                }
                dist += cost;
            }
        }
    }
    (rate.max(0.0), dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Kernel;
    use crate::region::{evaluate_helper, HelperScheme};

    #[test]
    fn copy_source_is_a_single_free_point() {
        let m = SourceModel::copy_source(0.3).unwrap();
        let f = exhaustive_frontier(&m, 0.0, &QuantizedKernelSpace::new(3, 1, 2)).unwrap();
        assert_eq!(f.points.len(), 1);
        assert!(f.points[0].r1.abs() < 1e-12 && f.points[0].r.abs() < 1e-12);
    }

    #[test]
    fn inner_loop_agrees_with_explicit_joint() {
        let m = SourceModel::binary_yxz(0.35, 0.15, 0.2).unwrap();
        let u = Kernel::bsc(m.var("Y").unwrap(), Var::new("U", 2), 0.25).unwrap();
        let uv = Var::new("U", 2);
        let w = Kernel::new(
            vec![uv, m.var("X").unwrap()],
            Var::new("W", 3),
            vec![0.5, 0.25, 0.25, 0.0, 0.75, 0.25, 1.0, 0.0, 0.0, 0.25, 0.25, 0.5],
        )
        .unwrap();
        let s = HelperScheme::with_optimal_reconstruction(&m, u.clone(), w.clone()).unwrap();
        let want = evaluate_helper(&m, &s).unwrap();
        let joint = crate::prob::joint_from_kernels(m.joint(), &[u, w]).unwrap();
        let p = joint.marginal(&["U", "X", "Z", "W"]).unwrap();
        let q = joint.marginal(&["U", "X", "Z"]).unwrap();
        let (r, d) = rate_and_distortion(p.probs(), q.probs(), (2, 2, 2, 3), m.require_dx().unwrap());
        assert!((r - want.r).abs() < 1e-12 && (d - want.d).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let m = SourceModel::binary_symmetric(0.2, 0.1).unwrap();
        let mut space = QuantizedKernelSpace::new(9, 2, 3);
        space.cap = 1000;
        assert!(matches!(exhaustive_frontier(&m, 0.05, &space), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn envelope_interpolates_between_points() {
        let f = OracleFrontier {
            points: vec![
                OraclePoint { r1: 0.0, r: 1.0, dx: 0.0 },
                OraclePoint { r1: 1.0, r: 0.0, dx: 0.0 },
            ],
            evaluated: 0,
        };
        assert_eq!(f.value_at(0.25), Some(0.75));
        assert_eq!(f.value_at(2.0), Some(0.0));
    }
}
