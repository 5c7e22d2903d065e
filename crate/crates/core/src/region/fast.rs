//! Dense evaluator for the two-way region used inside the search loop.
//!
//! Works on raw row-major kernel arrays and skips zero-probability cells, so
//! cost scales with the symbols a scheme actually uses rather than with the
//! cardinality bounds. Checked against the explicit-joint route in tests.

use crate::distortion::DistortionMeasure;

use super::eval::{argmin_cost, RatePoint};
use super::model::SourceModel;

#[inline]
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn row_entropy(row: &[f64]) -> f64 {
    row.iter().map(|&p| plogp(p)).sum()
}

/// Kernel layout: `pu[y][u]`, `pv[(u, z)][v]`, `pw[(u, v, x)][w]`.
pub(crate) struct DenseTwoWay<'a> {
    pxyz: &'a [f64],
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub nu: usize,
    pub nv: usize,
    pub nw: usize,
    dx: &'a DistortionMeasure,
    dz: Option<&'a DistortionMeasure>,
}

impl<'a> DenseTwoWay<'a> {
    /// `dz = None` evaluates a one-sided scheme and reports `dz = 0`.
    pub fn new(
        model: &'a SourceModel,
        cards: (usize, usize, usize),
        dx: &'a DistortionMeasure,
        dz: Option<&'a DistortionMeasure>,
    ) -> Self {
        Self {
            pxyz: model.pxyz(),
            nx: model.card_x(),
            ny: model.card_y(),
            nz: model.card_z(),
            nu: cards.0,
            nv: cards.1,
            nw: cards.2,
            dx,
            dz,
        }
    }

    pub fn evaluate(&self, pu: &[f64], pv: &[f64], pw: &[f64]) -> RatePoint {
        self.run(pu, pv, pw, None)
    }

    /// Optimal `z^(u,v,x)` and `x^(u,w,z)` tables for the given kernels.
    pub fn reconstructions(&self, pu: &[f64], pv: &[f64], pw: &[f64]) -> (Vec<usize>, Vec<usize>) {
        let mut maps = (vec![0; self.nu * self.nv * self.nx], vec![0; self.nu * self.nw * self.nz]);
        self.run(pu, pv, pw, Some(&mut maps));
        maps
    }

    /// `q[(x, z, u)] = sum_y p(x,y,z) p(u|y)`.
    fn helper_joint(&self, pu: &[f64]) -> Vec<f64> {
        let (ny, nz, nu) = (self.ny, self.nz, self.nu);
        let mut q = vec![0.0; self.nx * nz * nu];
        for x in 0..self.nx {
            for y in 0..ny {
                let urow = &pu[y * nu..(y + 1) * nu];
                for z in 0..nz {
                    let p = self.pxyz[(x * ny + y) * nz + z];
                    if p == 0.0 {
                        continue;
                    }
                    let dst = &mut q[(x * nz + z) * nu..(x * nz + z + 1) * nu];
                    for (d, &pu) in dst.iter_mut().zip(urow) {
                        *d += p * pu;
                    }
                }
            }
        }
        q
    }

    /// `p(y)`: mass of each `p(u|y)` row.
    pub fn masses_u(&self) -> Vec<f64> {
        let mut py = vec![0.0; self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    py[y] += self.pxyz[(x * self.ny + y) * self.nz + z];
                }
            }
        }
        py
    }

    /// `p(u, z)`: mass of each `p(v|u,z)` row.
    pub fn masses_v(&self, pu: &[f64]) -> Vec<f64> {
        let q = self.helper_joint(pu);
        let mut m = vec![0.0; self.nu * self.nz];
        for x in 0..self.nx {
            for z in 0..self.nz {
                for u in 0..self.nu {
                    m[u * self.nz + z] += q[(x * self.nz + z) * self.nu + u];
                }
            }
        }
        m
    }

    /// `p(u, v, x)`: mass of each `p(w|u,v,x)` row.
    pub fn masses_w(&self, pu: &[f64], pv: &[f64]) -> Vec<f64> {
        let q = self.helper_joint(pu);
        let (nx, nz, nu, nv) = (self.nx, self.nz, self.nu, self.nv);
        let mut m = vec![0.0; nu * nv * nx];
        for x in 0..nx {
            for z in 0..nz {
                for u in 0..nu {
                    let qq = q[(x * nz + z) * nu + u];
                    if qq == 0.0 {
                        continue;
                    }
                    for v in 0..nv {
                        m[(u * nv + v) * nx + x] += qq * pv[(u * nz + z) * nv + v];
                    }
                }
            }
        }
        m
    }

    fn run(
        &self,
        pu: &[f64],
        pv: &[f64],
        pw: &[f64],
        mut maps: Option<&mut (Vec<usize>, Vec<usize>)>,
    ) -> RatePoint {
        let (nx, ny, nz, nu, nv, nw) = (self.nx, self.ny, self.nz, self.nu, self.nv, self.nw);
        let q = self.helper_joint(pu);

        // r1 = H(U|Z) - H(U|Y)
        let py = self.masses_u();
        let h_u_given_y: f64 = (0..ny).map(|y| py[y] * row_entropy(&pu[y * nu..(y + 1) * nu])).sum();
        let mut puz = vec![0.0; nu * nz];
        let mut pz = vec![0.0; nz];
        for x in 0..nx {
            for z in 0..nz {
                for u in 0..nu {
                    let v = q[(x * nz + z) * nu + u];
                    puz[u * nz + z] += v;
                    pz[z] += v;
                }
            }
        }
        let h_u_given_z = row_entropy(&puz) - row_entropy(&pz);
        let r1 = (h_u_given_z - h_u_given_y).max(0.0);

        // r2 = H(V|U,X) - H(V|U,Z)
        let h_v_given_uz: f64 = (0..nu * nz)
            .map(|r| puz[r] * row_entropy(&pv[r * nv..(r + 1) * nv]))
            .sum();
        let mut puxv = vec![0.0; nu * nx * nv];
        let mut pux = vec![0.0; nu * nx];
        for u in 0..nu {
            for x in 0..nx {
                for z in 0..nz {
                    let qq = q[(x * nz + z) * nu + u];
                    if qq == 0.0 {
                        continue;
                    }
                    pux[u * nx + x] += qq;
                    let vrow = &pv[(u * nz + z) * nv..(u * nz + z + 1) * nv];
                    for (v, &p) in vrow.iter().enumerate() {
                        puxv[(u * nx + x) * nv + v] += qq * p;
                    }
                }
            }
        }
        let r2 = (row_entropy(&puxv) - row_entropy(&pux) - h_v_given_uz).max(0.0);

        // r3 = H(W|U,V,Z) - H(W|U,V,X), plus both distortions.
        let mut h_w_given_uvx = 0.0;
        let mut h_uvzw = 0.0;
        let mut h_uvz = 0.0;
        let mut dz_total = 0.0;
        let mut s = vec![0.0; nu * nw * nz * nx];
        let mut m = vec![0.0; nz * nw];
        let mut pvz = vec![0.0; nz];
        let mut tz = vec![0.0; nz];
        let mut support: Vec<usize> = Vec::with_capacity(nw);
        for u in 0..nu {
            for v in 0..nv {
                m.iter_mut().for_each(|e| *e = 0.0);
                pvz.iter_mut().for_each(|e| *e = 0.0);
                for x in 0..nx {
                    let mass = puxv[(u * nx + x) * nv + v];
                    if mass == 0.0 {
                        if let Some(maps) = maps.as_deref_mut() {
                            maps.0[(u * nv + v) * nx + x] = 0;
                        }
                        continue;
                    }
                    let wrow = &pw[((u * nv + v) * nx + x) * nw..((u * nv + v) * nx + x + 1) * nw];
                    h_w_given_uvx += mass * row_entropy(wrow);
                    support.clear();
                    support.extend((0..nw).filter(|&w| wrow[w] > 0.0));
                    for z in 0..nz {
                        let t = q[(x * nz + z) * nu + u] * pv[(u * nz + z) * nv + v];
                        tz[z] = t;
                        if t == 0.0 {
                            continue;
                        }
                        pvz[z] += t;
                        for &w in &support {
                            let val = t * wrow[w];
                            m[z * nw + w] += val;
                            s[((u * nw + w) * nz + z) * nx + x] += val;
                        }
                    }
                    if let Some(dz) = self.dz {
                        let (best, cost) = argmin_cost(&tz, dz);
                        dz_total += cost;
                        if let Some(maps) = maps.as_deref_mut() {
                            maps.0[(u * nv + v) * nx + x] = best;
                        }
                    }
                }
                h_uvzw += row_entropy(&m);
                h_uvz += row_entropy(&pvz);
            }
        }
        let r3 = (h_uvzw - h_uvz - h_w_given_uvx).max(0.0);

        let mut dx_total = 0.0;
        for (cell, col) in s.chunks(nx).enumerate() {
            if col.iter().all(|&p| p == 0.0) {
                continue;
            }
            let (best, cost) = argmin_cost(col, self.dx);
            dx_total += cost;
            if let Some(maps) = maps.as_deref_mut() {
                maps.1[cell] = best;
            }
        }

        RatePoint {
            r1,
            r2,
            r3,
            dx: dx_total,
            dz: dz_total,
        }
    }
}
