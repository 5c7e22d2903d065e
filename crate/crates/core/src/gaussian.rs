//! Closed-form rates for the scalar Gaussian instance `X = Z + A`,
//! `Y = Z + A + B` with independent zero-mean `A`, `B`, `Z` and squared-error
//! distortion.
//!
//! Rates clamp at 0. A zero distortion target is the lossless limit and
//! yields `f64::INFINITY` rather than an error.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Slack allowed on the smallest covariance eigenvalue.
pub const PSD_TOL: f64 = 1e-9;

/// Variances `(var_a, var_b, var_z)` of the independent components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSourceSpec {
    pub var_a: f64,
    pub var_b: f64,
    pub var_z: f64,
}

impl GaussianSourceSpec {
    pub fn new(var_a: f64, var_b: f64, var_z: f64) -> Result<Self> {
        let ok = |v: f64, strict: bool| v.is_finite() && (v > 0.0 || (!strict && v == 0.0));
        if !ok(var_a, true) || !ok(var_b, true) || !ok(var_z, false) {
            return Err(Error::InvalidArgument(format!(
                "variances must be finite with var_a, var_b > 0 and var_z >= 0 (got {var_a}, {var_b}, {var_z})"
            )));
        }
        Ok(Self { var_a, var_b, var_z })
    }

    /// `|d rx_min / d ry|` at `ry = 0`: how much of one helper bit reaches
    /// the `X` description.
    pub fn slope_bound(&self) -> f64 {
        self.var_a / (self.var_a + self.var_b)
    }
}

fn check_distortion(name: &str, d: f64) -> Result<()> {
    if d.is_nan() || d < 0.0 {
        return Err(Error::InvalidArgument(format!("{name} must be > 0 (got {d})")));
    }
    Ok(())
}

/// `max(0, 1/2 log2(residual / d))` with the `d = 0` lossless limit.
fn half_log_ratio(residual: f64, d: f64) -> f64 {
    if d == 0.0 {
        return if residual > 0.0 { f64::INFINITY } else { 0.0 };
    }
    (0.5 * (residual / d).log2()).max(0.0)
}

/// Minimum rate from user `Z` to user `X` at squared error `dz`. Does not
/// depend on the helper rate or on `var_b`.
pub fn rz_min(spec: &GaussianSourceSpec, dz: f64) -> Result<f64> {
    check_distortion("dz", dz)?;
    let residual = spec.var_a * spec.var_z / (spec.var_a + spec.var_z);
    Ok(half_log_ratio(residual, dz))
}

/// Minimum rate from user `X` to user `Z` at squared error `dx` when the
/// helper sends `ry` bits.
pub fn rx_min(spec: &GaussianSourceSpec, ry: f64, dx: f64) -> Result<f64> {
    if ry.is_nan() || ry < 0.0 {
        return Err(Error::InvalidArgument(format!("ry must be >= 0 (got {ry})")));
    }
    check_distortion("dx", dx)?;
    let (a, b) = (spec.var_a, spec.var_b);
    let residual = a * (b + a * (-2.0 * ry).exp2()) / (a + b);
    Ok(half_log_ratio(residual, dx))
}

/// Variance of the helper's quantization noise `D` in `V = Y + D` that spends
/// `r_prime` bits describing `Y` against side information `Z`.
pub fn helper_noise_from_rate(spec: &GaussianSourceSpec, r_prime: f64) -> Result<f64> {
    if r_prime.is_nan() || r_prime < 0.0 {
        return Err(Error::InvalidArgument(format!("r_prime must be >= 0 (got {r_prime})")));
    }
    if r_prime == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((spec.var_a + spec.var_b) / ((2.0 * r_prime).exp2() - 1.0))
}

/// Covariance of a jointly Gaussian vector over named scalar variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianJoint {
    names: Vec<String>,
    cov: DMatrix<f64>,
}

impl GaussianJoint {
    pub fn new(names: Vec<String>, cov: DMatrix<f64>) -> Result<Self> {
        let n = names.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::ShapeMismatch {
                what: "covariance".into(),
                expected: n * n,
                actual: cov.len(),
            });
        }
        for (i, v) in names.iter().enumerate() {
            if names[..i].contains(v) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("covariance has non-finite entries".into()));
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > PSD_TOL * scale {
            return Err(Error::InvalidArgument("covariance is not symmetric".into()));
        }
        let min_eig = SymmetricEigen::new(cov.clone()).eigenvalues.min();
        if min_eig < -PSD_TOL * scale {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(Self { names, cov })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Linear-MMSE residual `Var(target | given)` by Schur complement. A
    /// singular conditioning block is handled with the pseudo-inverse.
    pub fn conditional_variance(&self, target: &str, given: &[&str]) -> Result<f64> {
        let t = self.index(target)?;
        let g = given.iter().map(|v| self.index(v)).collect::<Result<Vec<_>>>()?;
        if g.contains(&t) {
            return Ok(0.0);
        }
        if g.is_empty() {
            return Ok(self.cov[(t, t)]);
        }
        let k = g.len();
        let sgg = DMatrix::from_fn(k, k, |i, j| self.cov[(g[i], g[j])]);
        let stg = DMatrix::from_fn(1, k, |_, j| self.cov[(t, g[j])]);
        let eps = 1e-12 * sgg.amax().max(1e-300);
        let pinv = sgg
            .svd(true, true)
            .pseudo_inverse(eps)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let explained = (&stg * pinv * stg.transpose())[(0, 0)];
        Ok((self.cov[(t, t)] - explained).max(0.0))
    }
}

/// Rate for describing `X` at squared error `d` when `W` is known at both
/// ends and `Z` only at the decoder. `j` must contain `X`, `W` and `Z`.
pub fn wz_with_encoder_side_info(j: &GaussianJoint, d: f64) -> Result<f64> {
    check_distortion("d", d)?;
    let residual = j.conditional_variance("X", &["W", "Z"])?;
    Ok(half_log_ratio(residual, d))
}

/// Covariance of `(X, W, Z)` where `W = Y + D` is the helper's description
/// with noise variance `var_d`. An infinite `var_d` gives a `W` carrying no
/// information, represented by a degenerate zero-variance row.
pub fn helper_description_joint(spec: &GaussianSourceSpec, var_d: f64) -> Result<GaussianJoint> {
    let (a, b, z) = (spec.var_a, spec.var_b, spec.var_z);
    let cov = if var_d.is_infinite() {
        DMatrix::from_row_slice(3, 3, &[a + z, 0.0, z, 0.0, 0.0, 0.0, z, 0.0, z])
    } else {
        // Normalize W by its standard deviation to keep the matrix well scaled.
        let s = (a + b + z + var_d).sqrt();
        DMatrix::from_row_slice(
            3,
            3,
            &[a + z, (a + z) / s, z, (a + z) / s, 1.0, z / s, z, z / s, z],
        )
    };
    GaussianJoint::new(vec!["X".into(), "W".into(), "Z".into()], cov)
}

/// The achievability chain: helper at rate `ry` fixes the noise of its
/// description, which is then used as common side information.
pub fn rx_via_helper_description(spec: &GaussianSourceSpec, ry: f64, dx: f64) -> Result<f64> {
    let var_d = helper_noise_from_rate(spec, ry)?;
    wz_with_encoder_side_info(&helper_description_joint(spec, var_d)?, dx)
}
