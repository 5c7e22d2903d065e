use crate::distortion::DistortionMeasure;
use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information, joint_from_kernels, JointPmf, Kernel, Var};

use super::CHAIN_TOL;

/// Which Markov chain the source triple satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChainDirection {
    /// `Y - X - Z`: the helper is a degraded view of user X's source.
    Yxz,
    /// `Y - Z - X`: the helper is a degraded view of the side information.
    Yzx,
}

impl ChainDirection {
    pub fn label(self) -> &'static str {
        match self {
            ChainDirection::Yxz => "Y-X-Z",
            ChainDirection::Yzx => "Y-Z-X",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match norm.to_ascii_uppercase().as_str() {
            "Y-X-Z" | "Z-X-Y" => Ok(ChainDirection::Yxz),
            "Y-Z-X" | "X-Z-Y" => Ok(ChainDirection::Yzx),
            _ => Err(Error::InvalidArgument(format!(
                "unknown chain `{s}` (expected Y-X-Z or Y-Z-X)"
            ))),
        }
    }
}

/// A source triple `(X, Y, Z)` with its declared chain and distortion
/// measures for `X` (decoded at user Z) and `Z` (decoded at user X).
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    joint: JointPmf,
    chain: ChainDirection,
    dx: Option<DistortionMeasure>,
    dz: Option<DistortionMeasure>,
}

impl SourceModel {
    /// `joint` must be over exactly the variables `X`, `Y`, `Z` (any order).
    pub fn new(
        joint: JointPmf,
        chain: ChainDirection,
        dx: Option<DistortionMeasure>,
        dz: Option<DistortionMeasure>,
    ) -> Result<Self> {
        if joint.vars().len() != 3 {
            return Err(Error::AlphabetMismatch(
                "source model needs exactly the variables X, Y, Z".into(),
            ));
        }
        let joint = joint.marginal(&["X", "Y", "Z"])?;
        let (a, b, c) = match chain {
            ChainDirection::Yxz => ("Y", "X", "Z"),
            ChainDirection::Yzx => ("Y", "Z", "X"),
        };
        let cmi = conditional_mutual_information(&joint, &[a], &[c], &[b])?;
        if cmi > CHAIN_TOL {
            return Err(Error::ChainViolated {
                chain: chain.label().into(),
                cmi,
            });
        }
        let model = Self {
            joint,
            chain,
            dx,
            dz,
        };
        if let Some(d) = &model.dx {
            if d.source_card() != model.card_x() {
                return Err(Error::AlphabetMismatch(format!(
                    "dx has {} source rows, |X| = {}",
                    d.source_card(),
                    model.card_x()
                )));
            }
        }
        if let Some(d) = &model.dz {
            if d.source_card() != model.card_z() {
                return Err(Error::AlphabetMismatch(format!(
                    "dz has {} source rows, |Z| = {}",
                    d.source_card(),
                    model.card_z()
                )));
            }
        }
        Ok(model)
    }

    /// `X ~ Bern(p1)`, `Y = X xor Bern(py)`, `Z = X xor Bern(pz)`, Hamming
    /// distortion on both sides.
    pub fn binary_yxz(p1: f64, py: f64, pz: f64) -> Result<Self> {
        let x = Var::new("X", 2);
        let base = JointPmf::new(vec![x.clone()], vec![1.0 - p1, p1])?;
        let j = joint_from_kernels(
            &base,
            &[
                Kernel::bsc(x.clone(), Var::new("Y", 2), py)?,
                Kernel::bsc(x, Var::new("Z", 2), pz)?,
            ],
        )?;
        Self::new(
            j,
            ChainDirection::Yxz,
            Some(DistortionMeasure::hamming(2)),
            Some(DistortionMeasure::hamming(2)),
        )
    }

    /// Uniform binary `X`, `Y` and `Z` both noisy copies of `X`.
    pub fn binary_symmetric(py: f64, pz: f64) -> Result<Self> {
        Self::binary_yxz(0.5, py, pz)
    }

    /// `Z ~ Bern(1/2)`, `Y = Z xor Bern(py)`, `X = Z xor Bern(px)`.
    pub fn binary_yzx(py: f64, px: f64) -> Result<Self> {
        let z = Var::new("Z", 2);
        let base = JointPmf::uniform(vec![z.clone()])?;
        let j = joint_from_kernels(
            &base,
            &[
                Kernel::bsc(z.clone(), Var::new("Y", 2), py)?,
                Kernel::bsc(z, Var::new("X", 2), px)?,
            ],
        )?;
        Self::new(
            j,
            ChainDirection::Yzx,
            Some(DistortionMeasure::hamming(2)),
            Some(DistortionMeasure::hamming(2)),
        )
    }

    /// Uniform binary `X = Z`, helper `Y = X xor Bern(py)`.
    pub fn copy_source(py: f64) -> Result<Self> {
        let x = Var::new("X", 2);
        let base = JointPmf::uniform(vec![x.clone()])?;
        let j = joint_from_kernels(
            &base,
            &[
                Kernel::bsc(x.clone(), Var::new("Y", 2), py)?,
                Kernel::deterministic(vec![x], Var::new("Z", 2), |t| t[0])?,
            ],
        )?;
        Self::new(
            j,
            ChainDirection::Yxz,
            Some(DistortionMeasure::hamming(2)),
            Some(DistortionMeasure::hamming(2)),
        )
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    /// `p(x, y, z)` row-major in the order `X, Y, Z`.
    pub fn pxyz(&self) -> &[f64] {
        self.joint.probs()
    }

    pub fn chain(&self) -> ChainDirection {
        self.chain
    }

    pub fn dx(&self) -> Option<&DistortionMeasure> {
        self.dx.as_ref()
    }

    pub fn dz(&self) -> Option<&DistortionMeasure> {
        self.dz.as_ref()
    }

    pub fn require_dx(&self) -> Result<&DistortionMeasure> {
        self.dx.as_ref().ok_or(Error::MissingDistortion("dx"))
    }

    pub fn require_dz(&self) -> Result<&DistortionMeasure> {
        self.dz.as_ref().ok_or(Error::MissingDistortion("dz"))
    }

    pub fn card_x(&self) -> usize {
        self.joint.vars()[0].card
    }

    pub fn card_y(&self) -> usize {
        self.joint.vars()[1].card
    }

    pub fn card_z(&self) -> usize {
        self.joint.vars()[2].card
    }

    pub fn var(&self, name: &str) -> Result<Var> {
        self.joint.var(name).cloned()
    }

    fn marginal_of(&self, name: &str) -> Vec<f64> {
        self.joint
            .marginal(&[name])
            .expect("canonical variable")
            .probs()
            .to_vec()
    }

    /// Smallest achievable `E dx` even when the decoder learns everything.
    pub fn dx_floor(&self) -> Result<f64> {
        Ok(self.require_dx()?.full_information_floor(&self.marginal_of("X")))
    }

    pub fn dz_floor(&self) -> Result<f64> {
        Ok(self.require_dz()?.full_information_floor(&self.marginal_of("Z")))
    }

    pub(crate) fn check_dx_target(&self, target: f64) -> Result<()> {
        let floor = self.dx_floor()?;
        if target.is_nan() || target < floor - 1e-12 {
            return Err(Error::Infeasible {
                which: "dx",
                target,
                floor,
            });
        }
        Ok(())
    }

    pub(crate) fn check_dz_target(&self, target: f64) -> Result<()> {
        let floor = self.dz_floor()?;
        if target.is_nan() || target < floor - 1e-12 {
            return Err(Error::Infeasible {
                which: "dz",
                target,
                floor,
            });
        }
        Ok(())
    }
}
