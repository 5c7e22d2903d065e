use crate::error::{Error, Result};
use crate::prob::{decode_index, encode_index, joint_from_kernels, Kernel, Var};

use super::eval::optimal_reconstruction;
use super::model::SourceModel;

/// A deterministic reconstruction function, tabulated over the row-major
/// tuples of its inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconMap {
    inputs: Vec<Var>,
    recon_card: usize,
    table: Vec<usize>,
}

impl ReconMap {
    pub fn new(inputs: Vec<Var>, recon_card: usize, table: Vec<usize>) -> Result<Self> {
        let expected: usize = inputs.iter().map(|v| v.card).product();
        if table.len() != expected {
            return Err(Error::ShapeMismatch {
                what: "reconstruction table".into(),
                expected,
                actual: table.len(),
            });
        }
        if let Some(&s) = table.iter().find(|&&s| s >= recon_card) {
            return Err(Error::AlphabetMismatch(format!(
                "reconstruction symbol {s} outside alphabet of size {recon_card}"
            )));
        }
        Ok(Self {
            inputs,
            recon_card,
            table,
        })
    }

    pub fn from_fn(inputs: Vec<Var>, recon_card: usize, mut f: impl FnMut(&[usize]) -> usize) -> Result<Self> {
        let cards: Vec<usize> = inputs.iter().map(|v| v.card).collect();
        let n: usize = cards.iter().product();
        let mut sym = vec![0; cards.len()];
        let table = (0..n)
            .map(|i| {
                decode_index(i, &cards, &mut sym);
                f(&sym)
            })
            .collect();
        Self::new(inputs, recon_card, table)
    }

    pub fn inputs(&self) -> &[Var] {
        &self.inputs
    }

    pub fn recon_card(&self) -> usize {
        self.recon_card
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn get(&self, symbols: &[usize]) -> usize {
        let cards: Vec<usize> = self.inputs.iter().map(|v| v.card).collect();
        self.table[encode_index(symbols, &cards)]
    }

    fn check_inputs(&self, names: &[&str], cards: &[usize]) -> Result<()> {
        let ok = self.inputs.len() == names.len()
            && self
                .inputs
                .iter()
                .zip(names.iter().zip(cards))
                .all(|(v, (n, c))| v.name == *n && v.card == *c);
        if !ok {
            return Err(Error::AlphabetMismatch(format!(
                "reconstruction must be a function of ({})",
                names.join(",")
            )));
        }
        Ok(())
    }
}

fn check_kernel(k: &Kernel, from: &[(&str, usize)], to: &str) -> Result<()> {
    let ok = k.to_var().name == to
        && k.from_vars().len() == from.len()
        && k
            .from_vars()
            .iter()
            .zip(from)
            .all(|(v, (n, c))| v.name == *n && v.card == *c);
    if !ok {
        let args: Vec<String> = from.iter().map(|(n, c)| format!("{n}[{c}]")).collect();
        return Err(Error::AlphabetMismatch(format!(
            "expected kernel p({to} | {})",
            args.join(",")
        )));
    }
    Ok(())
}

/// One candidate point of the two-way region: kernels `p(u|y)`, `p(v|u,z)`,
/// `p(w|u,v,x)` plus the two reconstruction maps.
///
/// Kernel conditioning lists must be exactly `[Y]`, `[U, Z]` and
/// `[U, V, X]`; the maps take `(U, V, X)` for `z^` and `(U, W, Z)` for `x^`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxScheme {
    pub(crate) u: Kernel,
    pub(crate) v: Kernel,
    pub(crate) w: Kernel,
    pub(crate) zhat: ReconMap,
    pub(crate) xhat: ReconMap,
}

impl AuxScheme {
    pub fn new(
        model: &SourceModel,
        u: Kernel,
        v: Kernel,
        w: Kernel,
        zhat: ReconMap,
        xhat: ReconMap,
    ) -> Result<Self> {
        Self::check_kernels(model, &u, &v, &w)?;
        let (nu, nv, nw) = (u.to_var().card, v.to_var().card, w.to_var().card);
        zhat.check_inputs(&["U", "V", "X"], &[nu, nv, model.card_x()])?;
        xhat.check_inputs(&["U", "W", "Z"], &[nu, nw, model.card_z()])?;
        if zhat.recon_card != model.require_dz()?.recon_card()
            || xhat.recon_card != model.require_dx()?.recon_card()
        {
            return Err(Error::AlphabetMismatch(
                "reconstruction alphabet differs from the distortion measure".into(),
            ));
        }
        Ok(Self { u, v, w, zhat, xhat })
    }

    fn check_kernels(model: &SourceModel, u: &Kernel, v: &Kernel, w: &Kernel) -> Result<()> {
        let (nu, nv) = (u.to_var().card, v.to_var().card);
        check_kernel(u, &[("Y", model.card_y())], "U")?;
        check_kernel(v, &[("U", nu), ("Z", model.card_z())], "V")?;
        check_kernel(w, &[("U", nu), ("V", nv), ("X", model.card_x())], "W")
    }

    /// Complete the kernels with the distortion-minimizing reconstructions.
    pub fn with_optimal_reconstruction(model: &SourceModel, u: Kernel, v: Kernel, w: Kernel) -> Result<Self> {
        Self::check_kernels(model, &u, &v, &w)?;
        let j = joint_from_kernels(model.joint(), &[u.clone(), v.clone(), w.clone()])?;
        let (zhat, _) = optimal_reconstruction(&j, &["U", "V", "X"], "Z", model.require_dz()?)?;
        let (xhat, _) = optimal_reconstruction(&j, &["U", "W", "Z"], "X", model.require_dx()?)?;
        Ok(Self { u, v, w, zhat, xhat })
    }

    /// Singleton `U`, `V`, `W` with the best constant reconstructions.
    pub fn trivial(model: &SourceModel) -> Result<Self> {
        let one = |n: &str| Var::new(n, 1);
        Self::with_optimal_reconstruction(
            model,
            Kernel::constant(vec![model.var("Y")?], one("U"))?,
            Kernel::constant(vec![one("U"), model.var("Z")?], one("V"))?,
            Kernel::constant(vec![one("U"), one("V"), model.var("X")?], one("W"))?,
        )
    }

    pub fn kernels(&self) -> [&Kernel; 3] {
        [&self.u, &self.v, &self.w]
    }

    pub fn zhat(&self) -> &ReconMap {
        &self.zhat
    }

    pub fn xhat(&self) -> &ReconMap {
        &self.xhat
    }

    /// `(|U|, |V|, |W|)`.
    pub fn cards(&self) -> (usize, usize, usize) {
        (self.u.to_var().card, self.v.to_var().card, self.w.to_var().card)
    }
}

/// One candidate point of a one-sided helper region: `p(u|y)`, the
/// encoder kernel `p(w|u,x)` and the decoder map `x^(U,W,Z)`.
///
/// The same shape serves both chain directions; only the rate formulas
/// differ.
#[derive(Debug, Clone, PartialEq)]
pub struct HelperScheme {
    pub(crate) u: Kernel,
    pub(crate) w: Kernel,
    pub(crate) xhat: ReconMap,
}

impl HelperScheme {
    pub fn new(model: &SourceModel, u: Kernel, w: Kernel, xhat: ReconMap) -> Result<Self> {
        Self::check_kernels(model, &u, &w)?;
        let (nu, nw) = (u.to_var().card, w.to_var().card);
        xhat.check_inputs(&["U", "W", "Z"], &[nu, nw, model.card_z()])?;
        if xhat.recon_card != model.require_dx()?.recon_card() {
            return Err(Error::AlphabetMismatch(
                "reconstruction alphabet differs from the distortion measure".into(),
            ));
        }
        Ok(Self { u, w, xhat })
    }

    fn check_kernels(model: &SourceModel, u: &Kernel, w: &Kernel) -> Result<()> {
        check_kernel(u, &[("Y", model.card_y())], "U")?;
        check_kernel(w, &[("U", u.to_var().card), ("X", model.card_x())], "W")
    }

    pub fn with_optimal_reconstruction(model: &SourceModel, u: Kernel, w: Kernel) -> Result<Self> {
        Self::check_kernels(model, &u, &w)?;
        let j = joint_from_kernels(model.joint(), &[u.clone(), w.clone()])?;
        let (xhat, _) = optimal_reconstruction(&j, &["U", "W", "Z"], "X", model.require_dx()?)?;
        Ok(Self { u, w, xhat })
    }

    pub fn u(&self) -> &Kernel {
        &self.u
    }

    pub fn w(&self) -> &Kernel {
        &self.w
    }

    pub fn xhat(&self) -> &ReconMap {
        &self.xhat
    }

    pub fn cards(&self) -> (usize, usize) {
        (self.u.to_var().card, self.w.to_var().card)
    }
}
