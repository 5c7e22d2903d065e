//! Exact finite-alphabet probability engine.
//!
//! A [`JointPmf`] is a dense row-major tensor over an ordered list of named
//! variables (the last variable varies fastest). A [`Kernel`] is a
//! conditional pmf `p(to | from)` stored as one row per conditioning tuple.
//! Joints are grown by multiplying in kernels ([`joint_from_kernels`]) and
//! queried through marginal entropies.
//!
//! All logarithms are base 2, so every information measure is in bits.
//! Inputs must already be normalized to within [`NORMALIZATION_TOL`]; nothing
//! is renormalized silently.

use crate::distortion::DistortionMeasure;
use crate::error::{Error, Result};

/// Tolerance on `sum == 1` for pmfs and kernel rows supplied by callers.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A named finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub card: usize,
}

impl Var {
    pub fn new(name: impl Into<String>, card: usize) -> Self {
        Self {
            name: name.into(),
            card,
        }
    }
}

fn check_vars(vars: &[Var]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        if v.card == 0 {
            return Err(Error::ZeroCardinality(v.name.clone()));
        }
        if vars[..i].iter().any(|o| o.name == v.name) {
            return Err(Error::DuplicateVariable(v.name.clone()));
        }
    }
    Ok(())
}

fn check_entries(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().find(|p| !p.is_finite() || **p < 0.0) {
        Some(&value) => Err(Error::InvalidProbability {
            what: what.to_string(),
            value,
        }),
        None => Ok(()),
    }
}

fn check_sum(what: &str, values: &[f64]) -> Result<()> {
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            what: what.to_string(),
            sum,
        });
    }
    Ok(())
}

/// Number of outcome tuples of a list of variables.
pub fn tuple_count(vars: &[Var]) -> usize {
    vars.iter().map(|v| v.card).product()
}

/// Decode a row-major flat index into per-variable symbols.
pub fn decode_index(mut index: usize, cards: &[usize], out: &mut [usize]) {
    for (slot, &card) in out.iter_mut().zip(cards).rev() {
        *slot = index % card;
        index /= card;
    }
}

/// Encode per-variable symbols into a row-major flat index.
pub fn encode_index(symbols: &[usize], cards: &[usize]) -> usize {
    symbols
        .iter()
        .zip(cards)
        .fold(0, |acc, (&s, &c)| acc * c + s)
}

fn row_major_strides(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * cards[i + 1];
    }
    strides
}

/// Walks every flat index of a tensor while tracking a secondary index into a
/// projected tensor. `contrib[j]` is the stride variable `j` contributes to
/// the secondary index (0 for summed-out variables).
fn for_each_projected(cards: &[usize], contrib: &[usize], mut f: impl FnMut(usize, usize)) {
    let total: usize = cards.iter().product();
    let mut digits = vec![0usize; cards.len()];
    let mut projected = 0usize;
    for flat in 0..total {
        f(flat, projected);
        for j in (0..cards.len()).rev() {
            digits[j] += 1;
            projected += contrib[j];
            if digits[j] < cards[j] {
                break;
            }
            projected -= contrib[j] * cards[j];
            digits[j] = 0;
        }
    }
}

/// A normalized joint distribution over named finite variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    vars: Vec<Var>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(vars: Vec<Var>, probs: Vec<f64>) -> Result<Self> {
        check_vars(&vars)?;
        let expected = tuple_count(&vars);
        if probs.len() != expected {
            return Err(Error::ShapeMismatch {
                what: "joint pmf".into(),
                expected,
                actual: probs.len(),
            });
        }
        check_entries("joint pmf", &probs)?;
        check_sum("joint pmf", &probs)?;
        Ok(Self { vars, probs })
    }

    pub fn uniform(vars: Vec<Var>) -> Result<Self> {
        check_vars(&vars)?;
        let n = tuple_count(&vars);
        Self::new(vars, vec![1.0 / n as f64; n])
    }

    /// Build a joint from a function of the outcome tuple. The values must
    /// already be normalized.
    pub fn from_fn(vars: Vec<Var>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_vars(&vars)?;
        let cards: Vec<usize> = vars.iter().map(|v| v.card).collect();
        let mut symbols = vec![0; cards.len()];
        let probs = (0..tuple_count(&vars))
            .map(|i| {
                decode_index(i, &cards, &mut symbols);
                f(&symbols)
            })
            .collect();
        Self::new(vars, probs)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cards(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.card).collect()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn var(&self, name: &str) -> Result<&Var> {
        Ok(&self.vars[self.position(name)?])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v.name == name)
    }

    /// Probability of one outcome tuple, in this joint's variable order.
    pub fn prob(&self, symbols: &[usize]) -> f64 {
        self.probs[encode_index(symbols, &self.cards())]
    }

    /// Marginal onto `keep`, with variables in the requested order. Passing
    /// every variable in a different order permutes the tensor.
    pub fn marginal(&self, keep: &[&str]) -> Result<JointPmf> {
        let mut positions = Vec::with_capacity(keep.len());
        for (i, name) in keep.iter().enumerate() {
            if keep[..i].contains(name) {
                return Err(Error::DuplicateVariable(name.to_string()));
            }
            positions.push(self.position(name)?);
        }
        let out_vars: Vec<Var> = positions.iter().map(|&p| self.vars[p].clone()).collect();
        let out_cards: Vec<usize> = out_vars.iter().map(|v| v.card).collect();
        let out_strides = row_major_strides(&out_cards);
        let mut contrib = vec![0usize; self.vars.len()];
        for (k, &p) in positions.iter().enumerate() {
            contrib[p] = out_strides[k];
        }
        let mut out = vec![0.0; tuple_count(&out_vars)];
        for_each_projected(&self.cards(), &contrib, |flat, proj| {
            out[proj] += self.probs[flat];
        });
        Ok(JointPmf {
            vars: out_vars,
            probs: out,
        })
    }

    /// Multiply in `p(kernel.to | kernel.from)`, appending the target variable.
    pub fn extend(&self, kernel: &Kernel) -> Result<JointPmf> {
        if self.contains(&kernel.to.name) {
            return Err(Error::DuplicateVariable(kernel.to.name.clone()));
        }
        let from_cards: Vec<usize> = kernel.from.iter().map(|v| v.card).collect();
        let from_strides = row_major_strides(&from_cards);
        let mut contrib = vec![0usize; self.vars.len()];
        for (k, v) in kernel.from.iter().enumerate() {
            let p = self.position(&v.name)?;
            if self.vars[p].card != v.card {
                return Err(Error::AlphabetMismatch(format!(
                    "kernel for `{}` expects |{}| = {}, joint has {}",
                    kernel.to.name, v.name, v.card, self.vars[p].card
                )));
            }
            contrib[p] = from_strides[k];
        }
        let tc = kernel.to.card;
        let mut probs = vec![0.0; self.probs.len() * tc];
        for_each_projected(&self.cards(), &contrib, |flat, row| {
            let p = self.probs[flat];
            if p == 0.0 {
                return;
            }
            let src = &kernel.rows[row * tc..(row + 1) * tc];
            for (dst, &q) in probs[flat * tc..(flat + 1) * tc].iter_mut().zip(src) {
                *dst = p * q;
            }
        });
        let mut vars = self.vars.clone();
        vars.push(kernel.to.clone());
        Ok(JointPmf { vars, probs })
    }

    /// Entropy of the marginal on `set`, in bits. The empty set has entropy 0.
    pub fn entropy_of(&self, set: &[&str]) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_bits(self.marginal(set)?.probs()))
    }
}

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Binary entropy function `h2(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

/// A conditional pmf `p(to | from)`, one row per conditioning tuple in
/// row-major order of `from`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    from: Vec<Var>,
    to: Var,
    rows: Vec<f64>,
}

impl Kernel {
    pub fn new(from: Vec<Var>, to: Var, rows: Vec<f64>) -> Result<Self> {
        let mut all = from.clone();
        all.push(to.clone());
        check_vars(&all)?;
        let expected = tuple_count(&from) * to.card;
        let what = format!("kernel p({}|..)", to.name);
        if rows.len() != expected {
            return Err(Error::ShapeMismatch {
                what,
                expected,
                actual: rows.len(),
            });
        }
        check_entries(&what, &rows)?;
        for row in rows.chunks(to.card) {
            check_sum(&what, row)?;
        }
        Ok(Self { from, to, rows })
    }

    /// Build a kernel from a function returning the row for each
    /// conditioning tuple.
    pub fn from_fn(from: Vec<Var>, to: Var, mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Result<Self> {
        let cards: Vec<usize> = from.iter().map(|v| v.card).collect();
        let mut symbols = vec![0; cards.len()];
        let mut rows = Vec::with_capacity(tuple_count(&from) * to.card);
        for i in 0..tuple_count(&from) {
            decode_index(i, &cards, &mut symbols);
            rows.extend(f(&symbols));
        }
        Self::new(from, to, rows)
    }

    /// A kernel that puts all mass on `f(tuple)`.
    pub fn deterministic(from: Vec<Var>, to: Var, mut f: impl FnMut(&[usize]) -> usize) -> Result<Self> {
        let card = to.card;
        Self::from_fn(from, to, |t| {
            let mut row = vec![0.0; card];
            let s = f(t);
            if s < card {
                row[s] = 1.0;
            }
            row
        })
    }

    /// The degenerate kernel sending every tuple to symbol 0.
    pub fn constant(from: Vec<Var>, to: Var) -> Result<Self> {
        Self::deterministic(from, to, |_| 0)
    }

    /// Binary symmetric channel `to = from xor Bern(p)`.
    pub fn bsc(from: Var, to: Var, p: f64) -> Result<Self> {
        if from.card != 2 || to.card != 2 {
            return Err(Error::InvalidArgument("BSC needs binary alphabets".into()));
        }
        Self::new(vec![from], to, vec![1.0 - p, p, p, 1.0 - p])
    }

    pub fn from_vars(&self) -> &[Var] {
        &self.from
    }

    pub fn to_var(&self) -> &Var {
        &self.to
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        tuple_count(&self.from)
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.rows[index * self.to.card..(index + 1) * self.to.card]
    }
}

/// Multiply `kernels` into `base` in order.
pub fn joint_from_kernels(base: &JointPmf, kernels: &[Kernel]) -> Result<JointPmf> {
    kernels.iter().try_fold(base.clone(), |j, k| j.extend(k))
}

/// Marginal of `j` onto `keep` (variables in the requested order).
pub fn marginalize(j: &JointPmf, keep: &[&str]) -> Result<JointPmf> {
    j.marginal(keep)
}

fn check_disjoint(sets: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for set in sets {
        for name in set.iter() {
            if seen.contains(name) {
                return Err(Error::OverlappingSets(name.to_string()));
            }
            seen.push(name);
        }
    }
    Ok(())
}

fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    a.iter().chain(b).copied().collect()
}

/// `H(A)` in bits.
pub fn entropy(j: &JointPmf, a: &[&str]) -> Result<f64> {
    check_disjoint(&[a])?;
    j.entropy_of(a)
}

/// `H(A | B)` in bits.
pub fn conditional_entropy(j: &JointPmf, a: &[&str], given: &[&str]) -> Result<f64> {
    check_disjoint(&[a, given])?;
    let h = j.entropy_of(&union(a, given))? - j.entropy_of(given)?;
    Ok(h.max(0.0))
}

/// `I(A; B)` in bits.
pub fn mutual_information(j: &JointPmf, a: &[&str], b: &[&str]) -> Result<f64> {
    conditional_mutual_information(j, a, b, &[])
}

/// `I(A; B | C)` in bits, clamped at 0.
pub fn conditional_mutual_information(
    j: &JointPmf,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64> {
    check_disjoint(&[a, b, c])?;
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ac, b);
    let value = j.entropy_of(&ac)? + j.entropy_of(&bc)? - j.entropy_of(&abc)? - j.entropy_of(c)?;
    Ok(value.max(0.0))
}

/// Whether the chain `A − B − C` holds numerically, i.e. `I(A; C | B) <= tol`.
pub fn numeric_markov_check(
    j: &JointPmf,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    tol: f64,
) -> Result<bool> {
    Ok(conditional_mutual_information(j, a, c, b)? <= tol)
}

/// `E[d(source, recon)]` where both variables live in `j`.
pub fn expected_distortion(
    j: &JointPmf,
    source: &str,
    recon: &str,
    d: &DistortionMeasure,
) -> Result<f64> {
    let m = j.marginal(&[source, recon])?;
    let (sc, rc) = (m.vars[0].card, m.vars[1].card);
    if sc != d.source_card() || rc != d.recon_card() {
        return Err(Error::AlphabetMismatch(format!(
            "distortion is {}x{}, variables are {}x{}",
            d.source_card(),
            d.recon_card(),
            sc,
            rc
        )));
    }
    let mut total = 0.0;
    for s in 0..sc {
        for r in 0..rc {
            total += m.probs[s * rc + r] * d.get(s, r);
        }
    }
    Ok(total)
}
