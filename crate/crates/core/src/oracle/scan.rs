//! Numerical cross-check of the graph separation verdicts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::markov::catalog::CatalogEntry;
use crate::markov::{verify_chain, FactorizationSpec, SeparationQuery, Verdict};
use crate::prob::{conditional_mutual_information as cmi, JointPmf, Var};

/// Joint of binary variables proportional to the product of factor tables.
/// `tables[i]` is indexed by the factor's scope in declared order, first
/// variable most significant.
pub fn joint_from_factors(spec: &FactorizationSpec, tables: &[Vec<f64>]) -> Result<JointPmf> {
    let names = spec.variables();
    let vars: Vec<Var> = names.iter().map(|n| Var::new(n.clone(), 2)).collect();
    let scopes: Vec<Vec<usize>> = spec
        .factors()
        .iter()
        .map(|f| f.iter().map(|v| names.iter().position(|n| n == v).expect("factor names are declared")).collect())
        .collect();
    let mut raw = Vec::with_capacity(1 << names.len());
    let n = names.len();
    for index in 0..(1usize << n) {
        let bit = |i: usize| (index >> (n - 1 - i)) & 1;
        let mut p = 1.0;
        for (scope, table) in scopes.iter().zip(tables) {
            let local = scope.iter().fold(0, |acc, &i| acc * 2 + bit(i));
            p *= table[local];
        }
        raw.push(p);
    }
    let total: f64 = raw.iter().sum();
    JointPmf::new(vars, raw.into_iter().map(|p| p / total).collect())
}

fn random_tables(spec: &FactorizationSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    spec.factors()
        .iter()
        .map(|f| (0..(1usize << f.len())).map(|_| rng.gen_range(0.05..1.0)).collect())
        .collect()
}

fn query_cmi(j: &JointPmf, q: &SeparationQuery) -> Result<f64> {
    fn s(g: &[String]) -> Vec<&str> {
        g.iter().map(String::as_str).collect()
    }
    cmi(j, &s(&q.g1), &s(&q.g3), &s(&q.g2))
}

/// An Established verdict whose chain failed numerically.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanViolation {
    pub factors: Vec<Vec<String>>,
    pub query: String,
    pub cmi: f64,
}

/// Outcome of [`exhaustive_markov_scan`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanReport {
    pub trials: usize,
    pub established: usize,
    pub confirmed: usize,
    /// Queries the graph could not establish but that held numerically
    /// anyway (allowed: the technique is only sufficient).
    pub numerically_true_only: usize,
    pub violations: Vec<ScanViolation>,
}

impl ScanReport {
    pub fn sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Draw `trials` random factorizations over `num_vars <= 6` binary
/// variables, each with a random nontrivial query, and check every
/// Established verdict numerically at `tol` with random positive tables.
pub fn exhaustive_markov_scan(num_vars: usize, trials: usize, seed: u64, tol: f64) -> Result<ScanReport> {
    assert!((3..=6).contains(&num_vars), "scan supports 3 to 6 variables");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..num_vars).map(|i| format!("a{i}")).collect();
    let mut report = ScanReport::default();
    for _ in 0..trials {
        let spec = random_spec(&names, &mut rng)?;
        let q = random_query(&names, &mut rng)?;
        let verdict = verify_chain(&spec, &q)?;
        let j = joint_from_factors(&spec, &random_tables(&spec, &mut rng))?;
        let value = query_cmi(&j, &q)?;
        report.trials += 1;
        match verdict {
            Verdict::Established => {
                report.established += 1;
                if value <= tol {
                    report.confirmed += 1;
                } else {
                    report.violations.push(ScanViolation {
                        factors: spec.factors().to_vec(),
                        query: q.to_string(),
                        cmi: value,
                    });
                }
            }
            Verdict::NotEstablished { .. } => {
                if value <= tol {
                    report.numerically_true_only += 1;
                }
            }
        }
    }
    Ok(report)
}

fn random_spec(names: &[String], rng: &mut ChaCha8Rng) -> Result<FactorizationSpec> {
    let n = names.len();
    let count = rng.gen_range(1..=n + 1);
    let mut factors: Vec<Vec<String>> = (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=3.min(n));
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let j = rng.gen_range(i..n);
                idx.swap(i, j);
            }
            let mut scope = idx[..size].to_vec();
            scope.sort_unstable();
            scope.into_iter().map(|i| names[i].clone()).collect()
        })
        .collect();
    // Every variable must appear somewhere.
    for name in names {
        if !factors.iter().any(|f| f.contains(name)) {
            factors.push(vec![name.clone()]);
        }
    }
    FactorizationSpec::new(names.to_vec(), factors)
}

fn random_query(names: &[String], rng: &mut ChaCha8Rng) -> Result<SeparationQuery> {
    let n = names.len();
    // Assign every variable to g1, g2, g3 or nothing, forcing each group
    // to be nonempty.
    loop {
        let groups: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let pick = |g: usize| -> Vec<String> {
            names.iter().zip(&groups).filter(|(_, &k)| k == g).map(|(s, _)| s.clone()).collect()
        };
        let (g1, g2, g3) = (pick(0), pick(1), pick(2));
        if !g1.is_empty() && !g2.is_empty() && !g3.is_empty() {
            return SeparationQuery::new(&g1, &g2, &g3);
        }
    }
}

/// Result of checking one catalog factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogCheck {
    pub name: &'static str,
    pub established: bool,
    /// Largest conditional mutual information over the random draws.
    pub max_cmi: f64,
    pub confirmed: bool,
}

/// Verdict plus a numerical check with `draws` random positive tables for
/// each catalog entry.
pub fn catalog_check(entries: &[CatalogEntry], draws: usize, seed: u64, tol: f64) -> Result<Vec<CatalogCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    entries
        .iter()
        .map(|e| {
            let established = verify_chain(&e.spec, &e.query)?.is_established();
            let mut max_cmi: f64 = 0.0;
            for _ in 0..draws {
                let j = joint_from_factors(&e.spec, &random_tables(&e.spec, &mut rng))?;
                max_cmi = max_cmi.max(query_cmi(&j, &e.query)?);
            }
            Ok(CatalogCheck {
                name: e.name,
                established,
                max_cmi,
                confirmed: max_cmi <= tol,
            })
        })
        .collect()
}
