//! JSON model files.
//!
//! ```json
//! {
//!   "variables": [{"name": "X", "cardinality": 2},
//!                 {"name": "Y", "cardinality": 2},
//!                 {"name": "Z", "cardinality": 2}],
//!   "pmf": [0.36, 0.09, 0.04, 0.01, 0.01, 0.04, 0.09, 0.36],
//!   "chain": "Y-X-Z",
//!   "distortions": {"X": [[0, 1], [1, 0]], "Z": [[0, 1], [1, 0]]},
//!   "gaussian": {"var_a": 1.0, "var_b": 1.0, "var_z": 1.0}
//! }
//! ```
//!
//! `pmf` is row-major in the declared variable order (last variable fastest).
//! The discrete part and the Gaussian part are each optional, but a
//! subcommand that needs one fails without it.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use twoway_helper::gaussian::GaussianSourceSpec;
use twoway_helper::prob::{JointPmf, Var};
use twoway_helper::region::{ChainDirection, SourceModel};
use twoway_helper::DistortionMeasure;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: String,
    pub cardinality: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianDecl {
    pub var_a: f64,
    pub var_b: f64,
    pub var_z: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default)]
    pub variables: Vec<VariableDecl>,
    #[serde(default)]
    pub pmf: Vec<f64>,
    pub chain: Option<String>,
    #[serde(default)]
    pub distortions: BTreeMap<String, Vec<Vec<f64>>>,
    pub gaussian: Option<GaussianDecl>,
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Input(format!(
                "{}: line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }

    /// The discrete source. The declared chain is verified here.
    pub fn source_model(&self) -> Result<SourceModel, CliError> {
        if self.variables.is_empty() {
            return Err(CliError::Input("model file has no discrete variables".into()));
        }
        let vars: Vec<Var> = self
            .variables
            .iter()
            .map(|v| Var::new(v.name.clone(), v.cardinality))
            .collect();
        let joint = JointPmf::new(vars, self.pmf.clone()).map_err(CliError::input)?;
        let chain = self
            .chain
            .as_deref()
            .ok_or_else(|| CliError::Input("model file has no `chain`".into()))?;
        let chain = ChainDirection::parse(chain).map_err(CliError::input)?;
        let measure = |name: &str| -> Result<Option<DistortionMeasure>, CliError> {
            self.distortions
                .get(name)
                .map(|rows| DistortionMeasure::new(rows.clone()).map_err(CliError::input))
                .transpose()
        };
        if let Some(extra) = self.distortions.keys().find(|k| *k != "X" && *k != "Z") {
            return Err(CliError::Input(format!(
                "distortions are keyed by source name `X` or `Z` (got `{extra}`)"
            )));
        }
        SourceModel::new(joint, chain, measure("X")?, measure("Z")?).map_err(CliError::input)
    }

    pub fn gaussian(&self) -> Option<&GaussianDecl> {
        self.gaussian.as_ref()
    }
}

/// Gaussian parameters from flags, falling back to the model file.
pub fn gaussian_spec(
    file: Option<&ModelFile>,
    var_a: Option<f64>,
    var_b: Option<f64>,
    var_z: Option<f64>,
) -> Result<GaussianSourceSpec, CliError> {
    let g = file.and_then(ModelFile::gaussian);
    let pick = |flag: Option<f64>, from_file: Option<f64>, name: &str| {
        flag.or(from_file)
            .ok_or_else(|| CliError::Input(format!("missing {name}: give the flag or a `gaussian` block")))
    };
    let a = pick(var_a, g.map(|g| g.var_a), "--sigma-a")?;
    let b = pick(var_b, g.map(|g| g.var_b), "--sigma-b")?;
    let z = pick(var_z, g.map(|g| g.var_z), "--sigma-z")?;
    for (name, v) in [("--sigma-a", a), ("--sigma-b", b), ("--sigma-z", z)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Input(format!("{name} must be a positive variance (got {v})")));
        }
    }
    GaussianSourceSpec::new(a, b, z).map_err(CliError::input)
}
