//! Subcommand definitions and dispatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twoway_helper::gaussian::{rx_min, rz_min};
use twoway_helper::markov::catalog::proof_chains;
use twoway_helper::markov::{verify_chain, FactorizationSpec, SeparationQuery, Verdict};
use twoway_helper::oracle::{
    catalog_check, exhaustive_frontier, exhaustive_markov_scan, format_sig9, write_fixture, FixtureParams,
    OracleFixture, QuantizedKernelSpace, DEFAULT_ENUMERATION_CAP,
};
use twoway_helper::region::{
    optimize_region, trace_frontier_helper, ChainDirection, HelperCards, SearchBudget, TwoWayCards,
};
use twoway_helper::tradeoff::{
    independent_rates_section, j_star, slope_certificate, IndependentRatesQuery, SupportLineQuery,
};

use crate::model_file::{gaussian_spec, ModelFile};
use crate::CliError;

const UNITS: &str = "Units: all rates are in bits per source symbol (logarithms base 2). \
Distortions are expected per-letter distortions under the model's matrices \
(squared error for the Gaussian subcommand). Numbers are printed with 9 significant digits.";

/// Rate-distortion regions for two-way source coding with a helper.
#[derive(Debug, Parser)]
#[command(name = "twoway-helper", version, after_help = UNITS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a Markov chain `g1 - g2 - g3` by graph separation.
    ///
    /// Exit 0 when established, 1 when not (a witness path is printed).
    #[command(after_help = UNITS)]
    Markov(MarkovArgs),
    /// Optimize the finite-alphabet region: one weighted point or a helper
    /// frontier.
    #[command(after_help = UNITS)]
    Region(RegionArgs),
    /// Closed-form Gaussian rates.
    #[command(after_help = UNITS)]
    Gaussian(GaussianArgs),
    /// Helper-rate tradeoff: support function, slope certificate, and
    /// independent helper rates.
    #[command(after_help = UNITS)]
    Tradeoff(TradeoffArgs),
    /// Brute-force references: frontier fixtures and Markov scans.
    #[command(after_help = UNITS)]
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl Output {
    fn open(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.output {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Input(format!("cannot create {}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Seed of the search schedule.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random restarts after the warm and named starts.
    #[arg(long, default_value_t = SearchBudget::default().restarts)]
    pub restarts: usize,
    /// Refinement rounds per start.
    #[arg(long, default_value_t = SearchBudget::default().refinement_rounds)]
    pub rounds: usize,
    /// Initial step is 1/grid-levels of probability mass.
    #[arg(long, default_value_t = SearchBudget::default().grid_levels)]
    pub grid_levels: usize,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            restarts: self.restarts,
            refinement_rounds: self.rounds,
            grid_levels: self.grid_levels,
            seed: self.seed,
        }
    }

    fn provenance(&self) -> String {
        format!(
            "# search budget: seed={} restarts={} rounds={} grid_levels={} (values are upper bounds from a seeded search)",
            self.seed, self.restarts, self.rounds, self.grid_levels
        )
    }
}

#[derive(Debug, Args)]
pub struct MarkovArgs {
    /// Factor file: one factor per line, variable names separated by commas
    /// or spaces, `#` starts a comment.
    #[arg(long)]
    pub factors: PathBuf,
    /// Query `g1 | g2 | g3` with comma-separated names in each group.
    pub query: String,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// JSON model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Distortion target for X (the frontier target in --frontier mode).
    #[arg(long)]
    pub dx: f64,
    /// Distortion target for Z; omit to leave it unconstrained.
    #[arg(long)]
    pub dz: Option<f64>,
    /// Weights `w1,w2,w3` of `w1 r1 + w2 r2 + w3 r3`.
    #[arg(long, default_value = "1,1,1", conflicts_with = "frontier")]
    pub weights: String,
    /// Auxiliary sizes: `u,v,w` for a single point, `u,w` for a frontier.
    /// Defaults are the cardinality bounds.
    #[arg(long)]
    pub cards: Option<String>,
    /// Trace the helper frontier `R(r1)` instead of a single point.
    #[arg(long, requires = "grid")]
    pub frontier: bool,
    /// Helper-rate caps, comma separated.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    /// Optional model file with a `gaussian` block; flags take precedence.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Variance of A (X = Z + A).
    #[arg(long)]
    pub sigma_a: Option<f64>,
    /// Variance of B (Y = X + B).
    #[arg(long)]
    pub sigma_b: Option<f64>,
    /// Variance of Z.
    #[arg(long)]
    pub sigma_z: Option<f64>,
    /// Helper rate.
    #[arg(long, default_value_t = 0.0)]
    pub ry: f64,
    /// Squared-error target for X.
    #[arg(long)]
    pub dx: f64,
    /// Squared-error target for Z.
    #[arg(long)]
    pub dz: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["lambda", "slope_cert", "independent"])))]
pub struct TradeoffArgs {
    /// JSON model file (chain Y-X-Z).
    #[arg(long)]
    pub model: PathBuf,
    /// Distortion target for X.
    #[arg(long)]
    pub d: f64,
    /// Evaluate the support function at this slope.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Largest subgradient magnitude of the frontier over --grid.
    #[arg(long, requires = "grid")]
    pub slope_cert: bool,
    /// Section of the region with separate helper rates --re and --rd.
    #[arg(long, requires_all = ["re", "rd"])]
    pub independent: bool,
    /// Helper rate to the encoder.
    #[arg(long)]
    pub re: Option<f64>,
    /// Helper rate to the decoder.
    #[arg(long)]
    pub rd: Option<f64>,
    /// Helper-rate caps for --slope-cert, comma separated.
    #[arg(long)]
    pub grid: Option<String>,
    /// Helper alphabet sizes `u,w`; defaults are the cardinality bounds.
    #[arg(long)]
    pub cards: Option<String>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub what: OracleCommand,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Enumerate the quantized helper frontier of a binary source with
    /// Hamming distortion and write it as a fixture.
    Frontier(OracleFrontierArgs),
    /// Random factorizations: every Established verdict is checked
    /// numerically. Exit 1 on any false positive.
    Scan(OracleScanArgs),
    /// Verdicts and numerical checks for the catalog of coding-theorem
    /// chains. Exit 1 if any is not established or not confirmed.
    Catalog(OracleCatalogArgs),
}

#[derive(Debug, Args)]
pub struct OracleFrontierArgs {
    /// Instance label stored in the fixture header.
    #[arg(long)]
    pub instance: String,
    /// P(X = 1).
    #[arg(long, default_value_t = 0.5)]
    pub p1: f64,
    /// Crossover probability from X to Y.
    #[arg(long)]
    pub p_y: f64,
    /// Crossover probability from X to Z.
    #[arg(long)]
    pub p_z: f64,
    /// Hamming distortion target for X.
    #[arg(long)]
    pub d: f64,
    /// Lattice points per unit interval in every kernel row.
    #[arg(long, default_value_t = 9)]
    pub levels: usize,
    #[arg(long, default_value_t = 2)]
    pub u_card: usize,
    #[arg(long, default_value_t = 3)]
    pub w_card: usize,
    /// Enumeration limit.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct OracleScanArgs {
    /// Binary variables per factorization (3 to 6).
    #[arg(long, default_value_t = 6)]
    pub vars: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Numerical tolerance on the conditional mutual information.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct OracleCatalogArgs {
    /// Random positive factor tables per entry.
    #[arg(long, default_value_t = 5)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub out: Output,
}

pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Markov(a) => markov(&a),
        Command::Region(a) => region(&a),
        Command::Gaussian(a) => gaussian(&a),
        Command::Tradeoff(a) => tradeoff(&a),
        Command::Oracle(a) => match a.what {
            OracleCommand::Frontier(a) => oracle_frontier(&a),
            OracleCommand::Scan(a) => oracle_scan(&a),
            OracleCommand::Catalog(a) => oracle_catalog(&a),
        },
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Input(format!("write failed: {e}"))
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("{what}: `{}` is not a number", s.trim())))
        })
        .collect()
}

fn parse_cards(text: &str, n: usize) -> Result<Vec<usize>, CliError> {
    let v: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("--cards: `{text}` is not a list of integers")))?;
    if v.len() != n {
        return Err(CliError::Input(format!("--cards needs {n} comma-separated sizes")));
    }
    Ok(v)
}

fn helper_cards(text: Option<&str>) -> Result<Option<HelperCards>, CliError> {
    text.map(|t| parse_cards(t, 2).map(|c| HelperCards { u: c[0], w: c[1] }))
        .transpose()
}

fn load_model(path: &Path) -> Result<twoway_helper::region::SourceModel, CliError> {
    ModelFile::load(path)?.source_model()
}

fn markov(a: &MarkovArgs) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(&a.factors)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", a.factors.display())))?;
    let spec = FactorizationSpec::parse(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", a.factors.display())))?;
    let q = SeparationQuery::parse(&a.query).map_err(|e| CliError::Input(format!("query: {e}")))?;
    let verdict = verify_chain(&spec, &q).map_err(CliError::input)?;
    let chain = format!("{} - {} - {}", q.g1.join(","), q.g2.join(","), q.g3.join(","));
    let mut out = io::stdout().lock();
    match verdict {
        Verdict::Established => {
            writeln!(out, "Established: {chain}").map_err(io_err)?;
            Ok(ExitCode::SUCCESS)
        }
        Verdict::NotEstablished { witness } => {
            writeln!(out, "NotEstablished: {chain}").map_err(io_err)?;
            writeln!(out, "witness: {}", witness.join(" - ")).map_err(io_err)?;
            Ok(ExitCode::from(1))
        }
    }
}

fn region(a: &RegionArgs) -> Result<ExitCode, CliError> {
    let model = load_model(&a.model)?;
    let budget = a.budget.budget();
    let mut out = a.out.open()?;
    if a.frontier {
        let grid = parse_list(a.grid.as_deref().unwrap_or_default(), "--grid")?;
        let cards = helper_cards(a.cards.as_deref())?;
        let f = trace_frontier_helper(&model, a.dx, &grid, &budget, cards).map_err(CliError::from_core)?;
        writeln!(out, "r1,r,dx").map_err(io_err)?;
        for p in f {
            writeln!(out, "{},{},{}", format_sig9(p.r1), format_sig9(p.r), format_sig9(p.dx)).map_err(io_err)?;
        }
    } else {
        let w = parse_list(&a.weights, "--weights")?;
        let weights: [f64; 3] = w
            .try_into()
            .map_err(|_| CliError::Input("--weights needs three values".into()))?;
        let cards = a
            .cards
            .as_deref()
            .map(|t| parse_cards(t, 3).map(|c| TwoWayCards { u: c[0], v: c[1], w: c[2] }))
            .transpose()?;
        let dz = a.dz.unwrap_or(f64::INFINITY);
        let opt = optimize_region(&model, a.dx, dz, weights, &budget, cards).map_err(CliError::from_core)?;
        let p = opt.point;
        writeln!(out, "r1,r2,r3,dx,dz").map_err(io_err)?;
        writeln!(
            out,
            "{},{},{},{},{}",
            format_sig9(p.r1),
            format_sig9(p.r2),
            format_sig9(p.r3),
            format_sig9(p.dx),
            format_sig9(p.dz)
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(ExitCode::SUCCESS)
}

fn gaussian(a: &GaussianArgs) -> Result<ExitCode, CliError> {
    let file = a.model.as_deref().map(ModelFile::load).transpose()?;
    let spec = gaussian_spec(file.as_ref(), a.sigma_a, a.sigma_b, a.sigma_z)?;
    for (name, v) in [("--dx", a.dx), ("--dz", a.dz)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Input(format!("{name} must be positive (got {v})")));
        }
    }
    if !(a.ry.is_finite() && a.ry >= 0.0) {
        return Err(CliError::Input(format!("--ry must be >= 0 (got {})", a.ry)));
    }
    let rz = rz_min(&spec, a.dz).map_err(CliError::input)?;
    let rx = rx_min(&spec, a.ry, a.dx).map_err(CliError::input)?;
    let rx0 = rx_min(&spec, 0.0, a.dx).map_err(CliError::input)?;
    let mut out = a.out.open()?;
    writeln!(out, "quantity,value").map_err(io_err)?;
    for (k, v) in [
        ("rz_min", rz),
        ("rx_min", rx),
        ("rx_min_at_ry0", rx0),
        ("slope_bound", spec.slope_bound()),
    ] {
        writeln!(out, "{k},{}", format_sig9(v)).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(ExitCode::SUCCESS)
}

/// Largest slope magnitude accepted by `tradeoff --slope-cert`.
const SLOPE_LIMIT: f64 = 1.01;

fn tradeoff(a: &TradeoffArgs) -> Result<ExitCode, CliError> {
    let model = load_model(&a.model)?;
    if model.chain() != ChainDirection::Yxz {
        return Err(CliError::Input("tradeoff needs a model with chain Y-X-Z".into()));
    }
    let budget = a.budget.budget();
    let cards = helper_cards(a.cards.as_deref())?;
    let mut out: Vec<u8> = Vec::new();
    let mut code = ExitCode::SUCCESS;
    writeln!(out, "{}", a.budget.provenance()).map_err(io_err)?;
    if let Some(lambda) = a.lambda {
        let v = j_star(&model, &SupportLineQuery { lambda, d: a.d }, &budget, cards).map_err(CliError::from_core)?;
        writeln!(out, "lambda,j_star,r1,r,dx").map_err(io_err)?;
        writeln!(
            out,
            "{},{},{},{},{}",
            format_sig9(lambda),
            format_sig9(v.value),
            format_sig9(v.point.r1),
            format_sig9(v.point.r),
            format_sig9(v.point.d)
        )
        .map_err(io_err)?;
    } else if a.slope_cert {
        let grid = parse_list(a.grid.as_deref().unwrap_or_default(), "--grid")?;
        let c = slope_certificate(&model, a.d, &grid, &budget, cards).map_err(CliError::from_core)?;
        writeln!(out, "max_slope,{}", format_sig9(c.max_slope)).map_err(io_err)?;
        writeln!(out, "r1,r,dx").map_err(io_err)?;
        for p in &c.frontier {
            writeln!(out, "{},{},{}", format_sig9(p.r1), format_sig9(p.r), format_sig9(p.dx)).map_err(io_err)?;
        }
        if c.max_slope > SLOPE_LIMIT {
            eprintln!("slope {} exceeds {SLOPE_LIMIT}", format_sig9(c.max_slope));
            code = ExitCode::from(1);
        }
    } else {
        let q = IndependentRatesQuery {
            r_e: a.re.unwrap_or_default(),
            r_d: a.rd.unwrap_or_default(),
            d: a.d,
        };
        let s = independent_rates_section(&model, &q, &budget, cards).map_err(CliError::from_core)?;
        writeln!(out, "r_e,r_d,dx,min_rate").map_err(io_err)?;
        writeln!(
            out,
            "{},{},{},{}",
            format_sig9(s.r_e),
            format_sig9(s.r_d),
            format_sig9(s.d),
            format_sig9(s.min_rate)
        )
        .map_err(io_err)?;
    }
    // Nothing is written unless the whole analysis succeeded.
    let mut sink = a.out.open()?;
    sink.write_all(&out).map_err(io_err)?;
    sink.flush().map_err(io_err)?;
    Ok(code)
}

fn oracle_frontier(a: &OracleFrontierArgs) -> Result<ExitCode, CliError> {
    let params = FixtureParams {
        instance: a.instance.clone(),
        chain: ChainDirection::Yxz,
        p1: a.p1,
        p_y: a.p_y,
        p_z: a.p_z,
        d: a.d,
        levels: a.levels,
        u_card: a.u_card,
        w_card: a.w_card,
    };
    let model = params.model().map_err(CliError::input)?;
    let space = QuantizedKernelSpace {
        cap: a.cap,
        ..params.space()
    };
    let f = exhaustive_frontier(&model, a.d, &space).map_err(CliError::from_core)?;
    let fixture = OracleFixture {
        params,
        points: f.points,
    };
    let mut out = a.out.open()?;
    write_fixture(&mut out, &fixture).map_err(CliError::input)?;
    out.flush().map_err(io_err)?;
    Ok(ExitCode::SUCCESS)
}

fn oracle_scan(a: &OracleScanArgs) -> Result<ExitCode, CliError> {
    if !(3..=6).contains(&a.vars) {
        return Err(CliError::Input("--vars must be between 3 and 6".into()));
    }
    let r = exhaustive_markov_scan(a.vars, a.trials, a.seed, a.tol).map_err(CliError::input)?;
    let mut out = a.out.open()?;
    writeln!(out, "trials,established,confirmed,numerically_true_only,false_positives").map_err(io_err)?;
    writeln!(
        out,
        "{},{},{},{},{}",
        r.trials,
        r.established,
        r.confirmed,
        r.numerically_true_only,
        r.violations.len()
    )
    .map_err(io_err)?;
    for v in &r.violations {
        writeln!(out, "# false positive: {} (cmi {})", v.query, format_sig9(v.cmi)).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(if r.sound() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn oracle_catalog(a: &OracleCatalogArgs) -> Result<ExitCode, CliError> {
    let checks = catalog_check(&proof_chains(), a.draws, a.seed, a.tol).map_err(CliError::input)?;
    let mut out = a.out.open()?;
    writeln!(out, "name,established,max_cmi,confirmed").map_err(io_err)?;
    let mut ok = true;
    for c in &checks {
        ok &= c.established && c.confirmed;
        writeln!(out, "{},{},{},{}", c.name, c.established, format_sig9(c.max_cmi), c.confirmed).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
