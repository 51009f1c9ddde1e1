//! Command implementations behind the `ptvarfima` binary.
//!
//! Each command is a pure function of a [`RunConfig`] plus any input files;
//! `main.rs` only parses arguments and maps [`CliError`] to an exit code.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ptvarfima::acvf::{acvf_table_with, decay_law, Method};
use ptvarfima::defaults;
use ptvarfima::estimate::{
    periodicity_check, sample_periodic_acf, sample_periodic_acvf_from, Centering, PeriodicityConfig,
};
use ptvarfima::figures::{build_figures, claims_report, figure_claims};
use ptvarfima::model::ModelDocument;
use ptvarfima::simulate::{simulate_ensemble, SimulationConfig};
use ptvarfima::verify::{self, CheckId, VerifyConfig};
use ptvarfima::{Execution, PtvArfimaModel};

pub mod input;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or an invalid model or input: exit 1.
    Usage(String),
    /// A numerical self-check failed: exit 2.
    Check(String),
    /// Reading or writing a file failed: exit 3.
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Check(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Check(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ptvarfima::Error> for CliError {
    fn from(e: ptvarfima::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "ptvarfima", version, about = "Periodic ARFIMA(0, d_t, 0): theory tables, figures, simulation and estimation")]
pub struct Cli {
    /// Model document: {"period": p, "d": [...], "sigma2": [...]}.
    #[arg(long, global = true, value_name = "JSON")]
    pub model: Option<PathBuf>,
    /// Output directory; commands print to stdout when it is omitted.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Master seed for simulation and verification.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Check a model and print its per-season decay exponents.
    Validate,
    /// Autocovariance table, optionally with the autocorrelation column.
    Acvf(AcvfArgs),
    /// Write the two reference figures (CSV and SVG) and check their claims.
    Figures(FiguresArgs),
    /// Simulate one path or an ensemble, with a replay manifest.
    Simulate(SimulateArgs),
    /// Periodic sample ACVF/ACF of a path CSV or a single-column CSV.
    Estimate(EstimateArgs),
    /// Run the self-checks and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Exact,
    Series,
    Asymptotic,
    Hypergeometric,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AcvfArgs {
    #[arg(long, default_value_t = defaults::FIGURE_MAX_LAG)]
    pub max_lag: u64,
    /// First lag; the asymptotic method needs at least 1.
    #[arg(long, default_value_t = 0)]
    pub min_lag: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
    /// Terms of the series method.
    #[arg(long, default_value_t = defaults::SERIES_TERMS)]
    pub n_terms: usize,
    /// Fill the rho column.
    #[arg(long)]
    pub acf: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FiguresArgs {
    #[arg(long, default_value_t = defaults::FIGURE_MAX_LAG)]
    pub max_lag: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = defaults::PATH_LENGTH)]
    pub n: usize,
    #[arg(long, default_value_t = defaults::TRUNCATION)]
    pub truncation: usize,
    /// Defaults to the truncation.
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Add the generating noise as an `eps` column.
    #[arg(long)]
    pub with_noise: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenteringArg {
    PerSeasonMean,
    Zero,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    /// Path CSV (`t,season,x[,eps]`) or a single numeric column.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub period: usize,
    #[arg(long, default_value_t = 20)]
    pub max_lag: usize,
    #[arg(long, value_enum, default_value_t = CenteringArg::PerSeasonMean)]
    pub centering: CenteringArg,
    /// Also test whether the data are consistent with this period.
    #[arg(long)]
    pub check_period: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Comma-separated subset of checks; all by default.
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<String>,
    #[arg(long, default_value_t = defaults::REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = defaults::PATH_LENGTH)]
    pub n: usize,
    #[arg(long, default_value_t = defaults::TRUNCATION)]
    pub truncation: usize,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = defaults::SERIES_TERMS)]
    pub series_terms: usize,
    #[arg(long, default_value_t = defaults::CLOSED_FORM_RTOL)]
    pub closed_form_rtol: f64,
    #[arg(long, default_value_t = defaults::SERIES_RTOL_STRONG)]
    pub series_strong_rtol: f64,
    #[arg(long, default_value_t = defaults::SERIES_RTOL_WEAK)]
    pub series_weak_rtol: f64,
    /// Standard errors allowed in Monte-Carlo checks.
    #[arg(long, default_value_t = defaults::Z_THRESHOLD)]
    pub z: f64,
}

/// Everything a run depends on besides input files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: Option<ModelDocument>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub exec: Execution,
    #[serde(flatten)]
    pub command: Command,
}

impl RunConfig {
    /// Resolves the model file; everything else is copied from the arguments.
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let model = match &cli.model {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                Some(PtvArfimaModel::from_json(&text)?.document())
            }
            None => None,
        };
        Ok(RunConfig {
            model,
            out: cli.out,
            seed: cli.seed,
            exec: if cli.sequential { Execution::Sequential } else { Execution::default() },
            command: cli.command,
        })
    }

    fn model(&self) -> CliResult<PtvArfimaModel> {
        let doc = self
            .model
            .clone()
            .ok_or_else(|| CliError::Usage("this command needs --model <json>".into()))?;
        Ok(PtvArfimaModel::try_from(doc)?)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(defaults::MASTER_SEED)
    }
}

/// What a command produced: text for stdout and the files it wrote.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn emit(&mut self, out: Option<&Path>, name: &str, contents: &str) -> CliResult<()> {
        match out {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                let path = dir.join(name);
                fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
                self.files.push(path);
            }
            None => self.stdout.push_str(contents),
        }
        Ok(())
    }
}

pub fn run(config: &RunConfig) -> CliResult<Outcome> {
    match &config.command {
        Command::Validate => cmd_validate(config),
        Command::Acvf(a) => cmd_acvf(config, a),
        Command::Figures(a) => cmd_figures(config, a),
        Command::Simulate(a) => cmd_simulate(config, a),
        Command::Estimate(a) => cmd_estimate(config, a),
        Command::Verify(a) => cmd_verify(config, a),
    }
}

pub fn cmd_validate(config: &RunConfig) -> CliResult<Outcome> {
    let model = config.model()?;
    let mut text = format!("valid model, period {}\n", model.period());
    text.push_str("season,d,sigma2,residue,alpha,C\n");
    for s in model.seasons() {
        for k in 0..model.period() {
            let law = decay_law(&model, s, k)?;
            text.push_str(&format!(
                "{s},{},{},{k},{},{}\n",
                model.d(s),
                model.sigma2(s),
                round(law.alpha),
                round(law.c)
            ));
        }
    }
    Ok(Outcome { stdout: text, files: vec![] })
}

/// Drops representation noise such as `0.30000000000000004`.
fn round(x: f64) -> f64 {
    format!("{x:.12}").parse().expect("formatted float parses")
}

pub fn cmd_acvf(config: &RunConfig, args: &AcvfArgs) -> CliResult<Outcome> {
    let model = config.model()?;
    let method = match args.method {
        MethodArg::Exact => Method::Exact,
        MethodArg::Series => Method::Series { n_terms: args.n_terms },
        MethodArg::Asymptotic => Method::Asymptotic,
        MethodArg::Hypergeometric => Method::Hypergeometric,
    };
    if args.min_lag > args.max_lag {
        return Err(CliError::Usage(format!(
            "--min-lag {} exceeds --max-lag {}",
            args.min_lag, args.max_lag
        )));
    }
    let table = acvf_table_with(&model, args.min_lag..=args.max_lag, method, config.exec)?;
    let mut outcome = Outcome::default();
    outcome.emit(config.out.as_deref(), "acvf.csv", &table.to_csv(args.acf)?)?;
    Ok(outcome)
}

pub fn cmd_figures(config: &RunConfig, args: &FiguresArgs) -> CliResult<Outcome> {
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let figs = build_figures(args.max_lag, config.exec)?;
    let mut outcome = Outcome::default();
    for fig in &figs {
        outcome.emit(Some(&out), &format!("{}.csv", fig.name), &fig.csv()?)?;
        outcome.emit(Some(&out), &format!("{}.svg", fig.name), &fig.svg())?;
    }
    outcome.stdout = claims_report(&figure_claims(&figs)?);
    Ok(outcome)
}

pub fn cmd_simulate(config: &RunConfig, args: &SimulateArgs) -> CliResult<Outcome> {
    let model = config.model()?;
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if args.replicates == 0 {
        return Err(CliError::Usage("--replicates must be at least 1".into()));
    }
    if args.replicates > 1 && config.out.is_none() {
        return Err(CliError::Usage("an ensemble needs --out <dir>".into()));
    }
    let sim = SimulationConfig::new(args.n)
        .with_truncation(args.truncation)
        .with_burn_in(args.burn_in.unwrap_or(args.truncation));
    let ensemble = simulate_ensemble(&model, &sim, args.replicates, config.seed(), config.exec)?;
    let mut outcome = Outcome::default();
    let out = config.out.as_deref();
    if args.replicates == 1 {
        outcome.emit(out, "path.csv", &ensemble.replicates[0].to_csv(args.with_noise))?;
    } else {
        for (r, path) in ensemble.replicates.iter().enumerate() {
            outcome.emit(out, &format!("path_{:04}.csv", r + 1), &path.to_csv(args.with_noise))?;
        }
    }
    if out.is_some() {
        let manifest = serde_json::to_string_pretty(&ensemble.manifest()).expect("manifest serializes");
        outcome.emit(out, "manifest.json", &(manifest + "\n"))?;
    }
    Ok(outcome)
}

pub fn cmd_estimate(config: &RunConfig, args: &EstimateArgs) -> CliResult<Outcome> {
    let text = fs::read_to_string(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let series = input::parse_series(&text)?;
    let centering = match args.centering {
        CenteringArg::PerSeasonMean => Centering::PerSeasonMean,
        CenteringArg::Zero => Centering::Zero,
    };
    let stats = sample_periodic_acvf_from(
        &series.values,
        series.first_time,
        args.period,
        args.max_lag,
        centering,
        config.exec,
    )?;
    let stats = sample_periodic_acf(stats)?;
    let mut outcome = Outcome::default();
    outcome.emit(config.out.as_deref(), "stats.csv", &stats.to_csv())?;
    if let Some(p) = args.check_period {
        let report = periodicity_check(&series.values, p, &PeriodicityConfig::default())?;
        outcome.stdout.push_str(&report.to_text());
    }
    Ok(outcome)
}

pub fn verify_config(config: &RunConfig, args: &VerifyArgs) -> CliResult<VerifyConfig> {
    let checks = if args.checks.is_empty() {
        CheckId::ALL.to_vec()
    } else {
        args.checks
            .iter()
            .map(|c| c.trim().parse::<CheckId>())
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut v = VerifyConfig {
        checks,
        n: args.n,
        truncation: args.truncation,
        burn_in: args.burn_in.unwrap_or(args.truncation),
        replicates: args.replicates,
        seed: config.seed(),
        series_terms: args.series_terms,
        exec: config.exec,
        ..VerifyConfig::default()
    };
    v.tolerances.closed_form = args.closed_form_rtol;
    v.tolerances.series_strong = args.series_strong_rtol;
    v.tolerances.series_weak = args.series_weak_rtol;
    v.tolerances.z = args.z;
    Ok(v)
}

/// Prints the report table; any failed row becomes [`CliError::Check`].
pub fn cmd_verify(config: &RunConfig, args: &VerifyArgs) -> CliResult<Outcome> {
    let report = verify::run(&verify_config(config, args)?)?;
    let table = report.to_table();
    let mut outcome = Outcome::default();
    if let Some(dir) = config.out.as_deref() {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        outcome.emit(Some(dir), "verify.json", &(json + "\n"))?;
    }
    if report.passed() {
        outcome.stdout = table;
        Ok(outcome)
    } else {
        Err(CliError::Check(table))
    }
}
