//! The `cfpp` command line: tables, moments, correlation decay, sampling and
//! Monte Carlo validation, written as CSV or JSON.
//!
//! Exit codes: 0 success, 1 statistical failure (`validate`), 2 usage or
//! parameter error, 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::fractional::{correlation_decay, frac_moments, frac_pmf, FracProcess};
use crate::montecarlo::{
    compare_pmf_with, histogram, par_draws, ClassicalMethod, ClassicalSampler, FractionalSampler, SimConfig,
};
use crate::processes::{classical_moments, classical_pmf, PmfMethod, PmfTable, ProcessParams, JUMP_TAIL};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CFPP_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_STATISTICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cfpp", version, about = "Compound and fractional counting processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probability mass table at one time
    Pmf(RunArgs),
    /// Mean and variance at one or more times
    Moments(RunArgs),
    /// Correlation decay Corr(M(s), M(t)) over a time grid
    Lrd(RunArgs),
    /// Raw draws at one time, or paths on a time grid
    Sample(RunArgs),
    /// Monte Carlo pmf against the analytic table
    Validate(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Pmf(_) => "pmf",
            Command::Moments(_) => "moments",
            Command::Lrd(_) => "lrd",
            Command::Sample(_) => "sample",
            Command::Validate(_) => "validate",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Pmf(a) | Command::Moments(a) | Command::Lrd(a) | Command::Sample(a) | Command::Validate(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Btp,
    Plp,
    Gpap,
    Gcp,
}

impl ProcessKind {
    fn name(self) -> &'static str {
        match self {
            ProcessKind::Btp => "btp",
            ProcessKind::Plp => "plp",
            ProcessKind::Gpap => "gpap",
            ProcessKind::Gcp => "gcp",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            ProcessKind::Btp => &["alpha", "theta"],
            ProcessKind::Plp => &["lambda", "p"],
            ProcessKind::Gpap => &["lambda", "rho", "r"],
            ProcessKind::Gcp => &["rates"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// Flat TOML file of options, or a JSON artifact written by this tool
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    process: Option<ProcessKind>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Comma-separated jump rates for gcp
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    /// Fractional order in (0, 1]; 1 is the classical process
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// `start:end:geometric:count`, `start:end:linear:count` or a comma list
    #[arg(long)]
    t_grid: Option<String>,
    /// Reference time for `lrd`
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_samples: Option<usize>,
    /// Output file; defaults to `$CFPP_OUTPUT_DIR/<command>.<ext>` or stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Every option that can come from a flag or a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
}

impl RunConfig {
    fn from_args(a: &RunArgs) -> Self {
        Self {
            process: a.process,
            alpha: a.alpha,
            theta: a.theta,
            lambda: a.lambda,
            p: a.p,
            rho: a.rho,
            r: a.r,
            rates: a.rates.clone(),
            beta: a.beta,
            t: a.t,
            t_grid: a.t_grid.clone(),
            s: a.s,
            n_max: a.n_max,
            method: a.method.clone(),
            format: a.format,
            seed: a.seed,
            n_samples: a.n_samples,
        }
    }

    /// Fill every unset field of `self` from `base`.
    fn or(self, base: RunConfig) -> Self {
        Self {
            process: self.process.or(base.process),
            alpha: self.alpha.or(base.alpha),
            theta: self.theta.or(base.theta),
            lambda: self.lambda.or(base.lambda),
            p: self.p.or(base.p),
            rho: self.rho.or(base.rho),
            r: self.r.or(base.r),
            rates: self.rates.or(base.rates),
            beta: self.beta.or(base.beta),
            t: self.t.or(base.t),
            t_grid: self.t_grid.or(base.t_grid),
            s: self.s.or(base.s),
            n_max: self.n_max.or(base.n_max),
            method: self.method.or(base.method),
            format: self.format.or(base.format),
            seed: self.seed.or(base.seed),
            n_samples: self.n_samples.or(base.n_samples),
        }
    }

    fn set_keys(&self) -> Vec<&'static str> {
        let pairs = [
            ("alpha", self.alpha.is_some()),
            ("theta", self.theta.is_some()),
            ("lambda", self.lambda.is_some()),
            ("p", self.p.is_some()),
            ("rho", self.rho.is_some()),
            ("r", self.r.is_some()),
            ("rates", self.rates.is_some()),
        ];
        pairs.into_iter().filter(|(_, set)| *set).map(|(k, _)| k).collect()
    }
}

/// Load a config file: a flat TOML table, or a JSON artifact whose
/// `meta.config` is reused.
pub fn load_config(path: &std::path::Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(&text).map_err(|e| format!("invalid JSON config: {e}"))?;
        let cfg = value.get("meta").and_then(|m| m.get("config")).cloned().unwrap_or(value);
        serde_json::from_value(cfg).map_err(|e| format!("invalid config: {e}"))
    } else {
        toml::from_str(&text).map_err(|e| format!("invalid TOML config: {e}"))
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

type CliResult<T> = Result<T, Failure>;

fn build_params(cfg: &RunConfig) -> CliResult<ProcessParams> {
    let Some(kind) = cfg.process else {
        return usage("missing --process (btp, plp, gpap or gcp)");
    };
    let allowed = kind.keys();
    for key in cfg.set_keys() {
        if !allowed.contains(&key) {
            return usage(format!(
                "parameter `{key}` does not belong to process {}; expected {}",
                kind.name(),
                allowed.join(", ")
            ));
        }
    }
    let need = |key: &str, v: Option<f64>| v.ok_or_else(|| Failure::Usage(format!("missing parameter `{key}`")));
    let params = match kind {
        ProcessKind::Btp => ProcessParams::bell_touchard(need("alpha", cfg.alpha)?, need("theta", cfg.theta)?),
        ProcessKind::Plp => ProcessParams::poisson_logarithmic(need("lambda", cfg.lambda)?, need("p", cfg.p)?),
        ProcessKind::Gpap => {
            ProcessParams::polya_aeppli(need("lambda", cfg.lambda)?, need("rho", cfg.rho)?, need("r", cfg.r)?)
        }
        ProcessKind::Gcp => match &cfg.rates {
            Some(rates) => ProcessParams::generalized_counting(rates.clone()),
            None => return usage("missing parameter `rates`"),
        },
    };
    Ok(params?)
}

enum Model {
    Classical(ProcessParams),
    Fractional(FracProcess),
}

impl Model {
    fn new(cfg: &RunConfig) -> CliResult<Self> {
        let params = build_params(cfg)?;
        let beta = cfg.beta.unwrap_or(1.0);
        if !(beta > 0.0 && beta <= 1.0) {
            return usage(format!("beta must lie in (0, 1], got {beta}"));
        }
        if beta == 1.0 {
            Ok(Model::Classical(params))
        } else {
            Ok(Model::Fractional(FracProcess::new(params, beta)?))
        }
    }

    fn default_method(&self) -> PmfMethod {
        match self {
            Model::Classical(_) => PmfMethod::Recurrence,
            Model::Fractional(_) => PmfMethod::Convolution,
        }
    }

    fn pmf(&self, t: f64, n_max: usize, method: PmfMethod) -> CliResult<PmfTable> {
        Ok(match self {
            Model::Classical(p) => classical_pmf(p, t, n_max, method)?,
            Model::Fractional(f) => frac_pmf(f, t, n_max, method)?,
        })
    }

    fn frac(&self) -> CliResult<FracProcess> {
        match self {
            Model::Fractional(f) => Ok(f.clone()),
            Model::Classical(p) => Ok(FracProcess::new(p.clone(), 1.0)?),
        }
    }
}

fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Failure::Usage(format!("invalid number `{s}` in t-grid")))
    };
    let grid = if parts.len() == 4 {
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[3]
            .parse()
            .map_err(|_| Failure::Usage(format!("invalid point count `{}` in t-grid", parts[3])))?;
        if count < 2 || !(b > a) {
            return usage("t-grid needs end > start and at least 2 points");
        }
        let frac = |i: usize| i as f64 / (count - 1) as f64;
        match parts[2] {
            "geometric" => {
                if !(a > 0.0) {
                    return usage("geometric t-grid needs a positive start");
                }
                (0..count).map(|i| a * (b / a).powf(frac(i))).collect()
            }
            "linear" => (0..count).map(|i| a + (b - a) * frac(i)).collect(),
            other => return usage(format!("unknown t-grid spacing `{other}`")),
        }
    } else if parts.len() == 1 {
        spec.split(',').map(num).collect::<CliResult<Vec<f64>>>()?
    } else {
        return usage(format!("cannot parse t-grid `{spec}`"));
    };
    if grid.iter().any(|t| !(*t >= 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return usage("t-grid must be non-negative and strictly increasing");
    }
    Ok(grid)
}

fn times(cfg: &RunConfig) -> CliResult<Vec<f64>> {
    match (&cfg.t_grid, cfg.t) {
        (Some(_), Some(_)) => usage("give either --t or --t-grid, not both"),
        (Some(g), None) => parse_grid(g),
        (None, Some(t)) => Ok(vec![t]),
        (None, None) => usage("missing --t"),
    }
}

fn single_time(cfg: &RunConfig) -> CliResult<f64> {
    if cfg.t_grid.is_some() {
        return usage("this command takes a single --t, not --t-grid");
    }
    cfg.t.ok_or_else(|| Failure::Usage("missing --t".into()))
}

/// `x` with 15 significant digits, without trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..15).contains(&exp) {
        trim(format!("{:.*}", (14 - exp).max(0) as usize, x))
    } else {
        let s = format!("{:.14e}", x);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        format!("{}e{}", trim(mantissa.to_string()), e)
    }
}

/// Value rounded to 15 significant digits, as emitted in JSON.
fn num(x: f64) -> Value {
    let rounded: f64 = fmt_num(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    summary: Vec<(&'static str, Cell)>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn render(&self, format: Format, command: &str, cfg: &RunConfig) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    out += &row.iter().map(Cell::csv).collect::<Vec<_>>().join(",");
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut data = Map::new();
                data.insert("rows".into(), Value::Array(rows));
                if !self.summary.is_empty() {
                    let summary: Map<String, Value> =
                        self.summary.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
                    data.insert("summary".into(), Value::Object(summary));
                }
                let doc = json!({
                    "meta": {
                        "command": command,
                        "version": env!("CARGO_PKG_VERSION"),
                        "config": serde_json::to_value(cfg).expect("config serializes"),
                    },
                    "data": data,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("json serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn cmd_pmf(cfg: &mut RunConfig) -> CliResult<(Table, bool)> {
    let model = Model::new(cfg)?;
    let t = single_time(cfg)?;
    let method = match &cfg.method {
        Some(m) => m.parse::<PmfMethod>()?,
        None => model.default_method(),
    };
    let n_max = cfg.n_max.unwrap_or(20);
    cfg.method = Some(method.name().to_string());
    cfg.n_max = Some(n_max);
    let table = model.pmf(t, n_max, method)?;
    let mut out = Table::new(vec!["n", "probability", "method", "tail_bound"]);
    for (n, &p) in table.probs.iter().enumerate() {
        out.rows.push(vec![
            Cell::Int(n as u64),
            Cell::Num(p),
            Cell::Text(method.name().into()),
            Cell::Num(table.tail_bound),
        ]);
    }
    Ok((out, true))
}

fn cmd_moments(cfg: &mut RunConfig) -> CliResult<(Table, bool)> {
    let model = Model::new(cfg)?;
    let mut out = Table::new(vec!["t", "mean", "variance"]);
    for t in times(cfg)? {
        let m = match &model {
            Model::Classical(p) => classical_moments(p, t)?,
            Model::Fractional(f) => frac_moments(f, t)?,
        };
        out.rows.push(vec![Cell::Num(t), Cell::Num(m.mean), Cell::Num(m.variance)]);
    }
    Ok((out, true))
}

fn cmd_lrd(cfg: &mut RunConfig) -> CliResult<(Table, bool)> {
    let model = Model::new(cfg)?;
    let Some(grid) = cfg.t_grid.as_deref().map(parse_grid).transpose()? else {
        return usage("lrd requires --t-grid");
    };
    let s = cfg.s.unwrap_or(1.0);
    cfg.s = Some(s);
    let report = correlation_decay(&model.frac()?, s, &grid)?;
    let mut out = Table::new(vec!["t", "correlation", "fitted_exponent", "c0"]);
    for (t, c) in report.t_grid.iter().zip(&report.corr) {
        out.rows.push(vec![
            Cell::Num(*t),
            Cell::Num(*c),
            Cell::Num(report.fitted_exponent),
            Cell::Num(report.c0),
        ]);
    }
    out.summary = vec![
        ("s", Cell::Num(s)),
        ("fitted_exponent", Cell::Num(report.fitted_exponent)),
        ("c0", Cell::Num(report.c0)),
    ];
    Ok((out, true))
}

fn require_seed(cfg: &RunConfig) -> CliResult<u64> {
    cfg.seed
        .ok_or_else(|| Failure::Usage("--seed is required for reproducible sampling".into()))
}

enum Sampler {
    Classical(ClassicalSampler),
    Fractional(FractionalSampler),
}

impl Sampler {
    fn new(model: &Model) -> CliResult<Self> {
        Ok(match model {
            Model::Classical(p) => Sampler::Classical(ClassicalSampler::new(p, JUMP_TAIL, ClassicalMethod::CompoundJumps)?),
            Model::Fractional(f) => Sampler::Fractional(FractionalSampler::new(f, JUMP_TAIL)?),
        })
    }

    fn draw(&self, t: f64, rng: &mut rand_chacha::ChaCha8Rng) -> crate::Result<u64> {
        match self {
            Sampler::Classical(s) => Ok(s.sample(t, rng)),
            Sampler::Fractional(s) => s.sample(t, rng),
        }
    }

    fn path(&self, times: &[f64], rng: &mut rand_chacha::ChaCha8Rng) -> crate::Result<Vec<u64>> {
        match self {
            Sampler::Classical(s) => Ok(s.sample_path(times, rng)?.values),
            Sampler::Fractional(s) => Ok(s.sample_path(times, rng)?.values),
        }
    }
}

fn cmd_sample(cfg: &mut RunConfig) -> CliResult<(Table, bool)> {
    let model = Model::new(cfg)?;
    let seed = require_seed(cfg)?;
    let n = cfg.n_samples.unwrap_or(1000);
    if n == 0 {
        return usage("n_samples must be at least 1");
    }
    cfg.n_samples = Some(n);
    let sampler = Sampler::new(&model)?;
    if cfg.t_grid.is_some() {
        let grid = times(cfg)?;
        let paths = par_draws(n, seed, |rng| sampler.path(&grid, rng))?;
        let mut out = Table::new(vec!["path", "t", "value"]);
        for (i, path) in paths.iter().enumerate() {
            for (t, v) in grid.iter().zip(path) {
                out.rows.push(vec![Cell::Int(i as u64), Cell::Num(*t), Cell::Int(*v)]);
            }
        }
        Ok((out, true))
    } else {
        let t = single_time(cfg)?;
        if !(t >= 0.0) {
            return usage(format!("time must be non-negative, got {t}"));
        }
        let draws = par_draws(n, seed, |rng| sampler.draw(t, rng))?;
        let mut out = Table::new(vec!["draw", "value"]);
        for (i, v) in draws.iter().enumerate() {
            out.rows.push(vec![Cell::Int(i as u64), Cell::Int(*v)]);
        }
        Ok((out, true))
    }
}

fn cmd_validate(cfg: &mut RunConfig) -> CliResult<(Table, bool)> {
    let model = Model::new(cfg)?;
    let seed = require_seed(cfg)?;
    let t = single_time(cfg)?;
    let n = cfg.n_samples.unwrap_or(100_000);
    cfg.n_samples = Some(n);
    let sim = SimConfig::new(n, seed, t)?;
    let sampler = Sampler::new(&model)?;
    let draws = par_draws(n, seed, |rng| sampler.draw(t, rng))?;
    let method = model.default_method();
    let mut n_max = 64;
    let table = loop {
        let table = model.pmf(t, n_max, method)?;
        if table.tail_bound <= 1e-9 || n_max >= 4096 {
            break table;
        }
        n_max *= 2;
    };
    let report = compare_pmf_with(&histogram(&draws), &table, n, sim.max_abs_z, sim.min_p_value)?;
    let mut out = Table::new(vec!["n", "empirical", "analytic", "std_error", "z"]);
    for b in &report.bins {
        out.rows.push(vec![
            b.n.map_or(Cell::Text("pooled".into()), |n| Cell::Int(n as u64)),
            Cell::Num(b.empirical),
            Cell::Num(b.analytic),
            Cell::Num(b.std_error),
            Cell::Num(b.z),
        ]);
    }
    out.summary = vec![
        ("max_abs_z", Cell::Num(report.max_abs_z)),
        ("chi_square", Cell::Num(report.chi_square)),
        ("dof", Cell::Int(report.dof as u64)),
        ("p_value", Cell::Num(report.p_value)),
        ("pass", Cell::Bool(report.pass)),
    ];
    eprintln!(
        "validate: max|z| = {}, chi-square = {} on {} dof, p = {}, {}",
        fmt_num(report.max_abs_z),
        fmt_num(report.chi_square),
        report.dof,
        fmt_num(report.p_value),
        if report.pass { "PASS" } else { "FAIL" }
    );
    Ok((out, report.pass))
}

fn resolve(args: &RunArgs) -> CliResult<RunConfig> {
    let flags = RunConfig::from_args(args);
    let cfg = match &args.config {
        Some(path) => flags.or(load_config(path).map_err(Failure::Usage)?),
        None => flags,
    };
    Ok(RunConfig {
        beta: Some(cfg.beta.unwrap_or(1.0)),
        format: Some(cfg.format.unwrap_or(Format::Csv)),
        ..cfg
    })
}

fn execute(command: &Command) -> CliResult<bool> {
    let args = command.args();
    let mut cfg = resolve(args)?;
    let (table, ok) = match command {
        Command::Pmf(_) => cmd_pmf(&mut cfg)?,
        Command::Moments(_) => cmd_moments(&mut cfg)?,
        Command::Lrd(_) => cmd_lrd(&mut cfg)?,
        Command::Sample(_) => cmd_sample(&mut cfg)?,
        Command::Validate(_) => cmd_validate(&mut cfg)?,
    };
    let format = cfg.format.unwrap_or(Format::Csv);
    let text = table.render(format, command.name(), &cfg);
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let target = args
        .output
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{}.{ext}", command.name()))));
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))?;
        }
    }
    Ok(ok)
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = execute(&cli.command);
    match &outcome {
        Err(Failure::Usage(msg)) => eprintln!("error: {msg}"),
        Err(Failure::Numerical(msg)) => eprintln!("numerical error: {msg}"),
        Ok(_) => {}
    }
    exit_code(&outcome)
}

fn exit_code(outcome: &CliResult<bool>) -> i32 {
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_STATISTICAL,
        Err(Failure::Usage(_)) => EXIT_USAGE,
        Err(Failure::Numerical(_)) => EXIT_NUMERICAL,
    }
}
