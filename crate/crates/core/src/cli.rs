//! Command-line front end: configuration merging, command dispatch and table emission.
//!
//! Data goes to stdout or `--out`; diagnostics (wall time, structured errors) go to stderr.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calabi::{constants, AnsatzSign, PotentialProfile};
use crate::collapse::{limit_measure_pushforward, model_volume, radial_length, CollapseProfile};
use crate::error::{ConeError, Result};
use crate::glue::{glued_field, newton_solve_radial, residual_scaling_scan, GlueConfig, GlueModel, NewtonOptions};
use crate::metric::curvature_quantities;
use crate::schauder::{schauder_probe, CorpusSpec, SamplingBudget};
use crate::verify::{run_criterion, solver_comparison, suites, Check};

/// Version stamped into every schema line; bump when a column set changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SigmaArg {
    Pos,
    Neg,
}

impl From<SigmaArg> for AnsatzSign {
    fn from(s: SigmaArg) -> Self {
        match s {
            SigmaArg::Pos => AnsatzSign::Positive,
            SigmaArg::Neg => AnsatzSign::Negative,
        }
    }
}

/// Fully resolved parameters of a run. `grid` and `jobs` fall back to per-command defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Vec<u32>,
    pub sigma: SigmaArg,
    pub beta: Vec<f64>,
    pub mu: f64,
    pub alpha: f64,
    pub grid: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: vec![1],
            sigma: SigmaArg::Pos,
            beta: vec![0.1, 0.05, 0.02],
            mu: 0.8,
            alpha: 0.5,
            grid: None,
            tol: 1e-10,
            seed: 7,
            out: None,
            format: OutputFormat::Csv,
            jobs: None,
        }
    }
}

/// The JSON config file: any subset of the flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<Vec<u32>>,
    pub sigma: Option<SigmaArg>,
    pub beta: Option<Vec<f64>>,
    pub mu: Option<f64>,
    pub alpha: Option<f64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Dimension(s), comma separated.
    #[arg(long, global = true)]
    pub n: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub sigma: Option<SigmaArg>,
    /// Cone parameters, comma separated.
    #[arg(long, global = true)]
    pub beta: Option<String>,
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON file with any of the above; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Integration constants I_n, J_n and the derived coefficients.
    Constants,
    /// φ₁ and its derivatives on a log-spaced t grid.
    Potential,
    /// The four curvature quantities of the model metric.
    Curvature,
    /// Interval length, limit measure error and volume of the collapsing model.
    Collapse,
    /// Glue-zone scalings and the radial Newton solve.
    Glue,
    /// Mode solver against the Green representation on a seeded corpus.
    Poisson,
    /// Sampled Schauder ratios across β.
    Schauder,
    /// Runs a named suite of acceptance checks.
    Verify { suite: String },
    /// Lists the registered suites.
    Suites,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "conelab", version, about = "Cone-angle Kähler–Einstein model toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Potential => "potential",
            Command::Curvature => "curvature",
            Command::Collapse => "collapse",
            Command::Glue => "glue",
            Command::Poisson => "poisson",
            Command::Schauder => "schauder",
            Command::Verify { .. } => "verify",
            Command::Suites => "suites",
        }
    }
}

fn parse_list<T: std::str::FromStr>(name: &'static str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| ConeError::param(name, format!("cannot parse `{x}`"))))
        .collect()
}

impl RunConfig {
    /// Defaults, then the config file, then the flags.
    pub fn resolve(flags: &Flags) -> Result<RunConfig> {
        let file = match &flags.config {
            Some(path) => read_config_file(path)?,
            None => ConfigFile::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            n: match &flags.n {
                Some(s) => parse_list("n", s)?,
                None => file.n.unwrap_or(d.n),
            },
            sigma: flags.sigma.or(file.sigma).unwrap_or(d.sigma),
            beta: match &flags.beta {
                Some(s) => parse_list("beta", s)?,
                None => file.beta.unwrap_or(d.beta),
            },
            mu: flags.mu.or(file.mu).unwrap_or(d.mu),
            alpha: flags.alpha.or(file.alpha).unwrap_or(d.alpha),
            grid: flags.grid.or(file.grid),
            tol: flags.tol.or(file.tol).unwrap_or(d.tol),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            out: flags.out.clone().or(file.out),
            format: flags.format.or(file.format).unwrap_or(d.format),
            jobs: flags.jobs.or(file.jobs),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() {
            return Err(ConeError::param("n", "empty list"));
        }
        if let Some(&bad) = self.n.iter().find(|&&n| n == 0) {
            return Err(ConeError::param("n", format!("dimension must be at least 1, got {bad}")));
        }
        if self.beta.is_empty() {
            return Err(ConeError::param("beta", "empty list"));
        }
        if let Some(&bad) = self.beta.iter().find(|&&b| !(b > 0.0 && b < 1.0)) {
            return Err(ConeError::param("beta", format!("must lie in (0, 1), got {bad}")));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(ConeError::param("mu", format!("must lie in (0, 1), got {}", self.mu)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConeError::param("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ConeError::param("tol", format!("must be positive, got {}", self.tol)));
        }
        if matches!(self.grid, Some(g) if g < 16) {
            return Err(ConeError::param("grid", "need at least 16 points"));
        }
        if self.jobs == Some(0) {
            return Err(ConeError::param("jobs", "need at least one worker"));
        }
        Ok(())
    }

    pub fn sign(&self) -> AnsatzSign {
        self.sigma.into()
    }
}

pub fn read_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| ConeError::Config(format!("{}: {e}", path.display())))
}

/// One table cell. Floats are written with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub schema: String,
    pub tool_version: String,
    pub config: RunConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(command: &str, config: &RunConfig, columns: &[&str]) -> Self {
        ResultTable {
            schema: format!("{command}/{SCHEMA_VERSION}"),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# schema={}", self.schema);
        let _ = writeln!(s, "# version={}", self.tool_version);
        let _ = writeln!(s, "# config={}", serde_json::to_string(&self.config).unwrap_or_default());
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default() + "\n"
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

fn cmd_constants(cfg: &RunConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new("constants", cfg, &["n", "i_n", "j_n", "c_n", "c_prime_n", "a_n", "i_n_error", "j_n_error"]);
    let reports = cfg.n.par_iter().map(|&n| constants(n)).collect::<Result<Vec<_>>>()?;
    for r in reports {
        t.push(vec![r.n.into(), r.i_n.into(), r.j_n.into(), r.c_n.into(), r.c_prime_n.into(), r.a_n.into(), r.i_n_error.into(), r.j_n_error.into()]);
    }
    Ok(t)
}

fn cmd_potential(cfg: &RunConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new("potential", cfg, &["n", "sigma", "t", "phi", "dphi", "ddphi", "first_integral_residual"]);
    let ts: Vec<f64> = log_grid(30.0, 1e-3, cfg.grid.unwrap_or(200)).into_iter().map(|x| -x).collect();
    let s = cfg.sign().sigma();
    for &n in &cfg.n {
        let p = PotentialProfile::new(n, cfg.sign())?;
        let rows = ts
            .par_iter()
            .map(|&x| -> Result<Vec<Cell>> {
                let d = p.derivatives(x)?;
                let rhs = if s > 0.0 { -(-d.phi).exp_m1() } else { 1.0 + d.phi.exp() };
                let res = (-s * d.d1).powi(n as i32 + 1) - rhs;
                Ok(vec![n.into(), p.sign().as_str().into(), x.into(), d.phi.into(), d.d1.into(), d.d2.into(), res.into()])
            })
            .collect::<Result<Vec<_>>>()?;
        rows.into_iter().for_each(|r| t.push(r));
    }
    Ok(t)
}

fn cmd_curvature(cfg: &RunConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(
        "curvature",
        cfg,
        &["n", "sigma", "beta", "u", "q1", "q2", "q3", "q4", "max_abs_q", "discrepancy", "bound_estimate"],
    );
    let us: Vec<f64> = log_grid(30.0, 1e-4, cfg.grid.unwrap_or(120)).into_iter().map(|x| -x).collect();
    for &n in &cfg.n {
        let p = PotentialProfile::new(n, cfg.sign())?;
        for &b in &cfg.beta {
            let rows = us.par_iter().map(|&u| curvature_quantities(&p, b, u)).collect::<Result<Vec<_>>>()?;
            for r in rows {
                t.push(vec![
                    n.into(),
                    p.sign().as_str().into(),
                    b.into(),
                    r.u.into(),
                    r.q[0].into(),
                    r.q[1].into(),
                    r.q[2].into(),
                    r.q[3].into(),
                    r.max_abs_q.into(),
                    r.max_discrepancy.into(),
                    r.bound_estimate.into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn cmd_collapse(cfg: &RunConfig) -> Result<ResultTable> {
    if cfg.sign() != AnsatzSign::Positive {
        return Err(ConeError::param("sigma", "collapse data exist for the positive sign only"));
    }
    let mut t = ResultTable::new(
        "collapse",
        cfg,
        &["n", "beta", "interval_length", "volume_closed_form", "volume_quadrature", "volume_rel_diff", "cdf_sup_error"],
    );
    let s_grid: Vec<f64> = (0..=cfg.grid.unwrap_or(40)).map(|i| FRAC_PI_2 * i as f64 / cfg.grid.unwrap_or(40) as f64).collect();
    for &n in &cfg.n {
        let p = PotentialProfile::new(n, AnsatzSign::Positive)?;
        let len = radial_length(&p, f64::NEG_INFINITY, 0.0)?;
        let rows = cfg
            .beta
            .par_iter()
            .map(|&b| -> Result<Vec<Cell>> {
                let cp = CollapseProfile::new(p.clone(), b, 1.0)?;
                let v = model_volume(&cp)?;
                let cdf = limit_measure_pushforward(&cp, &s_grid)?.iter().fold(0.0_f64, |m, r| m.max((r.cdf - r.cdf_limit).abs()));
                Ok(vec![n.into(), b.into(), len.into(), v.closed_form.into(), v.quadrature.into(), v.rel_diff.into(), cdf.into()])
            })
            .collect::<Result<Vec<_>>>()?;
        rows.into_iter().for_each(|r| t.push(r));
    }
    Ok(t)
}

fn cmd_glue(cfg: &RunConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(
        "glue",
        cfg,
        &[
            "n",
            "mu",
            "beta",
            "scale",
            "potential_difference_0",
            "potential_difference_1",
            "potential_difference_2",
            "residual_0",
            "residual_1",
            "residual_2",
            "weighted_residual",
            "newton_iterations",
            "newton_residual",
            "newton_correction",
        ],
    );
    let opts = NewtonOptions { tol: cfg.tol, nodes: cfg.grid.unwrap_or(NewtonOptions::default().nodes), ..NewtonOptions::default() };
    for &n in &cfg.n {
        let p = PotentialProfile::new(n, AnsatzSign::Positive)?;
        let scan = residual_scaling_scan(&p, n, cfg.mu, &cfg.beta, 0.0)?;
        let newton = cfg
            .beta
            .par_iter()
            .map(|&b| -> Result<(usize, f64, f64)> {
                let model = GlueModel::with_profile(GlueConfig::new(n, b, cfg.mu)?, p.clone())?;
                let out = newton_solve_radial(&model, &glued_field(&model, opts.nodes)?, opts)?;
                Ok((out.iterations, *out.trace.last().unwrap_or(&f64::NAN), out.correction_sup))
            })
            .collect::<Result<Vec<_>>>()?;
        for (s, (it, res, corr)) in scan.samples.iter().zip(newton) {
            let [p0, p1, p2] = s.potential_difference;
            let [r0, r1, r2] = s.residual;
            t.push(vec![
                n.into(),
                cfg.mu.into(),
                s.beta.into(),
                s.scale.into(),
                p0.into(),
                p1.into(),
                p2.into(),
                r0.into(),
                r1.into(),
                r2.into(),
                s.weighted_residual.into(),
                it.into(),
                res.into(),
                corr.into(),
            ]);
        }
    }
    Ok(t)
}

fn cmd_poisson(cfg: &RunConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new("poisson", cfg, &["problem", "beta", "mode_vs_green", "mode_vs_closed_form", "tail_energy"]);
    let spec = CorpusSpec { seed: cfg.seed, ..CorpusSpec::default() };
    for c in solver_comparison(&cfg.beta, &spec, cfg.grid.unwrap_or(400))? {
        t.push(vec![c.problem.into(), c.beta.into(), c.mode_vs_green.into(), c.mode_vs_closed_form.into(), c.tail_energy.into()]);
    }
    Ok(t)
}

fn cmd_schauder(cfg: &RunConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new("schauder", cfg, &["beta", "alpha", "donaldson_ratio", "full_ratio", "decay_ratio", "problems"]);
    let spec = CorpusSpec { seed: cfg.seed, problems: 12, ..CorpusSpec::default() };
    let mut budget = SamplingBudget { seed: cfg.seed.wrapping_add(4), ..SamplingBudget::default() };
    if let Some(g) = cfg.grid {
        budget.n_r = g;
    }
    let table = schauder_probe(&cfg.beta, cfg.alpha, &spec, &budget)?;
    for r in table.rows {
        t.push(vec![r.beta.into(), table.alpha.into(), r.donaldson_max.into(), r.full_max.into(), r.decay_max.into(), r.problems.into()]);
    }
    Ok(t)
}

/// One row per measurement. Returns the table and whether every criterion passed.
fn cmd_verify(cfg: &RunConfig, suite: &str) -> Result<(ResultTable, bool)> {
    let suite = crate::verify::find_suite(suite)?;
    let mut t = ResultTable::new(
        "verify",
        cfg,
        &["criterion", "name", "measurement", "value", "check", "limit", "margin", "passed", "criterion_passed"],
    );
    let mut all = true;
    for &id in &suite.criteria {
        let o = run_criterion(id, cfg.seed)?;
        eprintln!("criterion {id} ({}) {} in {:.2} s", o.name, if o.passed() { "PASS" } else { "FAIL" }, o.elapsed_s);
        all &= o.passed();
        for m in &o.measurements {
            let (kind, limit) = match m.check {
                Check::AtMost(x) => ("at_most", x),
                Check::AtLeast(x) => ("at_least", x),
                Check::Within { target, .. } => ("within", target),
                Check::Finite => ("finite", f64::NAN),
                Check::Info => ("info", f64::NAN),
            };
            t.push(vec![
                u32::from(id).into(),
                o.name.as_str().into(),
                m.key.as_str().into(),
                m.value.into(),
                kind.into(),
                limit.into(),
                m.check.margin(m.value).into(),
                u32::from(m.passed()).into(),
                u32::from(o.passed()).into(),
            ]);
        }
    }
    Ok((t, all))
}

fn cmd_suites(cfg: &RunConfig) -> ResultTable {
    let mut t = ResultTable::new("suites", cfg, &["suite", "criteria", "description"]);
    for s in suites() {
        let ids: Vec<String> = s.criteria.iter().map(u8::to_string).collect();
        t.push(vec![s.name.into(), ids.join(" ").into(), s.description.into()]);
    }
    t
}

/// Outcome of a command: the table and whether the command's own checks passed.
pub struct Outcome {
    pub table: ResultTable,
    pub checks_passed: bool,
}

/// Runs `command` under `cfg` on a pool of `cfg.jobs` workers.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| ConeError::Config(e.to_string()))?;
    pool.install(|| {
        let table = match command {
            Command::Constants => cmd_constants(cfg)?,
            Command::Potential => cmd_potential(cfg)?,
            Command::Curvature => cmd_curvature(cfg)?,
            Command::Collapse => cmd_collapse(cfg)?,
            Command::Glue => cmd_glue(cfg)?,
            Command::Poisson => cmd_poisson(cfg)?,
            Command::Schauder => cmd_schauder(cfg)?,
            Command::Suites => cmd_suites(cfg),
            Command::Verify { suite } => {
                let (table, ok) = cmd_verify(cfg, suite)?;
                return Ok(Outcome { table, checks_passed: ok });
            }
        };
        Ok(Outcome { table, checks_passed: true })
    })
}

/// Exit codes: 0 success, 1 solver or I/O failure, 2 usage error, 3 a verify criterion failed.
pub fn exit_code(e: &ConeError) -> i32 {
    match e {
        ConeError::InvalidParameter { .. } | ConeError::Config(_) | ConeError::UnknownSuite(_) => 2,
        _ => 1,
    }
}

pub fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            eprintln!("{}", error_json("usage", e.to_string().trim()));
            return 2;
        }
    };
    let start = Instant::now();
    let result = RunConfig::resolve(&cli.flags).and_then(|cfg| {
        let outcome = execute(&cli.command, &cfg)?;
        let text = outcome.table.render(cfg.format);
        match &cfg.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(outcome.checks_passed)
    });
    eprintln!("wall_time_s={:.3}", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => 0,
        Ok(false) => 3,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string()));
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"n": [2, 3], "mu": 0.7, "seed": 5}"#).unwrap();
        let flags = Flags { config: Some(path), mu: Some(0.6), ..Flags::default() };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!(cfg.n, vec![2, 3]);
        assert_eq!(cfg.mu, 0.6);
        assert_eq!(cfg.seed, 5);
    }

    #[test]
    fn config_echo_round_trips() {
        let cfg = RunConfig { grid: Some(64), beta: vec![0.25, 0.1], ..RunConfig::default() };
        let t = ResultTable::new("x", &cfg, &["a"]);
        let csv = t.to_csv();
        let line = csv.lines().find_map(|l| l.strip_prefix("# config=")).unwrap();
        let back: RunConfig = serde_json::from_str(line).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn empty_beta_list_is_a_usage_error() {
        let flags = Flags { beta: Some(String::new()), ..Flags::default() };
        let e = RunConfig::resolve(&flags).unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }
}
