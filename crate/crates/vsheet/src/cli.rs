//! Command-line front end.
//!
//! ```text
//! vsheet critical-points|solve|sweep|verify --config <file> [--out <dir>] [--jobs <n>]
//! ```
//!
//! Exit codes: 0 success, 1 numerical failure, 2 input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{error, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::DomainModel;
use crate::error::Error;
use crate::kirchhoff_routh::{self, CriticalOptions, CriticalPointReport, VortexConfig};
use crate::sheet::SheetState;
use crate::solver::{self, SolveOptions, SolveTrace};
use crate::vec2::Point;
use crate::verify::{self, ResidualReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "vsheet",
    version,
    about = "Stationary vortex sheets near point-vortex equilibria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate a critical point of the Kirchhoff-Routh function from the configured seed.
    CriticalPoints(CommonArgs),
    /// Solve at one (epsilon, tau) point.
    Solve(CommonArgs),
    /// Solve on the epsilon x tau grid in parallel.
    Sweep(CommonArgs),
    /// Check a saved state with the direct quadrature oracle.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps (default: number of cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexSeed {
    pub center: Point,
    pub strength: f64,
}

fn default_tau() -> Vec<f64> {
    vec![0.0]
}
fn default_n() -> usize {
    128
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_outer() -> usize {
    50
}
fn default_threshold() -> f64 {
    1e-8
}

/// Run configuration; see the README for the schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: Option<DomainModel>,
    #[serde(default)]
    pub vortices: Vec<VortexSeed>,
    /// Target values for `sweep`; the continuation schedule for `solve`
    /// when it has more than one entry.
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default = "default_tau")]
    pub tau: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_tol")]
    pub tol_residual: f64,
    #[serde(default = "default_tol")]
    pub tol_center: f64,
    #[serde(default = "default_max_outer")]
    pub max_outer: usize,
    /// Oracle residual accepted by `verify`.
    #[serde(default = "default_threshold")]
    pub verify_threshold: f64,
    /// State file for `verify`, relative to the config file.
    #[serde(default)]
    pub state: Option<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

/// Input problems map to exit 2, everything else to exit 1.
#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Input(_) => Failure::Input(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl RunConfig {
    pub fn load(path: &Path) -> std::result::Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.epsilon.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err("epsilon values must be positive".into());
        }
        if self.tau.is_empty() || self.tau.iter().any(|t| !t.is_finite()) {
            return Err("tau must be a nonempty list of finite values".into());
        }
        if !(self.tol_residual > 0.0 && self.tol_center > 0.0 && self.verify_threshold > 0.0) {
            return Err("tolerances must be positive".into());
        }
        crate::spectral::check_grid(self.n).map_err(|e| e.to_string())?;
        Ok(())
    }

    fn domain(&self) -> CliResult<DomainModel> {
        self.domain
            .ok_or_else(|| Failure::Input("config is missing \"domain\"".into()))
    }

    fn seed(&self) -> CliResult<VortexConfig> {
        if self.vortices.is_empty() {
            return Err(Failure::Input("config has no vortices".into()));
        }
        let c = VortexConfig::new(
            self.vortices.iter().map(|v| v.center).collect(),
            self.vortices.iter().map(|v| v.strength).collect(),
        );
        c.validate(self.domain()?)?;
        Ok(c)
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            max_outer: self.max_outer,
            tol_residual: self.tol_residual,
            tol_center: self.tol_center,
            n: self.n,
            ..SolveOptions::default()
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> u8 {
    let (common, which) = match &cli.command {
        Command::CriticalPoints(a) => (a, "critical-points"),
        Command::Solve(a) => (a, "solve"),
        Command::Sweep(a) => (a, "sweep"),
        Command::Verify(a) => (a, "verify"),
    };
    let cfg = match RunConfig::load(&common.config) {
        Ok(c) => c,
        Err(msg) => {
            error!("{msg}");
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let out = common
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let result = match &cli.command {
        Command::CriticalPoints(_) => cmd_critical_points(&cfg, &out),
        Command::Solve(_) => cmd_solve(&cfg, &out),
        Command::Sweep(_) => cmd_sweep(&cfg, &out, common.jobs),
        Command::Verify(_) => cmd_verify(&cfg, &common.config, &out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(Failure::Input(msg)) => {
            eprintln!("error ({which}): {msg}");
            EXIT_INPUT
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("failure ({which}): {msg}");
            EXIT_FAILURE
        }
    }
}

/// Write through a temporary file and rename into place.
fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io = |e: std::io::Error| Failure::Numerical(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output")
}

fn critical_point(cfg: &RunConfig) -> CliResult<CriticalPointReport> {
    Ok(kirchhoff_routh::find_critical(
        cfg.domain()?,
        &cfg.seed()?,
        &CriticalOptions::default(),
    )?)
}

fn cmd_critical_points(cfg: &RunConfig, out: &Path) -> CliResult<bool> {
    let report = critical_point(cfg)?;
    info!(
        "critical point search: converged={} nondegenerate={} |grad|={:e}",
        report.converged, report.nondegenerate, report.gradient_norm
    );
    write_atomic(&out.join("critical_points.json"), &to_json(&vec![&report]))?;
    println!("{}", to_json(&report));
    Ok(report.nondegenerate)
}

fn anchor(cfg: &RunConfig) -> CliResult<VortexConfig> {
    let report = critical_point(cfg)?;
    if !report.nondegenerate {
        return Err(Failure::Numerical(format!(
            "no nondegenerate critical point found from the seed ({})",
            report.message
        )));
    }
    Ok(report.point)
}

fn stem(eps: f64, tau: f64) -> String {
    format!("eps{eps}_tau{tau}")
}

#[derive(Serialize)]
struct JobSummary {
    epsilon: f64,
    tau: f64,
    converged: bool,
    residual: f64,
    message: String,
    files: Vec<String>,
}

fn run_job(
    domain: DomainModel,
    x0: &VortexConfig,
    eps: f64,
    tau: f64,
    opts: &SolveOptions,
    out: &Path,
) -> CliResult<JobSummary> {
    let trace = solver::solve_at(domain, x0, eps, tau, opts)?;
    let files = write_solution(&trace, &out.join(stem(eps, tau)))?;
    Ok(JobSummary {
        epsilon: eps,
        tau,
        converged: trace.converged,
        residual: trace.last_residual(),
        message: trace.message.clone(),
        files,
    })
}

/// Trace, state, curve CSV and SVG plot; partial results are written too.
fn write_solution(trace: &SolveTrace, base: &Path) -> CliResult<Vec<String>> {
    let mut files = Vec::new();
    let mut put = |suffix: &str, text: String| -> CliResult<()> {
        let p = PathBuf::from(format!("{}{suffix}", base.display()));
        write_atomic(&p, &text)?;
        files.push(p.display().to_string());
        Ok(())
    };
    put(".trace.json", to_json(trace))?;
    let s = &trace.final_state;
    put(".state.json", s.to_json())?;
    if s.epsilon > 0.0 {
        put(".csv", s.curve_csv()?)?;
        put(".svg", svg_plot(s)?)?;
    }
    Ok(files)
}

fn cmd_solve(cfg: &RunConfig, out: &Path) -> CliResult<bool> {
    if cfg.epsilon.is_empty() {
        return Err(Failure::Input("epsilon schedule is empty".into()));
    }
    if cfg.tau.len() != 1 {
        return Err(Failure::Input(
            "solve takes exactly one tau value; use sweep for several".into(),
        ));
    }
    let domain = cfg.domain()?;
    let x0 = anchor(cfg)?;
    let mut opts = cfg.solve_options();
    let target = *cfg.epsilon.last().expect("nonempty");
    if cfg.epsilon.len() > 1 {
        opts.continuation_steps = cfg.epsilon.clone();
    }
    let job = run_job(domain, &x0, target, cfg.tau[0], &opts, out)?;
    println!("{}", to_json(&job));
    Ok(job.converged)
}

fn cmd_sweep(cfg: &RunConfig, out: &Path, jobs: Option<usize>) -> CliResult<bool> {
    if cfg.epsilon.is_empty() {
        return Err(Failure::Input("epsilon schedule is empty".into()));
    }
    if jobs == Some(0) {
        return Err(Failure::Input("--jobs must be positive".into()));
    }
    let domain = cfg.domain()?;
    let x0 = anchor(cfg)?;
    let opts = cfg.solve_options();
    let grid: Vec<(f64, f64)> = cfg
        .epsilon
        .iter()
        .flat_map(|&e| cfg.tau.iter().map(move |&t| (e, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Numerical(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CliResult<JobSummary>> = pool.install(|| {
        grid.par_iter()
            .map(|&(e, t)| run_job(domain, &x0, e, t, &opts, out))
            .collect()
    });
    let mut summaries = Vec::new();
    for r in results {
        summaries.push(r?);
    }
    write_atomic(&out.join("sweep.json"), &to_json(&summaries))?;
    println!("{}", to_json(&summaries));
    Ok(summaries.iter().all(|s| s.converged))
}

#[derive(Serialize)]
struct VerifyOutput {
    report: ResidualReport,
    convex: Vec<bool>,
    threshold: f64,
    passed: bool,
}

fn cmd_verify(cfg: &RunConfig, config_path: &Path, out: &Path) -> CliResult<bool> {
    let rel = cfg
        .state
        .as_ref()
        .ok_or_else(|| Failure::Input("config is missing \"state\"".into()))?;
    let path = if rel.is_absolute() {
        rel.clone()
    } else {
        config_path.parent().unwrap_or(Path::new(".")).join(rel)
    };
    let text = fs::read_to_string(&path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let state = SheetState::from_json(&text).map_err(|e| Failure::Input(e.to_string()))?;
    let report = verify::direct_residual(&state)?;
    let convex = (0..state.m())
        .map(|i| state.convexity_check(i))
        .collect::<crate::Result<Vec<_>>>()?;
    let passed = report.max_residual() < cfg.verify_threshold && convex.iter().all(|&c| c);
    let output = VerifyOutput {
        report,
        convex,
        threshold: cfg.verify_threshold,
        passed,
    };
    write_atomic(&out.join("verify.json"), &to_json(&output))?;
    println!("{}", to_json(&output));
    Ok(passed)
}

/// SVG with the domain boundary, the sheets, and their centers.
pub fn svg_plot(state: &SheetState) -> crate::Result<String> {
    let curves: Vec<Vec<Point>> = (0..state.m()).map(|i| state.points(i)).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in curves.iter().flatten().chain(&state.centers) {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    match state.domain {
        DomainModel::UnitDisk => {
            lo = [-1.1, -1.1];
            hi = [1.1, 1.1];
        }
        DomainModel::HalfPlane => lo[1] = lo[1].min(0.0),
        DomainModel::FreePlane => {}
    }
    let pad = 0.1 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-3);
    let (x0, y0) = (lo[0] - pad, lo[1] - pad);
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let stroke = w.max(h) / 400.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="{}" viewBox="{x0} {} {w} {h}">"#,
        (600.0 * h / w).round(),
        -(y0 + h)
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke}">"#);
    match state.domain {
        DomainModel::UnitDisk => {
            let _ = writeln!(s, r##"<circle cx="0" cy="0" r="1" stroke="#444"/>"##);
        }
        DomainModel::HalfPlane => {
            let _ = writeln!(s, r##"<line x1="{x0}" y1="0" x2="{}" y2="0" stroke="#444"/>"##, x0 + w);
        }
        DomainModel::FreePlane => {}
    }
    for c in &curves {
        let pts: Vec<String> = c.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
        let _ = writeln!(s, r##"<polygon points="{}" stroke="#1f77b4"/>"##, pts.join(" "));
    }
    for c in &state.centers {
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{}" fill="#d62728" stroke="none"/>"##,
            c[0],
            c[1],
            2.0 * stroke
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
