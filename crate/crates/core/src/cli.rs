//! The `sphfn` command-line front end.
//!
//! Every subcommand reads one JSON config (`--config`). Top-level
//! [`EvalConfig`] fields sit next to the command's own fields, and
//! `--seed`, `--samples` and `--tol` override them. Data goes to `--out`
//! (or standard output); with `--out` a `<out>.manifest.json` is written too.
//!
//! Exit codes: 0 ok, 1 a check failed, 2 config error, 3 evaluation error.
//! Failures print a JSON object to standard error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bessel::closed_form_at;
use crate::error::Error;
use crate::eval::{eval_batch, eval_spherical, factor_seed, EvalConfig, Method, MethodPreference};
use crate::group::{build_group, orbit_equal_real, GroupElement, GroupHandle, GroupSpec, HaarSampler, SymplecticExtension};
use crate::invariants::{fingerprint_with_degree, separating_probe, QuotientPoint};
use crate::motion::MotionElement;
use crate::posdef::{posdef_verdict, Verdict};
use crate::spectral::SpectralParam;
use crate::transform::{spherical_transform, RadialProfile, TransformInput};
use crate::verify::{eigen_check, verify_functional_equation, DEFAULT_STEP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Residual bound for the functional equation under exact evaluation,
/// relative to max(1, |φ(g₁)φ(g₂)|).
pub const FUNCTIONAL_TOL: f64 = 1e-10;
const DEFAULT_TRIPLES: usize = 20;
const DEFAULT_EIGEN_TOL: f64 = 1e-4;
const MOTION_SALT: u64 = 0x3C6E_F372_FE94_F82B;

#[derive(Parser, Debug)]
#[command(name = "sphfn", version, about = "Spherical functions on Euclidean space for compact isotropy groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate φ_ξ^K at probe points (CSV).
    Eval(CommonArgs),
    /// Run a verification suite (JSON report).
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Spherical transform of a radial profile or grid function (CSV).
    Transform(CommonArgs),
    /// Invariant-polynomial fingerprints and equivalence (JSON).
    Fingerprint(CommonArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Functional,
    Eigen,
    Posdef,
    Equivalence,
    Crossgroup,
}

/// Probe points r·d for r on an equispaced grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Defaults to the first coordinate axis.
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossGroupConfig {
    #[serde(default = "default_cross_groups")]
    pub groups: Vec<GroupSpec>,
    /// (λ, r) pairs; ξ = λe₁, x = re₁.
    #[serde(default = "default_cross_probes")]
    pub probes: Vec<(f64, f64)>,
}

fn default_cross_groups() -> Vec<GroupSpec> {
    vec![
        GroupSpec::SpecialOrthogonal { n: 4 },
        GroupSpec::Unitary { m: 2 },
        GroupSpec::SpecialUnitary { m: 2 },
        GroupSpec::Symplectic { m: 1, extension: SymplecticExtension::None },
    ]
}

fn default_cross_probes() -> Vec<(f64, f64)> {
    vec![(1.0, 0.5), (2.0, 1.5)]
}

impl Default for CrossGroupConfig {
    fn default() -> Self {
        CrossGroupConfig { groups: default_cross_groups(), probes: default_cross_probes() }
    }
}

/// The config document shared by all subcommands; each reads the fields it needs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub xi: Option<SpectralParam>,
    #[serde(default)]
    pub xis: Option<Vec<SpectralParam>>,
    /// Shorthand for ξ = λe₁.
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub radial_grid: Option<RadialGrid>,
    #[serde(default)]
    pub pairs: Option<Vec<(SpectralParam, SpectralParam)>>,
    /// Expected answers for `pairs` in the equivalence suite.
    #[serde(default)]
    pub expected: Option<Vec<bool>>,
    /// Expected verdict of the posdef suite.
    #[serde(default)]
    pub expect: Option<Verdict>,
    #[serde(default)]
    pub triples: Option<usize>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub eigen_tol: Option<f64>,
    #[serde(default)]
    pub profile: Option<TransformInput>,
    /// CSV with columns r, re[, im].
    #[serde(default)]
    pub profile_csv: Option<PathBuf>,
    #[serde(default)]
    pub crossgroup: Option<CrossGroupConfig>,
    #[serde(flatten)]
    pub eval: EvalConfig,
}

#[derive(Debug)]
pub enum CliError {
    Config { field: Option<String>, message: String },
    Runtime(Error),
    Io(String),
}

impl CliError {
    fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config { field: Some(field.to_string()), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            CliError::Runtime(_) | CliError::Io(_) => EXIT_RUNTIME,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Config { field, message } => {
                json!({"error": "ConfigError", "field": field, "message": message, "exit_code": self.exit_code()})
            }
            CliError::Runtime(e) => json!({"error": e.kind(), "message": e.to_string(), "exit_code": self.exit_code()}),
            CliError::Io(m) => json!({"error": "IoError", "message": m, "exit_code": self.exit_code()}),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

/// One verification check in a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check { name: name.into(), measured, threshold, passed: measured <= threshold, detail: None }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// What a command produced: the data text, the checks it ran and the seeds it used.
pub struct Outcome {
    pub data: String,
    pub checks: Vec<Check>,
    pub seeds: Vec<u64>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_CONFIG } else { EXIT_OK };
            }
            let err = CliError::Config { field: None, message: e.to_string().trim().to_string() };
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(passed) => {
            if passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}

fn execute(command: &Command) -> Result<bool, CliError> {
    let (name, common) = match command {
        Command::Eval(c) => ("eval", c),
        Command::Verify { common, .. } => ("verify", common),
        Command::Transform(c) => ("transform", c),
        Command::Fingerprint(c) => ("fingerprint", c),
    };
    let config = load_config(common)?;
    let started = Instant::now();
    let work = || -> Result<Outcome, CliError> {
        match command {
            Command::Eval(_) => cmd_eval(&config),
            Command::Verify { suite, .. } => cmd_verify(*suite, &config),
            Command::Transform(_) => cmd_transform(&config),
            Command::Fingerprint(_) => cmd_fingerprint(&config),
        }
    };
    let outcome = match common.threads {
        Some(0) => return Err(CliError::config("threads", "--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let passed = outcome.passed();
    match &common.out {
        Some(path) => {
            write_file(path, &outcome.data)?;
            let suite = match command {
                Command::Verify { suite, .. } => Some(*suite),
                _ => None,
            };
            let manifest = json!({
                "command": name,
                "suite": suite,
                "version": env!("CARGO_PKG_VERSION"),
                "config": serde_json::to_value(&config).map_err(|e| CliError::Io(e.to_string()))?,
                "seeds": outcome.seeds,
                "threads": common.threads,
                "duration_seconds": started.elapsed().as_secs_f64(),
                "outputs": [path.display().to_string()],
                "checks": outcome.checks,
                "passed": passed,
            });
            let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
            write_file(&manifest_path(path), &text)?;
        }
        None => print!("{}", outcome.data),
    }
    Ok(passed)
}

/// `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads and parses the config, applying flag overrides.
pub fn load_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::config("config", format!("{}: {e}", common.config.display())))?;
    let mut config: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Config { field: None, message: e.to_string() })?;
    if let Some(seed) = common.seed {
        config.eval.seed = seed;
    }
    if let Some(samples) = common.samples {
        config.eval.samples = samples;
    }
    if let Some(tol) = common.tol {
        config.eval.tol = tol;
    }
    if config.eval.samples == 0 {
        return Err(CliError::config("samples", "must be positive"));
    }
    if !(config.eval.tol >= 0.0) {
        return Err(CliError::config("tol", "must be non-negative"));
    }
    Ok(config)
}

impl RunConfig {
    pub fn handle(&self) -> Result<GroupHandle, CliError> {
        let spec = self.group.as_ref().ok_or_else(|| CliError::config("group", "missing field `group`"))?;
        build_group(spec).map_err(|e| match e {
            Error::InvalidSpec(_) | Error::NonOrthogonalGenerator { .. } => CliError::config("group", e.to_string()),
            other => CliError::Runtime(other),
        })
    }

    fn xi(&self, n: usize) -> Result<SpectralParam, CliError> {
        let xi = self.xi.clone().ok_or_else(|| CliError::config("xi", "missing field `xi`"))?;
        if xi.dim() != n {
            return Err(CliError::config("xi", format!("expected {n} components, found {}", xi.dim())));
        }
        Ok(xi)
    }

    /// `xis`, then `lambdas` (as λe₁), then `xi`.
    fn xi_list(&self, n: usize) -> Result<Vec<SpectralParam>, CliError> {
        let list = if let Some(xs) = &self.xis {
            xs.clone()
        } else if let Some(ls) = &self.lambdas {
            ls.iter().map(|&l| axis_vector(n, l)).collect()
        } else if self.xi.is_some() {
            vec![self.xi(n)?]
        } else {
            return Err(CliError::config("xis", "give `xis`, `lambdas` or `xi`"));
        };
        for (i, xi) in list.iter().enumerate() {
            if xi.dim() != n {
                return Err(CliError::config("xis", format!("entry {i}: expected {n} components, found {}", xi.dim())));
            }
        }
        Ok(list)
    }

    fn probe_points(&self, n: usize) -> Result<Vec<DVector<f64>>, CliError> {
        if let Some(points) = &self.points {
            return points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    if p.len() != n {
                        return Err(CliError::config("points", format!("point {i}: expected {n} coordinates, found {}", p.len())));
                    }
                    Ok(DVector::from_column_slice(p))
                })
                .collect();
        }
        if let Some(grid) = &self.radial_grid {
            let dir = match &grid.direction {
                Some(d) if d.len() != n => {
                    return Err(CliError::config("radial_grid.direction", format!("expected {n} coordinates, found {}", d.len())))
                }
                Some(d) => DVector::from_column_slice(d),
                None => DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 }),
            };
            if dir.norm() == 0.0 {
                return Err(CliError::config("radial_grid.direction", "must be nonzero"));
            }
            let dir = dir.normalize();
            if grid.count == 0 {
                return Err(CliError::config("radial_grid.count", "must be positive"));
            }
            let step = if grid.count > 1 { (grid.stop - grid.start) / (grid.count - 1) as f64 } else { 0.0 };
            return Ok((0..grid.count).map(|i| &dir * (grid.start + step * i as f64)).collect());
        }
        Err(CliError::config("points", "give `points` or `radial_grid`"))
    }
}

fn axis_vector(n: usize, lambda: f64) -> SpectralParam {
    let mut v = vec![0.0; n];
    v[0] = lambda;
    SpectralParam::real(&v)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with columns x0..x{n−1}, re, im, stderr, method.
pub fn cmd_eval(config: &RunConfig) -> Result<Outcome, CliError> {
    let handle = config.handle()?;
    let n = handle.ambient_dim();
    let xi = config.xi(n)?;
    let points = config.probe_points(n)?;
    let results = eval_batch(&handle, &xi, &points, &config.eval)?;
    let mut out = String::new();
    let header: Vec<String> = (0..n).map(|i| format!("x{i}")).chain(["re", "im", "stderr", "method"].map(String::from)).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for (x, r) in points.iter().zip(&results) {
        let mut row: Vec<String> = x.iter().map(|v| num(*v)).collect();
        row.extend([num(r.value.re), num(r.value.im), num(r.stderr), r.method.as_str().to_string()]);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(Outcome { data: out, checks: Vec::new(), seeds: vec![config.eval.seed] })
}

/// Runs one suite and renders its JSON report.
pub fn cmd_verify(suite: Suite, config: &RunConfig) -> Result<Outcome, CliError> {
    let (checks, extra, seeds) = match suite {
        Suite::Functional => verify_functional(config)?,
        Suite::Eigen => verify_eigen(config)?,
        Suite::Posdef => verify_posdef(config)?,
        Suite::Equivalence => verify_equivalence(config)?,
        Suite::Crossgroup => verify_crossgroup(config)?,
    };
    let passed = checks.iter().all(|c| c.passed);
    let report = json!({
        "suite": suite,
        "group": config.group,
        "passed": passed,
        "checks": checks,
        "details": extra,
    });
    let data = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    Ok(Outcome { data, checks, seeds })
}

type SuiteResult = Result<(Vec<Check>, Value, Vec<u64>), CliError>;

fn random_motions(handle: &GroupHandle, seed: u64, count: usize) -> Result<Vec<MotionElement>, CliError> {
    let n = handle.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ MOTION_SALT);
    let mut sampler = if handle.has_sampler() { Some(HaarSampler::new(handle, seed ^ MOTION_SALT.rotate_left(7))?) } else { None };
    Ok((0..count)
        .map(|_| {
            let x = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let k = match sampler.as_mut() {
                Some(s) => s.next().expect("endless sampler"),
                None => GroupElement::identity(n),
            };
            MotionElement { translation: x, rotation: k }
        })
        .collect())
}

fn verify_functional(config: &RunConfig) -> SuiteResult {
    let handle = config.handle()?;
    let n = handle.ambient_dim();
    let cfg = &config.eval;
    let fixed_xi = match &config.xi {
        Some(_) => Some(config.xi(n)?),
        None => None,
    };
    let triples = config.triples.unwrap_or(DEFAULT_TRIPLES);
    let motions = random_motions(&handle, cfg.seed, 2 * triples)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ MOTION_SALT ^ 1);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for t in 0..triples {
        let xi = fixed_xi.clone().unwrap_or_else(|| {
            let re: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let im: Vec<f64> = (0..n).map(|_| 0.5 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect();
            SpectralParam::from_parts(&re, &im).expect("equal lengths")
        });
        let r = verify_functional_equation(&handle, &xi, &motions[2 * t], &motions[2 * t + 1], &cfg.with_seed(factor_seed(cfg.seed, t)))?;
        let threshold = if r.method == Method::MonteCarlo || r.stderr > 0.0 {
            3.0 * r.stderr
        } else {
            FUNCTIONAL_TOL * r.lhs.norm().max(1.0)
        };
        checks.push(Check::at_most(format!("functional[{t}]"), r.residual, threshold).with_detail(r.method.as_str()));
        rows.push(json!({"xi": xi, "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual, "stderr": r.stderr}));
    }
    Ok((checks, Value::Array(rows), vec![cfg.seed]))
}

fn default_eigen_point(n: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| 0.3 + 0.4 * i as f64 / n as f64)
}

fn verify_eigen(config: &RunConfig) -> SuiteResult {
    let handle = config.handle()?;
    let n = handle.ambient_dim();
    let xi = config.xi(n)?;
    let points = if config.points.is_some() || config.radial_grid.is_some() { config.probe_points(n)? } else { vec![default_eigen_point(n)] };
    let h = config.step.unwrap_or(DEFAULT_STEP);
    if !(h > 0.0) {
        return Err(CliError::config("step", "must be positive"));
    }
    let tol = config.eigen_tol.unwrap_or(DEFAULT_EIGEN_TOL);
    let target = xi.square();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let threshold = tol * target.norm().max(1.0);
        match eigen_check(&handle, &xi, x, h, &config.eval) {
            Ok(est) => {
                checks.push(Check::at_most(format!("eigen[{i}]"), (est - target).norm(), threshold));
                rows.push(json!({"x": x.as_slice(), "estimate": est, "expected": target}));
            }
            Err(e @ Error::ProbeAtZero { .. }) => {
                checks.push(Check { name: format!("eigen[{i}]"), measured: f64::NAN, threshold, passed: false, detail: Some(e.to_string()) });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok((checks, Value::Array(rows), vec![config.eval.seed]))
}

/// The verdict predicted for ξ: positive definite exactly for parameters
/// equivalent to a real one. For sphere-transitive K that means b(ξ,ξ) ≥ 0.
fn predicted_verdict(handle: &GroupHandle, xi: &SpectralParam) -> Verdict {
    let real_like = if handle.is_sphere_transitive() {
        let b = xi.square();
        b.im.abs() <= 1e-12 * b.norm().max(1.0) && b.re >= -1e-12
    } else {
        xi.is_real()
    };
    if real_like {
        Verdict::ConsistentPSD
    } else {
        Verdict::ViolatedPSD
    }
}

fn verify_posdef(config: &RunConfig) -> SuiteResult {
    let handle = config.handle()?;
    let xi = config.xi(handle.ambient_dim())?;
    let report = posdef_verdict(&handle, &xi, &config.eval)?;
    let expected = config.expect.unwrap_or_else(|| predicted_verdict(&handle, &xi));
    let bound = -(config.eval.tol + 3.0 * report.propagated_stderr);
    let check = Check {
        name: "verdict".into(),
        measured: report.min_eigenvalue,
        threshold: bound,
        passed: report.verdict == expected,
        detail: Some(format!("{:?}, expected {expected:?}", report.verdict)),
    };
    let diag = (0..report.matrix.nrows()).map(|i| (report.matrix[(i, i)] - Complex64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
    let diag_sigma = report.stderr_matrix.diagonal().max();
    let diag_check = Check::at_most("diagonal", diag, (3.0 * diag_sigma).max(1e-12));
    let details = serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?;
    Ok((vec![check, diag_check], details, vec![config.eval.seed]))
}

fn verify_equivalence(config: &RunConfig) -> SuiteResult {
    let handle = config.handle()?;
    let n = handle.ambient_dim();
    let pairs = config.pairs.clone().ok_or_else(|| CliError::config("pairs", "missing field `pairs`"))?;
    if let Some(exp) = &config.expected {
        if exp.len() != pairs.len() {
            return Err(CliError::config("expected", format!("{} entries for {} pairs", exp.len(), pairs.len())));
        }
    }
    let cfg = &config.eval;
    // sphere-transitive groups are swept with the exact closed form
    let sweep_cfg = if handle.is_sphere_transitive() { cfg.with_method(MethodPreference::ClosedForm) } else { cfg.clone() };
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        if a.dim() != n || b.dim() != n {
            return Err(CliError::config("pairs", format!("pair {i}: expected {n} components")));
        }
        let fa = fingerprint_with_degree(&handle, a, cfg.max_degree)?;
        let fb = fingerprint_with_degree(&handle, b, cfg.max_degree)?;
        let eq = fa.agrees(&fb, cfg.tol)?;
        if let Some(exp) = &config.expected {
            let passed = eq == exp[i];
            checks.push(Check {
                name: format!("expected[{i}]"),
                measured: eq as u8 as f64,
                threshold: exp[i] as u8 as f64,
                passed,
                detail: None,
            });
        }
        match separating_probe(&handle, a, b, &sweep_cfg) {
            Ok((x, diff)) => {
                let exact = !matches!(sweep_cfg.method, MethodPreference::MonteCarlo) && eval_is_exact(&handle, &sweep_cfg);
                if exact && eq {
                    checks.push(Check::at_most(format!("sound[{i}]"), diff, 1e-9));
                } else if exact && handle.is_finite() {
                    checks.push(Check {
                        name: format!("separated[{i}]"),
                        measured: diff,
                        threshold: 1e-6,
                        passed: diff > 1e-6,
                        detail: Some(format!("at x = {:?}", x.as_slice())),
                    });
                }
                rows.push(json!({"left": a, "right": b, "equivalent": eq, "sweep_max_difference": diff, "left_fingerprint": fa, "right_fingerprint": fb}));
            }
            Err(Error::UnsupportedSampler { .. }) => {
                rows.push(json!({"left": a, "right": b, "equivalent": eq, "left_fingerprint": fa, "right_fingerprint": fb}));
            }
            Err(e) => return Err(e.into()),
        }
        if a.is_real() && b.is_real() {
            match orbit_equal_real(&handle, &a.re(), &b.re(), 1e-9) {
                Ok(same_orbit) => checks.push(Check {
                    name: format!("orbit[{i}]"),
                    measured: eq as u8 as f64,
                    threshold: same_orbit as u8 as f64,
                    passed: eq == same_orbit,
                    detail: None,
                }),
                Err(Error::OrbitTestUnsupported { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok((checks, Value::Array(rows), vec![cfg.seed]))
}

/// Whether evaluation under `cfg` is deterministic (no Monte Carlo anywhere).
fn eval_is_exact(handle: &GroupHandle, cfg: &EvalConfig) -> bool {
    if cfg.method == MethodPreference::ClosedForm && handle.is_sphere_transitive() {
        return true;
    }
    if cfg.method == MethodPreference::MonteCarlo && handle.has_sampler() {
        return false;
    }
    if !handle.factors().is_empty() {
        return handle.factors().iter().all(|f| eval_is_exact(f, cfg));
    }
    handle.is_finite() || matches!(handle.spec(), GroupSpec::SpecialOrthogonal { n: 2 } | GroupSpec::Orthogonal { n: 2 } | GroupSpec::Unitary { m: 1 } | GroupSpec::Torus { planes: 1 })
}

fn verify_crossgroup(config: &RunConfig) -> SuiteResult {
    let cross = config.crossgroup.clone().unwrap_or_default();
    let handles: Vec<GroupHandle> = cross
        .groups
        .iter()
        .map(|s| build_group(s).map_err(|e| CliError::config("crossgroup.groups", e.to_string())))
        .collect::<Result<_, _>>()?;
    let n = handles.first().map(GroupHandle::ambient_dim).ok_or_else(|| CliError::config("crossgroup.groups", "empty"))?;
    if handles.iter().any(|h| h.ambient_dim() != n) {
        return Err(CliError::config("crossgroup.groups", "groups act on different dimensions"));
    }
    let cfg = config.eval.with_method(MethodPreference::MonteCarlo);
    let seeds: Vec<u64> = (0..handles.len()).map(|i| factor_seed(cfg.seed, i)).collect();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for &(lambda, r) in &cross.probes {
        let xi = axis_vector(n, lambda);
        let mut x = DVector::zeros(n);
        x[0] = r;
        let exact = closed_form_at(&xi, &x)?;
        let values: Vec<_> = handles
            .par_iter()
            .zip(&seeds)
            .map(|(h, &s)| eval_spherical(h, &xi, &x, &cfg.with_seed(s)))
            .collect::<Result<_, _>>()?;
        for (h, v) in handles.iter().zip(&values) {
            checks.push(Check::at_most(format!("{}@({lambda},{r}) vs closed form", h.spec()), (v.value - exact).norm(), 3.0 * v.stderr));
        }
        for i in 0..handles.len() {
            for j in i + 1..handles.len() {
                let (a, b) = (values[i], values[j]);
                let sigma = (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
                checks.push(Check::at_most(
                    format!("{} vs {}@({lambda},{r})", handles[i].spec(), handles[j].spec()),
                    (a.value - b.value).norm(),
                    3.0 * sigma,
                ));
            }
        }
        rows.push(json!({
            "lambda": lambda,
            "r": r,
            "closed_form": exact,
            "estimates": handles.iter().zip(&values).map(|(h, v)| json!({"group": h.spec(), "value": v.value, "stderr": v.stderr})).collect::<Vec<_>>(),
        }));
    }
    Ok((checks, Value::Array(rows), seeds))
}

fn read_profile_csv(path: &Path) -> Result<RadialProfile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config("profile_csv", format!("{}: {e}", path.display())))?;
    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 || v.len() == 3 => {
                grid.push(v[0]);
                values.push(Complex64::new(v[1], v.get(2).copied().unwrap_or(0.0)));
            }
            // a header line is allowed before the data
            None if grid.is_empty() => continue,
            _ => return Err(CliError::config("profile_csv", format!("line {}: expected r,re[,im]", lineno + 1))),
        }
    }
    let support = grid.last().copied().unwrap_or(0.0);
    RadialProfile::new(grid, values, support).map_err(|e| CliError::config("profile_csv", e.to_string()))
}

/// CSV with columns xi0_re, xi0_im, …, then the fingerprint fp0_re, fp0_im, …
/// when the group has one, then re, im, error.
pub fn cmd_transform(config: &RunConfig) -> Result<Outcome, CliError> {
    let handle = config.handle()?;
    let n = handle.ambient_dim();
    let input = match (&config.profile, &config.profile_csv) {
        (Some(p), None) => p.clone(),
        (None, Some(path)) => TransformInput::Radial(read_profile_csv(path)?),
        (Some(_), Some(_)) => return Err(CliError::config("profile", "give either `profile` or `profile_csv`, not both")),
        (None, None) => return Err(CliError::config("profile", "missing field `profile`")),
    };
    match &input {
        TransformInput::Radial(p) => p.validate().map_err(|e| CliError::config("profile", e.to_string()))?,
        TransformInput::Grid(g) if g.n != n => {
            return Err(CliError::config("profile", format!("grid function has dimension {}, group acts on {n}", g.n)))
        }
        TransformInput::Grid(_) => {}
    }
    let xis = config.xi_list(n)?;
    let values: Vec<_> = xis
        .par_iter()
        .map(|xi| spherical_transform(&input, &handle, std::slice::from_ref(xi), &config.eval).map(|mut v| v.remove(0)))
        .collect::<Result<_, _>>()?;
    let fingerprints = transform_fingerprints(&handle, &xis, config.eval.max_degree)?;
    let width = fingerprints.first().map_or(0, |f| f.values.len());
    let mut out = String::new();
    let mut header: Vec<String> = (0..n).flat_map(|i| [format!("xi{i}_re"), format!("xi{i}_im")]).collect();
    header.extend((0..width).flat_map(|j| [format!("fp{j}_re"), format!("fp{j}_im")]));
    header.extend(["re", "im", "error"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, (xi, v)) in xis.iter().zip(&values).enumerate() {
        let mut row: Vec<String> = xi.components().iter().flat_map(|z| [num(z.re), num(z.im)]).collect();
        if let Some(fp) = fingerprints.get(i) {
            row.extend(fp.values.iter().flat_map(|z| [num(z.re), num(z.im)]));
        }
        row.extend([num(v.value.re), num(v.value.im), num(v.error_estimate)]);
        let _ = writeln!(out, "{}", row.join(","));
    }
    Ok(Outcome { data: out, checks: Vec::new(), seeds: vec![config.eval.seed] })
}

/// Fingerprints of all ξ, or none when the group has no usable invariant basis.
fn transform_fingerprints(handle: &GroupHandle, xis: &[SpectralParam], max_degree: Option<usize>) -> Result<Vec<QuotientPoint>, CliError> {
    match xis.iter().map(|xi| fingerprint_with_degree(handle, xi, max_degree)).collect::<Result<Vec<_>, _>>() {
        Ok(fps) => Ok(fps),
        Err(Error::FingerprintUnsupported { .. } | Error::DegreeCapExceeded { .. } | Error::GroupTooLarge { .. }) => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct FingerprintRow<'a> {
    xi: &'a SpectralParam,
    fingerprint: QuotientPoint,
}

/// JSON with one fingerprint per ξ and, if `pairs` is given, their equivalence.
pub fn cmd_fingerprint(config: &RunConfig) -> Result<Outcome, CliError> {
    let handle = config.handle()?;
    let n = handle.ambient_dim();
    let max_degree = config.eval.max_degree;
    let xis = if config.xis.is_some() || config.lambdas.is_some() || config.xi.is_some() { config.xi_list(n)? } else { Vec::new() };
    let rows: Vec<FingerprintRow> = xis
        .iter()
        .map(|xi| Ok(FingerprintRow { xi, fingerprint: fingerprint_with_degree(&handle, xi, max_degree)? }))
        .collect::<Result<_, CliError>>()?;
    let mut pair_rows = Vec::new();
    for (i, (a, b)) in config.pairs.iter().flatten().enumerate() {
        if a.dim() != n || b.dim() != n {
            return Err(CliError::config("pairs", format!("pair {i}: expected {n} components")));
        }
        let fa = fingerprint_with_degree(&handle, a, max_degree)?;
        let fb = fingerprint_with_degree(&handle, b, max_degree)?;
        pair_rows.push(json!({"left": a, "right": b, "equivalent": fa.agrees(&fb, config.eval.tol)?}));
    }
    if rows.is_empty() && pair_rows.is_empty() {
        return Err(CliError::config("xis", "give `xi`, `xis`, `lambdas` or `pairs`"));
    }
    let report = json!({"group": config.group, "fingerprints": rows, "pairs": pair_rows});
    let data = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    Ok(Outcome { data, checks: Vec::new(), seeds: Vec::new() })
}
