//! Command-line front end.
//!
//! Exit codes: 0 certified/pass, 1 usage or input error, 2 certification
//! failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{evaluate_corollary1, evaluate_theorem, BoundReport, Corollary1Report, TailParams, Tolerance};
use crate::error::Error;
use crate::experiments::{
    default_tail_grid, default_tail_sweep, default_translation_input, default_translation_sweep, optimality_experiment,
    tail_experiment, translation_experiment, triangle_experiment, OptimalityConfig, ScalingResult, TriangleConfig,
    CERTIFICATION_RTOL,
};
use crate::geometry::lemma1_scan;
use crate::grid::{GridSpec, SampledFunction};
use crate::io::{load_function, write_atomic};

/// Gap below which the brute-force scan counts as a counterexample.
pub const LEMMA1_GAP_TOL: f64 = 1e-12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CERTIFICATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "phasestab", version, about = "Certify Fourier phase-retrieval stability bounds on sampled functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the general stability estimate for a pair of functions.
    Verify(VerifyArgs),
    /// Evaluate the band-limited estimate (requires a real spectrum for f).
    Corollary1(Corollary1Args),
    /// Brute-force scan of the complex-plane inequality on its disk.
    Lemma1(Lemma1Args),
    /// Run a scaling experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long = "f")]
    f: PathBuf,
    #[arg(long = "g")]
    g: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    p: f64,
    /// Absolute threshold below which |f̂| counts as zero [default: 1e-12·max|f̂|].
    #[arg(long)]
    zero_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct Corollary1Args {
    #[command(flatten)]
    pair: PairArgs,
    /// Absolute support threshold [default: 1e-12·max|f̂|].
    #[arg(long)]
    support_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct Lemma1Args {
    #[arg(long)]
    radius_steps: usize,
    #[arg(long)]
    angle_steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// One of: optimality, triangle, translation, tail.
    #[arg(long)]
    name: String,
    /// Comma-separated sweep values (scales, amplitudes or epsilons).
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
    /// Points per axis.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Half extent per axis in space.
    #[arg(long)]
    grid_extent: Option<f64>,
    /// Derivative order for the tail experiment.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Dimension for the tail experiment.
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Directory for CSV/JSON outputs; the full report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Everything that determined a run, echoed next to every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<Tolerance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_tol: Option<Tolerance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_extent: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_per_axis: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub certification_rtol: f64,
    pub format: &'static str,
}

impl RunConfig {
    fn new(subcommand: &'static str, format: Format, out: Option<&Path>) -> Self {
        Self {
            subcommand,
            out: out.map(|p| p.display().to_string()),
            certification_rtol: CERTIFICATION_RTOL,
            format: format_name(format),
            ..Self::default()
        }
    }

    fn with_grid(mut self, grid: &GridSpec) -> Self {
        self.half_extent = Some(grid.half_extents());
        self.points_per_axis = Some(grid.points_per_axis());
        self
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Certification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("serialization error: {e}"))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Corollary1(a) => cmd_corollary1(a),
        Command::Lemma1(a) => cmd_lemma1(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Certification(msg)) => {
            eprintln!("certification failed: {msg}");
            EXIT_CERTIFICATION
        }
    }
}

fn load_pair(args: &PairArgs) -> Result<(SampledFunction, SampledFunction), Failure> {
    let f = load_function(&args.f).map_err(|e| Failure::Input(e.to_string()))?.into_space();
    let g = load_function(&args.g).map_err(|e| Failure::Input(e.to_string()))?.into_space();
    f.grid().ensure_same(g.grid())?;
    Ok((f, g))
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, body.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Writes the config to `sidecar` when given, otherwise to stderr.
fn echo_config(sidecar: Option<&Path>, config: &RunConfig) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(config)? + "\n";
    match sidecar {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => eprint!("{text}"),
    }
    Ok(())
}

fn sidecar_of(out: Option<&Path>) -> Option<PathBuf> {
    out.map(|path| {
        let mut name = path.as_os_str().to_owned();
        name.push(".config.json");
        PathBuf::from(name)
    })
}

/// Header and one row; floats in shortest round-trip form.
fn to_csv<T: Serialize>(record: &T) -> Result<String, Failure> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .serialize(record)
        .map_err(|e| Failure::Input(format!("serialization error: {e}")))?;
    let bytes = writer
        .into_inner()
        .map_err(|e| Failure::Input(format!("serialization error: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Input(format!("serialization error: {e}")))
}

fn render<T: Serialize>(record: &T, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(record)? + "\n"),
        Format::Csv => to_csv(record),
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

fn tolerance_from(flag: Option<f64>) -> Result<Tolerance, Failure> {
    match flag {
        None => Ok(Tolerance::default()),
        Some(t) if t >= 0.0 && t.is_finite() => Ok(Tolerance::Absolute(t)),
        Some(t) => Err(Failure::Input(format!("tolerance must be nonnegative and finite, got {t}"))),
    }
}

fn certification(slack: f64, rhs: f64) -> Result<(), Failure> {
    if slack >= -CERTIFICATION_RTOL * rhs {
        Ok(())
    } else {
        Err(Failure::Certification(format!(
            "slack {slack} below -{CERTIFICATION_RTOL} times the right-hand side {rhs}"
        )))
    }
}

fn pair_config(subcommand: &'static str, pair: &PairArgs) -> RunConfig {
    RunConfig {
        inputs: vec![pair.f.display().to_string(), pair.g.display().to_string()],
        ..RunConfig::new(subcommand, pair.format, pair.out.as_deref())
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    if !(1.0..2.0).contains(&args.p) {
        return Err(Failure::Input(format!("invalid p: must lie in [1, 2), got {}", args.p)));
    }
    let zero_tol = tolerance_from(args.zero_tol)?;
    let (f, g) = load_pair(&args.pair)?;
    let report: BoundReport = evaluate_theorem(&f, &g, args.p, zero_tol)?;
    let out = args.pair.out.as_deref();
    emit(out, &render(&report, args.pair.format)?)?;
    let config = RunConfig {
        p: Some(args.p),
        zero_tol: Some(zero_tol),
        ..pair_config("verify", &args.pair)
    }
    .with_grid(f.grid());
    echo_config(sidecar_of(out).as_deref(), &config)?;
    certification(report.slack, report.rhs)
}

fn cmd_corollary1(args: Corollary1Args) -> Result<(), Failure> {
    let support_tol = tolerance_from(args.support_tol)?;
    let (f, g) = load_pair(&args.pair)?;
    let report: Corollary1Report = evaluate_corollary1(&f, &g, support_tol)?;
    let out = args.pair.out.as_deref();
    emit(out, &render(&report, args.pair.format)?)?;
    let config = RunConfig {
        p: Some(1.0),
        support_tol: Some(support_tol),
        ..pair_config("corollary1", &args.pair)
    }
    .with_grid(f.grid());
    echo_config(sidecar_of(out).as_deref(), &config)?;
    certification(report.slack, report.rhs)
}

fn cmd_lemma1(args: Lemma1Args) -> Result<(), Failure> {
    let summary = lemma1_scan(args.radius_steps, args.angle_steps)?;
    let out = args.out.as_deref();
    emit(out, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    let config = RunConfig {
        steps: Some([args.radius_steps, args.angle_steps]),
        ..RunConfig::new("lemma1", Format::Json, out)
    };
    echo_config(sidecar_of(out).as_deref(), &config)?;
    if summary.min_gap >= -LEMMA1_GAP_TOL {
        Ok(())
    } else {
        Err(Failure::Certification(format!(
            "gap {} at z = {} + {}i",
            summary.min_gap, summary.argmin_z[0], summary.argmin_z[1]
        )))
    }
}

/// `parameter,observable` rows.
fn scaling_csv(result: &ScalingResult) -> String {
    let mut s = String::from("parameter,observable\n");
    for (x, y) in result.parameter_values.iter().zip(&result.observable_values) {
        s.push_str(&format!("{x},{y}\n"));
    }
    s
}

#[derive(Serialize)]
struct ScalingSidecar<'a> {
    #[serde(flatten)]
    result: &'a ScalingResult,
    fitted_values: Vec<f64>,
}

fn write_scaling(dir: &Path, result: &ScalingResult) -> Result<(), Failure> {
    write_atomic(&dir.join(format!("{}.csv", result.name)), scaling_csv(result).as_bytes())?;
    let sidecar = ScalingSidecar {
        result,
        fitted_values: result.fitted_values(),
    };
    write_atomic(
        &dir.join(format!("{}.json", result.name)),
        (serde_json::to_string_pretty(&sidecar)? + "\n").as_bytes(),
    )?;
    Ok(())
}

fn finish_experiment<T: Serialize>(
    name: &str,
    out: Option<&Path>,
    report: &T,
    results: &[&ScalingResult],
    config: &RunConfig,
    pass: bool,
) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for r in results {
                write_scaling(dir, r)?;
            }
            write_atomic(&dir.join(format!("{name}_report.json")), text.as_bytes())?;
            echo_config(Some(&dir.join(format!("{name}.config.json"))), config)?;
        }
        None => {
            emit(None, &text)?;
            echo_config(None, config)?;
        }
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Certification(format!("experiment {name} did not reproduce the expected scaling")))
    }
}

fn nonempty(sweep: Option<Vec<f64>>) -> Result<Option<Vec<f64>>, Failure> {
    match sweep {
        Some(v) if v.is_empty() => Err(Failure::Input("sweep list must be nonempty".into())),
        Some(v) if v.iter().any(|x| !x.is_finite() || *x < 0.0) => {
            Err(Failure::Input("sweep values must be finite and nonnegative".into()))
        }
        other => Ok(other),
    }
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let sweep = nonempty(args.sweep)?;
    let out = args.out.as_deref();
    let base = |sweep: &[f64], grid: &GridSpec| {
        RunConfig {
            experiment: Some(args.name.clone()),
            sweep: Some(sweep.to_vec()),
            ..RunConfig::new("experiment", Format::Json, out)
        }
        .with_grid(grid)
    };
    match args.name.as_str() {
        "optimality" => {
            let mut config = OptimalityConfig::default();
            if let Some(s) = sweep {
                config.scales = s;
            }
            config.points = args.grid_n.unwrap_or(config.points);
            config.half_extent = args.grid_extent.unwrap_or(config.half_extent);
            let grid = GridSpec::uniform(1, config.half_extent, config.points)?;
            let r = optimality_experiment(&config)?;
            let echo = base(&config.scales, &grid);
            finish_experiment("optimality", out, &r, &[&r.l2, &r.l1], &echo, r.pass)
        }
        "triangle" => {
            let mut config = TriangleConfig::default();
            if let Some(s) = sweep {
                config.amplitudes = s;
            }
            config.points = args.grid_n.unwrap_or(config.points);
            config.half_extent = args.grid_extent.unwrap_or(config.half_extent);
            let grid = GridSpec::uniform(1, config.half_extent, config.points)?;
            let r = triangle_experiment(&config)?;
            let echo = base(&config.amplitudes, &grid);
            finish_experiment("triangle", out, &r, &[&r.excess], &echo, r.pass)
        }
        "translation" => {
            let f = default_translation_input(args.grid_extent.unwrap_or(16.0), args.grid_n.unwrap_or(1024))?;
            let eps = sweep.unwrap_or_else(default_translation_sweep);
            let r = translation_experiment(&f, &eps)?;
            let echo = base(&eps, f.grid());
            finish_experiment("translation", out, &r, &[&r.lhs], &echo, r.pass)
        }
        "tail" => {
            let params = TailParams::new(args.k, args.n)?;
            let mut grid = default_tail_grid(params)?;
            if args.grid_n.is_some() || args.grid_extent.is_some() {
                grid = GridSpec::uniform(
                    params.n as usize,
                    args.grid_extent.unwrap_or(grid.half_extent(0)),
                    args.grid_n.unwrap_or(grid.points(0)),
                )?;
            }
            let eps = sweep.unwrap_or_else(default_tail_sweep);
            let r = tail_experiment(params, &eps, &grid)?;
            let echo = RunConfig {
                tail_k: Some(params.k),
                tail_n: Some(params.n),
                ..base(&eps, &grid)
            };
            finish_experiment("tail", out, &r, &[&r], &echo, r.pass)
        }
        other => Err(Failure::Input(format!(
            "unknown experiment {other:?}; expected one of optimality, triangle, translation, tail"
        ))),
    }
}
