//! Command-line front end: `simulate`, `certify`, `sweep` and `meanfield`.
//!
//! Exit status is 0 when every executed check passes, 1 when a check fails or a run
//! cannot be certified, and 2 for configuration errors. Artifacts produced before a
//! failure are flushed to the output directory.

pub mod config;
pub mod plot;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;

use crate::analysis::{build_certificate_with, ConsensusCertificate};
use crate::error::{Error, Result};
use crate::meanfield::{n_independence_report, MeanFieldConfig, MeanFieldReport};
use crate::model::Scenario;
use crate::solver::{integrate, SolverParams, Trajectory};

pub use config::{parse_document, parse_scenario, ScenarioDocument};
pub use plot::decay_plot_svg;

/// Environment variable naming the directory searched for scenario files that are not
/// found as given.
pub const SEED_DIR_ENV: &str = "HKDELAY_SEED_DIR";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hkdelay",
    version,
    about = "Simulate and certify consensus of delayed opinion dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario TOML file; bare names are also looked up in the golden scenario directory.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Override the solver step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Override the simulation horizon.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Worker threads for sweep and mean-field runs.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write SVG plots of ln d(t) against the certified bound.
    #[arg(long)]
    pub plots: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SweepParam {
    TauBar,
    Step,
    Horizon,
    /// Multiplies the influence function and its declared bounds.
    InfluenceScale,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::TauBar => "tau_bar",
            SweepParam::Step => "step",
            SweepParam::Horizon => "horizon",
            SweepParam::InfluenceScale => "influence_scale",
        }
    }

    /// The scenario with this parameter set to `value`.
    pub fn apply(self, scenario: &Scenario, value: f64) -> Result<Scenario> {
        match self {
            SweepParam::TauBar => scenario.with_tau_bar(value),
            SweepParam::Step => scenario.with_solver(SolverParams {
                step: value,
                ..scenario.solver().clone()
            }),
            SweepParam::Horizon => scenario.with_horizon(value),
            SweepParam::InfluenceScale => {
                scenario.with_influence(scenario.influence().scaled(value)?)
            }
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the scenario and write trajectory.csv.
    Simulate(RunArgs),
    /// Integrate, build the consensus certificate and run every check.
    Certify(RunArgs),
    /// Certify the scenario at each value of one scalar parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
    },
    /// Run the agent-count ladder and check N-independence of the decay bound.
    Meanfield {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated agent counts, overriding the scenario's ladder.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<usize>>,
        /// Lower delay bound, overriding the scenario's value.
        #[arg(long)]
        tau_star: Option<f64>,
    },
}

/// Parses `args` (program name first) and runs the command, returning the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_PASS
            }
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Certify(args) => certify(args),
        Command::Sweep { run, param, values } => sweep(run, *param, values),
        Command::Meanfield {
            run,
            ladder,
            tau_star,
        } => meanfield(run, ladder.as_deref(), *tau_star),
    };
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Configuration problems map to 2, everything else to 1.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidScenario { .. }
        | Error::DelayBound { .. }
        | Error::InfluenceBound { .. }
        | Error::NonPositiveKernel { .. }
        | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Directory holding the golden scenarios.
pub fn golden_dir() -> PathBuf {
    std::env::var_os(SEED_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios"))
}

/// `path` itself when it exists, otherwise `path` or `path.toml` inside [`golden_dir`].
pub fn resolve_scenario(path: &Path) -> Result<PathBuf> {
    if path.is_file() {
        return Ok(path.to_path_buf());
    }
    let dir = golden_dir();
    let direct = dir.join(path);
    if direct.is_file() {
        return Ok(direct);
    }
    let with_ext = dir.join(path).with_extension("toml");
    if path.extension().is_none() && with_ext.is_file() {
        return Ok(with_ext);
    }
    Err(Error::Config(format!(
        "scenario {} not found (also searched {})",
        path.display(),
        dir.display()
    )))
}

/// Reads, parses and validates the scenario, then applies `--step` and `--horizon`.
pub fn load(args: &RunArgs) -> Result<ScenarioDocument> {
    let path = resolve_scenario(&args.scenario)?;
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut doc = parse_document(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if args.step.is_some() || args.horizon.is_some() {
        // both overrides validated together so the step need only divide the new horizon
        let s = &doc.scenario;
        doc.scenario = Scenario::new(
            args.horizon.unwrap_or(s.horizon()),
            s.delay().clone(),
            s.influence().clone(),
            s.history().clone(),
            SolverParams {
                step: args.step.unwrap_or(s.solver().step),
                ..s.solver().clone()
            },
        )?;
    }
    Ok(doc)
}

fn out_dir(args: &RunArgs) -> Result<&Path> {
    fs::create_dir_all(&args.out).map_err(|e| {
        Error::Config(format!(
            "output directory {} is not writable: {e}",
            args.out.display()
        ))
    })?;
    Ok(&args.out)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    info!("wrote {}", path.display());
    Ok(())
}

fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn simulate(args: &RunArgs) -> Result<bool> {
    let doc = load(args)?;
    let out = out_dir(args)?;
    let traj = integrate(&doc.scenario)?;
    write_file(&out.join("trajectory.csv"), |w| traj.write_csv(w))?;
    println!(
        "simulated {} agents in dimension {} on [0, {}] with {} steps",
        traj.agent_count(),
        traj.dimension(),
        traj.last_time(),
        traj.node_count() - 1
    );
    Ok(true)
}

fn certify(args: &RunArgs) -> Result<bool> {
    let doc = load(args)?;
    let out = out_dir(args)?;
    let traj = integrate(&doc.scenario)?;
    write_file(&out.join("trajectory.csv"), |w| traj.write_csv(w))?;
    let cert = build_certificate_with(&traj, &doc.scenario, &doc.analysis)?;
    write_certificate(out, "", &traj, &cert, args.plots)?;
    print_certificate(&cert);
    Ok(cert.passed())
}

fn write_certificate(
    out: &Path,
    prefix: &str,
    traj: &Trajectory,
    cert: &ConsensusCertificate,
    plots: bool,
) -> Result<()> {
    write_file(&out.join(format!("{prefix}certificate.json")), |w| {
        writeln!(w, "{}", cert.to_json())?;
        Ok(())
    })?;
    write_file(&out.join(format!("{prefix}metrics.csv")), |w| {
        cert.write_metrics_csv(traj, w)
    })?;
    if plots {
        write_file(&out.join(format!("{prefix}decay.svg")), |w| {
            w.write_all(decay_plot_svg(traj, cert).as_bytes())?;
            Ok(())
        })?;
    }
    Ok(())
}

fn print_certificate(cert: &ConsensusCertificate) {
    println!(
        "K = {}  M0 = {}  psi0 = {}  D0 = {}",
        cert.k, cert.m0, cert.psi0, cert.d0
    );
    println!(
        "C = {}  C_tilde = {}  gamma = {}",
        cert.c, cert.c_tilde, cert.gamma
    );
    match cert.empirical_rate {
        Some(rate) => println!("empirical rate = {rate}"),
        None => println!("empirical rate = undefined"),
    }
    for c in &cert.checks {
        let status = if c.is_skipped() {
            "skip"
        } else if c.pass {
            "pass"
        } else {
            "FAIL"
        };
        let margin = c
            .worst_margin
            .map_or_else(|| "-".to_string(), |m| m.to_string());
        let note = c
            .note
            .as_deref()
            .map(|n| format!(" ({n})"))
            .unwrap_or_default();
        println!("[{status}] {:<28} worst margin {margin}{note}", c.name);
    }
    println!(
        "certificate: {}",
        if cert.passed() { "PASS" } else { "FAIL" }
    );
}

fn sweep(args: &RunArgs, param: SweepParam, values: &[f64]) -> Result<bool> {
    let doc = load(args)?;
    let out = out_dir(args)?;
    let scenarios: Vec<Scenario> = values
        .iter()
        .map(|&v| param.apply(&doc.scenario, v))
        .collect::<Result<_>>()?;
    let opts = &doc.analysis;
    let results: Vec<Result<(Trajectory, ConsensusCertificate)>> = with_jobs(args.jobs, || {
        scenarios
            .par_iter()
            .map(|s| {
                let traj = integrate(s)?;
                let cert = build_certificate_with(&traj, s, opts)?;
                Ok((traj, cert))
            })
            .collect()
    })?;

    write_file(&out.join("sweep.csv"), |w| {
        writeln!(
            w,
            "param,value,K,psi0,M0,D0,C,C_tilde,gamma,empirical_rate,passed,error"
        )?;
        for (v, r) in values.iter().zip(&results) {
            match r {
                Ok((_, c)) => writeln!(
                    w,
                    "{},{v},{},{},{},{},{},{},{},{},{},",
                    param.name(),
                    c.k,
                    c.psi0,
                    c.m0,
                    c.d0,
                    c.c,
                    c.c_tilde,
                    c.gamma,
                    c.empirical_rate.map(|r| r.to_string()).unwrap_or_default(),
                    c.passed()
                )?,
                Err(e) => writeln!(
                    w,
                    "{},{v},,,,,,,,,false,\"{}\"",
                    param.name(),
                    e.to_string().replace('"', "'")
                )?,
            }
        }
        Ok(())
    })?;
    for (i, r) in results.iter().enumerate() {
        if let Ok((traj, cert)) = r {
            write_certificate(out, &format!("sweep_{i}_"), traj, cert, args.plots)?;
        }
    }

    let mut all_pass = true;
    for (v, r) in values.iter().zip(&results) {
        match r {
            Ok((_, c)) => {
                println!(
                    "{} = {v}: C = {} C_tilde = {} gamma = {} rate = {} {}",
                    param.name(),
                    c.c,
                    c.c_tilde,
                    c.gamma,
                    c.empirical_rate
                        .map_or("undefined".into(), |r| r.to_string()),
                    if c.passed() { "PASS" } else { "FAIL" }
                );
                all_pass &= c.passed();
            }
            Err(e) => {
                println!("{} = {v}: error: {e}", param.name());
                all_pass = false;
            }
        }
    }
    Ok(all_pass)
}

fn meanfield(args: &RunArgs, ladder: Option<&[usize]>, tau_star: Option<f64>) -> Result<bool> {
    let doc = load(args)?;
    let out = out_dir(args)?;
    let mut config = match (doc.meanfield.clone(), tau_star) {
        (Some(c), _) => c,
        (None, Some(t)) => {
            let mut c = MeanFieldConfig::new(MeanFieldConfig::DEFAULT_LADDER.to_vec(), t);
            c.certificate = doc.analysis.clone();
            c
        }
        (None, None) => {
            return Err(Error::Config(
                "mean-field runs need tau_star: add a [meanfield] table or pass --tau-star".into(),
            ))
        }
    };
    if let Some(l) = ladder {
        config.ladder = l.to_vec();
    }
    if let Some(t) = tau_star {
        config.tau_star = t;
    }
    let report = with_jobs(args.jobs, || n_independence_report(&config, &doc.scenario))??;
    write_meanfield(out, &report)?;
    print_meanfield(&report);
    Ok(report.passed())
}

fn write_meanfield(out: &Path, report: &MeanFieldReport) -> Result<()> {
    write_file(&out.join("meanfield.csv"), |w| report.write_csv(w))?;
    write_file(&out.join("meanfield_w1.csv"), |w| report.write_w1_csv(w))?;
    write_file(&out.join("meanfield.json"), |w| {
        writeln!(w, "{}", report.to_json())?;
        Ok(())
    })
}

fn print_meanfield(report: &MeanFieldReport) {
    for m in &report.members {
        let c = &m.certificate;
        println!(
            "N = {}: C = {} C_tilde = {} gamma = {} worst decay margin {} certificate {}",
            m.agents,
            c.c,
            c.c_tilde,
            c.gamma,
            m.worst_margin,
            if c.passed() { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "constants identical across ladder: {}",
        if report.constants_identical {
            "yes"
        } else {
            "no"
        }
    );
    println!(
        "mean-field: {}",
        if report.passed() { "PASS" } else { "FAIL" }
    );
}
