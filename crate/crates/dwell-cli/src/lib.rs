//! Command implementations behind the `dwell` binary: run built-in example
//! bundles end to end, certify parameter files against schedules, simulate
//! systems described in config files, and analyze impulse schedules.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use dwell_core::io::{trajectory_to_csv, write_diagnostics_csv};
use dwell_core::presets::{preset, preset_names, ExamplePreset};
use dwell_core::*;

/// Exit code contract: 0 success/certified, 1 I/O or parse failure,
/// 2 failed check, 3 divergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Check(String),
    #[error("trajectory diverged at t = {0}")]
    Divergence(f64),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 1,
            CliError::Check(_) => 2,
            CliError::Divergence(_) => 3,
        }
    }
}

fn core_err(e: CoreError) -> CliError {
    match e {
        CoreError::Divergence { t, .. } => CliError::Divergence(t),
        other => CliError::Check(other.to_string()),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "dwell",
    about = "Simulate impulsive time-delay systems and check dwell-time stability certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a built-in example end to end and write its artifacts.
    Example(ExampleArgs),
    /// Evaluate the stability certificate for a parameter file and schedule.
    Certify(CertifyArgs),
    /// Integrate a system and export the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Analyze an impulse schedule: window counts and dwell conditions.
    Schedule(ScheduleArgs),
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// One of: ex1, ex2-c1, ex2-c2, ex2-c3, ex3.
    pub name: String,
    /// Directory for trajectory.csv, diagnostics.csv, report.txt and the
    /// exported config files.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Integration step override.
    #[arg(long)]
    pub step: Option<f64>,
    /// Horizon override.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Convergence-rate parameter override.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Allowance override for the unified inequality.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Relative tolerance for the runtime checks.
    #[arg(long, default_value_t = ENVELOPE_TOL)]
    pub tol: f64,
    /// Keep every n-th trajectory node in the CSV output.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// TOML file with c, rho1, rho2, kappa, tau, lambda and optional mu.
    #[arg(long)]
    pub params: PathBuf,
    /// TOML schedule file ([pattern] table, or times + horizon).
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,
    /// Override the file's lambda.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Override the file's mu.
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Built-in example to simulate.
    #[arg(long, conflicts_with = "system")]
    pub preset: Option<String>,
    /// TOML system description (dimension, tau, [[flow]]/[[jump]] terms,
    /// [initial]).
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Schedule file; optional for presets (their own schedule is used).
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Constant initial history override, one value per component.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub initial: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    /// Verify N(t,s) <= (t-s)/t_star + n_star.
    Adt,
    /// Verify N(t,s) >= (t-s)/t_star - n_star.
    Reverse,
    /// Tabulate the per-impulse window counts N(t_k - tau, t_k].
    Windows,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long, value_enum)]
    pub analysis: Analysis,
    /// Window length for the windows analysis.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub t_star: Option<f64>,
    #[arg(long)]
    pub n_star: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,
    /// Parameter file enabling the window-count feasibility band.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Sigma for the feasibility band.
    #[arg(long)]
    pub sigma: Option<f64>,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Example(args) => cmd_example(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Schedule(args) => cmd_schedule(args),
    }
}

fn load_toml<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Parse(format!("{} ({what}): {e}", path.display())))
}

fn save_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn to_toml<T: serde::Serialize>(value: &T, what: &str) -> Result<String, CliError> {
    toml::to_string_pretty(value).map_err(|e| CliError::Io(format!("encoding {what}: {e}")))
}

fn load_schedule(path: &Path) -> Result<ImpulseSchedule, CliError> {
    load_toml(path, "schedule")
}

fn load_params(path: &Path) -> Result<CertificateParams, CliError> {
    load_toml(path, "certificate parameters")
}

fn find_preset(name: &str) -> Result<ExamplePreset, CliError> {
    preset(name).map_err(|_| {
        CliError::Io(format!(
            "unknown preset {name:?}; available: {}",
            preset_names().join(", ")
        ))
    })
}

pub fn cmd_example(args: &ExampleArgs) -> Result<(), CliError> {
    let mut p = find_preset(&args.name)?;
    if let Some(lambda) = args.lambda {
        p.params = CertificateParams::new(
            p.params.c,
            p.params.rho1,
            p.params.rho2,
            p.params.kappa,
            p.params.tau,
            lambda,
            p.params.mu,
        )
        .map_err(core_err)?;
    }
    if let Some(mu) = args.mu {
        p.params.mu = Some(mu);
    }
    let horizon = args.horizon.unwrap_or(p.horizon);
    let step = args.step.unwrap_or(p.base_step);

    fs::create_dir_all(&args.out_dir).map_err(|e| io_err(&args.out_dir, e))?;

    let report = certify(&p.params, &p.schedule, p.t0, horizon).map_err(core_err)?;
    let mut report_text = report.to_string();
    if let Some(avg) = p.schedule.average_interval() {
        report_text.push_str(&format!(
            "schedule_average_interval = {}\n",
            full_precision(avg)
        ));
    }
    report_text.push_str("\n[expected]\n");
    for (key, value) in &p.expected {
        report_text.push_str(&format!("{key} = {}\n", full_precision(*value)));
    }
    for note in &p.notes {
        report_text.push_str(&format!("# note: {note}\n"));
    }
    print!("{report_text}");

    // self-describing exports
    save_text(
        &args.out_dir.join("schedule.toml"),
        &to_toml(&p.schedule, "schedule")?,
    )?;
    save_text(
        &args.out_dir.join("params.toml"),
        &to_toml(&p.params, "params")?,
    )?;
    save_text(
        &args.out_dir.join("system.toml"),
        &to_toml(&p.system, "system")?,
    )?;

    let sys = p.system.build().map_err(core_err)?;
    let cfg = SimConfig::new(step, horizon).with_stride(args.stride);
    let traj = simulate(&sys, &p.schedule, &p.initial, p.t0, &cfg).map_err(core_err)?;
    save_text(
        &args.out_dir.join("trajectory.csv"),
        &trajectory_to_csv(&traj),
    )?;

    let mut failed: Vec<String> = Vec::new();
    if !report.verdict.is_certified() {
        failed.push("certificate".into());
    }
    if let (Some(sigma), Some(mu)) = (report.sigma, report.mu_used) {
        let rows = diagnostics(
            &p.pair,
            &traj,
            &p.schedule,
            sigma,
            p.params.c,
            mu,
            p.params.lambda,
        )
        .map_err(core_err)?;
        save_text(
            &args.out_dir.join("diagnostics.csv"),
            &write_diagnostics_csv(&rows),
        )?;

        let env = check_envelope(&p.pair, &traj, &p.schedule, sigma, p.params.c, args.tol)
            .map_err(core_err)?;
        println!(
            "envelope check: {} (worst excess {} at t = {})",
            if env.holds { "holds" } else { "VIOLATED" },
            full_precision(env.worst_excess),
            full_precision(env.worst_time)
        );
        if !env.holds {
            failed.push("envelope".into());
        }
        let fin =
            check_final_bound(&p.pair, &traj, mu, p.params.lambda, args.tol).map_err(core_err)?;
        println!(
            "final-bound check: {} (worst excess {} at t = {})",
            if fin.holds { "holds" } else { "VIOLATED" },
            full_precision(fin.worst_excess),
            full_precision(fin.worst_time)
        );
        if !fin.holds {
            failed.push("final bound".into());
        }
    }
    save_text(&args.out_dir.join("report.txt"), &report_text)?;

    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<(), CliError> {
    let mut params = load_params(&args.params)?;
    if let Some(lambda) = args.lambda {
        params = CertificateParams::new(
            params.c,
            params.rho1,
            params.rho2,
            params.kappa,
            params.tau,
            lambda,
            params.mu,
        )
        .map_err(|e| CliError::Parse(e.to_string()))?;
    }
    if let Some(mu) = args.mu {
        params.mu = Some(mu);
    }
    let sched = load_schedule(&args.schedule)?;
    let report = certify(&params, &sched, args.t0, args.horizon).map_err(core_err)?;
    print!("{report}");
    if report.verdict.is_certified() {
        Ok(())
    } else {
        let reason = match &report.verdict {
            Verdict::NotCertified { reason } => reason.clone(),
            Verdict::Certified => unreachable!(),
        };
        Err(CliError::Check(format!("not certified: {reason}")))
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let (spec, schedule, initial, t0, horizon, step) = match (&args.preset, &args.system) {
        (Some(name), None) => {
            let p = find_preset(name)?;
            let schedule = match &args.schedule {
                Some(path) => load_schedule(path)?,
                None => p.schedule.clone(),
            };
            (
                p.system.clone(),
                schedule,
                p.initial.clone(),
                args.t0,
                args.horizon.unwrap_or(p.horizon),
                args.step.unwrap_or(p.base_step),
            )
        }
        (None, Some(path)) => {
            let spec: SystemSpec = load_toml(path, "system")?;
            let schedule_path = args
                .schedule
                .as_ref()
                .ok_or_else(|| CliError::Parse("--schedule is required with --system".into()))?;
            let schedule = load_schedule(schedule_path)?;
            let constant = spec.initial.clone().ok_or_else(|| {
                CliError::Parse(format!(
                    "{}: system file needs an `initial` state vector",
                    path.display()
                ))
            })?;
            let tau = spec.effective_tau();
            let initial = StateVector::new(constant)
                .and_then(|x| HistoryFunction::constant(tau, x))
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let horizon = args
                .horizon
                .ok_or_else(|| CliError::Parse("--horizon is required with --system".into()))?;
            let step = args.step.unwrap_or(tau / 8.0);
            (spec, schedule, initial, args.t0, horizon, step)
        }
        _ => {
            return Err(CliError::Parse(
                "give exactly one of --preset or --system".into(),
            ))
        }
    };

    let initial = match &args.initial {
        Some(values) => StateVector::new(values.clone())
            .and_then(|x| HistoryFunction::constant(spec.effective_tau(), x))
            .map_err(|e| CliError::Parse(e.to_string()))?,
        None => initial,
    };
    let sys = spec.build().map_err(|e| CliError::Parse(e.to_string()))?;
    let cfg = SimConfig::new(step, horizon).with_stride(args.stride);
    let traj = simulate(&sys, &schedule, &initial, t0, &cfg).map_err(core_err)?;
    save_text(&args.out, &trajectory_to_csv(&traj))?;
    println!(
        "wrote {} nodes ({} impulses) to {}",
        traj.times().len(),
        traj.impulse_nodes().len(),
        args.out.display()
    );
    Ok(())
}

pub fn cmd_schedule(args: &ScheduleArgs) -> Result<(), CliError> {
    let sched = load_schedule(&args.schedule)?;
    let horizon = args
        .horizon
        .or(sched.horizon())
        .ok_or_else(|| CliError::Parse("--horizon is required for periodic schedules".into()))?;

    match args.analysis {
        Analysis::Windows => {
            let tau = args.tau.ok_or_else(|| {
                CliError::Parse("--tau is required for the windows analysis".into())
            })?;
            let report = window_counts(&sched, tau, horizon).map_err(core_err)?;
            println!("k,t_k,count");
            for (k, t_k, count) in &report.rows {
                println!("{k},{},{count}", full_precision(*t_k));
            }
            println!(
                "supremum = {}{}",
                report.supremum,
                if report.horizon_limited {
                    " (horizon-limited)"
                } else {
                    ""
                }
            );
            print_band(args, &sched)?;
            Ok(())
        }
        Analysis::Adt | Analysis::Reverse => {
            let (t_star, n_star) = match (args.t_star, args.n_star) {
                (Some(t), Some(n)) => (t, n),
                _ => {
                    return Err(CliError::Parse(
                        "--t-star and --n-star are required for dwell analyses".into(),
                    ))
                }
            };
            let adt = AdtParams::new(t_star, n_star).map_err(|e| CliError::Parse(e.to_string()))?;
            let verdict = if args.analysis == Analysis::Adt {
                check_adt(&sched, &adt, args.t0, horizon).map_err(core_err)?
            } else {
                check_reverse_adt(&sched, &adt, args.t0, horizon).map_err(core_err)?
            };
            println!(
                "holds = {}\nworst_slack = {}\nwitness = [{}, {}]",
                verdict.holds,
                full_precision(verdict.worst_slack),
                full_precision(verdict.witness.0),
                full_precision(verdict.witness.1)
            );
            print_band(args, &sched)?;
            if verdict.holds {
                Ok(())
            } else {
                Err(CliError::Check(format!(
                    "dwell condition fails with worst slack {}",
                    full_precision(verdict.worst_slack)
                )))
            }
        }
    }
}

/// Prints the admissible window-count band when sigma and parameters are
/// available.
fn print_band(args: &ScheduleArgs, _sched: &ImpulseSchedule) -> Result<(), CliError> {
    let (Some(params_path), Some(sigma)) = (&args.params, args.sigma) else {
        return Ok(());
    };
    let params = load_params(params_path)?;
    let (Some(t_star), Some(n_star)) = (args.t_star, args.n_star) else {
        return Ok(());
    };
    let adt = AdtParams::new(t_star, n_star).map_err(|e| CliError::Parse(e.to_string()))?;
    match window_count_bounds(&params, sigma, &adt) {
        Ok(band) => {
            println!(
                "window_count_band = [{}, {}]{}",
                full_precision(band.lower),
                full_precision(band.upper),
                if band.empty_band { " (empty)" } else { "" }
            );
        }
        Err(e) => println!("window_count_band unavailable: {e}"),
    }
    Ok(())
}
