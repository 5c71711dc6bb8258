//! `gevrey-flow`: drive single spectral runs, vanishing-viscosity sweeps,
//! and inequality certifications from the command line.
//!
//! Exit codes: `0` when the requested run or verdicts pass, `1` when a
//! verdict fails (or a run aborts on a guard), `2` on configuration or
//! I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gevrey_flow_core::certify::{
    certify_cancellation, certify_elementary_exp, certify_lattice_triangle,
    certify_scalar_gevrey, certify_trilinear_bound, CertificationReport, EnsembleSpec, LogGrid,
};
use gevrey_flow_core::experiment::{
    load_config, run_experiment, ExperimentConfig, OUTPUT_ENV, SCHEMA_VERSION,
};
use gevrey_flow_core::exact::ExactSolution;
use gevrey_flow_core::io::{write_field_json, write_json, write_norms_csv};
use gevrey_flow_core::lattice::TruncatedLattice;
use gevrey_flow_core::norms::GevreyParams;
use gevrey_flow_core::radius::RadiusSchedule;
use gevrey_flow_core::rand_field::RandomFieldSpec;
use gevrey_flow_core::solver::{integrate, GevreyTracking, SolverConfig};
use gevrey_flow_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "gevrey-flow",
    version,
    about = "Pseudo-spectral flows on the torus: runs, viscosity sweeps, inequality certifications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one flow and write its norm history.
    Solve(SolveArgs),
    /// Run the viscosity sweep described by a JSON config.
    Sweep(SweepArgs),
    /// Sample an inequality suite and report the supremum ratio.
    Verify(VerifyArgs),
    /// Summarize a finished sweep directory and gate on its verdicts.
    Report(ReportArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Sweep config to take the lattice, tracking, and initial data from.
    #[arg(long, conflicts_with = "exact")]
    config: Option<PathBuf>,
    /// Closed-form flow by name: taylor_green_2d or beltrami_3d.
    #[arg(long)]
    exact: Option<String>,
    /// Viscosity (0 integrates the inviscid equations).
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    /// Final time.
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Lattice cutoff for --exact runs.
    #[arg(long, default_value_t = 8)]
    n: i32,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long, default_value_t = 5.0)]
    r: f64,
    #[arg(long, default_value_t = 0.4)]
    tau0: f64,
    /// Overrides the config's generator seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (resolved against $GEVREY_FLOW_OUT when relative).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's generator seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Suite {
    ScalarGevrey,
    LatticeTriangle,
    Cancellation,
    Trilinear,
    ElementaryExp,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which inequality to sample.
    #[arg(long, value_enum)]
    suite: Suite,
    /// Gevrey index for the scalar suite (default: 1, 1.5, 2, 3).
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Lattice cutoff for the lattice and field suites.
    #[arg(long)]
    n: Option<i32>,
    /// Random fields per field suite (the trilinear suite doubles this).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Points per axis of the scalar suite's log grid.
    #[arg(long, default_value_t = 500)]
    grid: usize,
    /// Write the report array here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// A directory holding a sweep's report.json.
    #[arg(long)]
    dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Sweep(args) => sweep(args),
        Command::Verify(args) => verify(args),
        Command::Report(args) => report(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn out_root(dir: Option<PathBuf>, fallback: &str) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_default();
    root.join(dir.unwrap_or_else(|| PathBuf::from(fallback)))
}

fn solve(args: SolveArgs) -> Result<bool> {
    let (lattice, tracking, schedule, initial, source, t_end, dt) = match (&args.config, &args.exact)
    {
        (Some(path), None) => {
            let mut cfg = load_config(path)?;
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            let lattice = cfg.lattice()?;
            let schedule = match cfg.schedule {
                gevrey_flow_core::experiment::ScheduleSource::Configured { c1, c2 } => {
                    RadiusSchedule::new(cfg.tracking.tau0, c1, c2)?
                }
                gevrey_flow_core::experiment::ScheduleSource::PilotMeasured => {
                    RadiusSchedule::new(cfg.tracking.tau0, 0.0, 0.0)?
                }
            };
            let initial = cfg.initial_field()?;
            let tracking = (cfg.tracking.s, cfg.tracking.r, cfg.tracking.tau0);
            let source = format!("config {}", path.display());
            (
                lattice,
                tracking,
                schedule,
                initial,
                source,
                args.t_end.unwrap_or(cfg.t_end),
                cfg.dt,
            )
        }
        (None, Some(name)) => {
            let sol = ExactSolution::from_name(name)?;
            let lattice = TruncatedLattice::new(sol.dim(), args.n)?;
            GevreyParams::new(args.s, args.r, args.tau0)?;
            let schedule = RadiusSchedule::new(args.tau0, 0.0, 0.0)?;
            let initial = sol.velocity(lattice, 0.0, 0.0)?;
            let t_end = args.t_end.ok_or_else(|| {
                Error::InvalidConfig("--exact runs need an explicit --T".into())
            })?;
            (
                lattice,
                (args.s, args.r, args.tau0),
                schedule,
                initial,
                format!("exact {name}"),
                t_end,
                args.dt,
            )
        }
        _ => {
            return Err(Error::InvalidConfig(
                "pass exactly one of --config or --exact".into(),
            ))
        }
    };

    let dir = out_root(args.out, "out");
    std::fs::create_dir_all(&dir)?;
    let manifest = |termination: String, wall: Option<f64>| {
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "code_version": env!("CARGO_PKG_VERSION"),
            "mode": "solve",
            "initial": source,
            "lattice": lattice,
            "tracking": { "s": tracking.0, "r": tracking.1, "tau0": tracking.2 },
            "nu": args.nu,
            "dt": dt,
            "t_end": t_end,
            "seed": args.seed,
            "termination": termination,
            "wall_time_secs": wall,
        })
    };
    write_json(&dir.join("manifest.json"), &manifest("running".into(), None))?;

    let clock = Instant::now();
    let solver = SolverConfig {
        nu: args.nu,
        dt,
        t_end,
        advection: true,
        tracking: GevreyTracking {
            r: tracking.1,
            s: tracking.0,
            schedule,
        },
        blowup_factor: 10.0,
        checkpoint_every: 0,
    };
    let record = integrate(&solver, &initial)?;
    let wall = clock.elapsed().as_secs_f64();

    write_norms_csv(&dir.join(format!("norms_{:e}.csv", args.nu)), &record.samples)?;
    write_field_json(&dir.join("final_field.json"), &record.final_field)?;
    let termination = serde_json::to_string(&record.status)?;
    write_json(&dir.join("manifest.json"), &manifest(termination, Some(wall)))?;

    let last = record.samples.last().expect("at least the initial sample");
    println!(
        "{} steps to t = {:.6}; l2 = {:.6e}, gevrey_r = {:.6e}, dissipation = {:.6e} -> {}",
        record.steps_taken,
        last.t,
        last.l2,
        last.gevrey_r,
        last.dissipation_cum,
        dir.display()
    );
    if !record.status.is_completed() {
        eprintln!("run aborted: {}", serde_json::to_string(&record.status)?);
    }
    Ok(record.status.is_completed())
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let mut cfg: ExperimentConfig = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let (report, dir) = run_experiment(&cfg)?;
    for row in &report.rows {
        println!(
            "nu = {:9.3e}: |w|_G(r-1) = {:.6e}, |p~|_G(r) = {:.6e}, |w|_2 = {:.6e}, M_T = {:.6e}",
            row.nu, row.w_gevrey_rm1, row.p_gevrey_r, row.w_l2, row.m_t
        );
    }
    if let Some(fit) = &report.velocity_fit {
        println!("velocity rate: slope {:.4} over {} rows", fit.slope, fit.n_used);
    }
    if let Some(fit) = &report.pressure_fit {
        println!("pressure rate: slope {:.4} over {} rows", fit.slope, fit.n_used);
    }
    let v = &report.verdicts;
    for (name, ok) in [
        ("velocity_rate", v.velocity_rate),
        ("pressure_rate", v.pressure_rate),
        ("w_monotone_in_nu", v.w_monotone_in_nu),
        ("dissipation_budget", v.dissipation_budget),
        ("uniform_gevrey_bound", v.uniform_gevrey_bound),
    ] {
        println!("{}: {}", name, if ok { "pass" } else { "FAIL" });
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("outputs in {}", dir.display());
    Ok(v.all_passed())
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let mut reports: Vec<CertificationReport> = Vec::new();
    let suites: &[Suite] = if args.suite == Suite::All {
        &[
            Suite::ScalarGevrey,
            Suite::LatticeTriangle,
            Suite::Cancellation,
            Suite::Trilinear,
            Suite::ElementaryExp,
        ]
    } else {
        std::slice::from_ref(&args.suite)
    };
    for suite in suites {
        match suite {
            Suite::ScalarGevrey => {
                let grid = LogGrid {
                    lo: 1.0,
                    hi: 1e6,
                    points: args.grid,
                };
                let s_values: Vec<f64> = match args.s {
                    Some(s) => vec![s],
                    None => vec![1.0, 1.5, 2.0, 3.0],
                };
                for s in s_values {
                    reports.push(certify_scalar_gevrey(s, &grid)?);
                }
            }
            Suite::LatticeTriangle => {
                reports.push(certify_lattice_triangle(args.dim, args.n.unwrap_or(10))?);
            }
            Suite::Cancellation => {
                let ens = ensemble(&args, 6, 100)?;
                let gevrey = GevreyParams::new(2.0, 5.0, 0.2)?;
                reports.push(certify_cancellation(&ens, &gevrey, true)?);
            }
            Suite::Trilinear => {
                let ens = ensemble(&args, 4, 32)?;
                let gevrey = GevreyParams::new(2.0, 5.0, 0.2)?;
                reports.push(certify_trilinear_bound(&ens, &gevrey, None)?);
            }
            Suite::ElementaryExp => {
                reports.push(certify_elementary_exp(args.samples.unwrap_or(2001))?);
            }
            Suite::All => unreachable!(),
        }
    }

    for r in &reports {
        eprintln!(
            "{}: sup ratio {:.6e} vs threshold {:.6e} -> {}",
            r.id,
            r.sup_ratio,
            r.threshold,
            if r.passed() { "pass" } else { "FAIL" }
        );
    }
    match &args.out {
        Some(path) => write_json(path, &reports)?,
        None => {
            serde_json::to_writer_pretty(std::io::stdout().lock(), &reports)?;
            println!();
        }
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn ensemble(args: &VerifyArgs, default_n: i32, default_samples: usize) -> Result<EnsembleSpec> {
    Ok(EnsembleSpec {
        lattice: TruncatedLattice::new(args.dim, args.n.unwrap_or(default_n))?,
        field: RandomFieldSpec {
            s: 2.0,
            tau0: 0.2,
            decay: 3.0,
            amplitude: 1.0,
        },
        n_samples: args.samples.unwrap_or(default_samples),
        seed: args.seed,
    })
}

fn report(args: ReportArgs) -> Result<bool> {
    let path: &Path = &args.dir.join("report.json");
    let report: serde_json::Value = gevrey_flow_core::io::read_json(path)?;
    let verdicts = report["verdicts"].as_object().ok_or_else(|| {
        Error::InvalidConfig(format!("{} carries no verdicts object", path.display()))
    })?;
    let mut all = true;
    for (name, value) in verdicts {
        let ok = value.as_bool().unwrap_or(false);
        all &= ok;
        println!("{}: {}", name, if ok { "pass" } else { "FAIL" });
    }
    if let Some(fit) = report["velocity_fit"].as_object() {
        println!("velocity slope: {}", fit["slope"]);
    }
    if let Some(fit) = report["pressure_fit"].as_object() {
        println!("pressure slope: {}", fit["slope"]);
    }
    Ok(all)
}
