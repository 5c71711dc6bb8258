//! The vanishing-viscosity experiment: one inviscid reference run plus a
//! family of Navier–Stokes runs on a shared time grid, compared at the
//! final time through shrinking-radius Gevrey norms.
//!
//! A sweep produces, per viscosity `ν`, the difference field `w = u^ν - u`
//! against the inviscid reference, its pressure counterpart
//! `p̃ = p^ν - p`, their Gevrey norms at the final radius `τ(T)`, and the
//! dissipation budget `M_T(ν) = ν ∫₀ᵀ ‖u^ν‖²_{G_{r+1,τ}} dt`. Log-log
//! least squares over the rows estimates the convergence rates in `ν`;
//! the companion checks compare the per-run Gevrey suprema against the
//! a-priori growth envelope and the budgets against each other.
//!
//! Configuration is strict JSON: versioned, unknown keys rejected, the
//! viscosity list strictly decreasing, and three-dimensional runs must
//! track a Sobolev order in the `r > 9/2` well-posedness regime.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{growth_bound, measure_constants, AprioriConstants};
use crate::error::Error;
use crate::exact::ExactSolution;
use crate::field::SpectralVectorField;
use crate::io::{write_json, write_norms_csv};
use crate::lattice::TruncatedLattice;
use crate::norms::{gevrey_norm, gevrey_norm_scalar, sobolev_norm};
use crate::pressure::recover_pressure;
use crate::radius::RadiusSchedule;
use crate::rand_field::{random_gevrey_field, RandomFieldSpec};
use crate::advection::AdvectionEngine;
use crate::solver::{integrate, GevreyTracking, NormSample, SolverConfig, TrajectoryRecord};
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the directory all relative output paths
/// are resolved against.
pub const OUTPUT_ENV: &str = "GEVREY_FLOW_OUT";

/// Fitted slopes at or above this clear the half-order convergence
/// verdict (½ minus fitting slack).
pub const MIN_CONVERGENCE_SLOPE: f64 = 0.45;

/// Budgets across the viscosity list may spread by at most this factor.
pub const DISSIPATION_SPREAD_FACTOR: f64 = 2.0;

/// Per-run Gevrey suprema may spread by at most this factor.
pub const GEVREY_SUP_SPREAD_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub dim: usize,
    pub n: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackingSpec {
    pub s: f64,
    pub r: f64,
    pub tau0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// Divergence-free random draw with a Gevrey-type spectral envelope;
    /// the top-level `seed` keys the generator.
    Generator { spec: RandomFieldSpec },
    /// A named closed-form flow at `t = 0`.
    Exact { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSource {
    /// Radius coefficients given directly.
    Configured { c1: f64, c2: f64 },
    /// Run an inviscid pilot at frozen radius, measure the trajectory
    /// constants, and match the schedule to them.
    PilotMeasured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub lattice: LatticeSpec,
    pub tracking: TrackingSpec,
    pub initial: InitialData,
    pub schedule: ScheduleSource,
    pub dt: f64,
    pub t_end: f64,
    /// Strictly decreasing, all positive.
    pub nu_list: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_blowup_factor")]
    pub blowup_factor: f64,
    #[serde(default)]
    pub checkpoint_every: usize,
    /// Resolved against [`OUTPUT_ENV`] when relative; defaults to `out`.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_blowup_factor() -> f64 {
    10.0
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "schema_version {} unsupported; this build reads version {}",
                self.schema_version, SCHEMA_VERSION
            )));
        }
        let lattice = TruncatedLattice::new(self.lattice.dim, self.lattice.n)?;
        let params = crate::norms::GevreyParams::new(
            self.tracking.s,
            self.tracking.r,
            self.tracking.tau0,
        )?;
        if lattice.dim() == 3 && !params.wellposed_regime(3) {
            return Err(Error::InvalidConfig(format!(
                "three-dimensional runs need r > 9/2, got r = {}",
                self.tracking.r
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.t_end > 0.0 && self.t_end.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "need finite dt > 0 and t_end > 0, got dt = {:e}, t_end = {:e}",
                self.dt, self.t_end
            )));
        }
        if self.nu_list.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "nu_list needs at least 2 entries, got {}",
                self.nu_list.len()
            )));
        }
        for pair in self.nu_list.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(Error::InvalidConfig(format!(
                    "nu_list must be strictly decreasing; {} does not decrease to {}",
                    pair[0], pair[1]
                )));
            }
        }
        if let Some(&last) = self.nu_list.last() {
            if !(last > 0.0) || !self.nu_list.iter().all(|nu| nu.is_finite()) {
                return Err(Error::InvalidConfig(
                    "nu_list entries must be finite and positive".into(),
                ));
            }
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "blowup_factor must exceed 1, got {}",
                self.blowup_factor
            )));
        }
        match &self.schedule {
            ScheduleSource::Configured { c1, c2 } => {
                RadiusSchedule::new(self.tracking.tau0, *c1, *c2)?;
            }
            ScheduleSource::PilotMeasured => {}
        }
        if let InitialData::Exact { name } = &self.initial {
            let sol = ExactSolution::from_name(name)?;
            if sol.dim() != self.lattice.dim {
                return Err(Error::InvalidConfig(format!(
                    "{} is a {}-d flow; the lattice is {}-d",
                    name,
                    sol.dim(),
                    self.lattice.dim
                )));
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<TruncatedLattice> {
        TruncatedLattice::new(self.lattice.dim, self.lattice.n)
    }

    pub fn initial_field(&self) -> Result<SpectralVectorField<f64>> {
        let lattice = self.lattice()?;
        match &self.initial {
            InitialData::Generator { spec } => random_gevrey_field(lattice, spec, self.seed),
            InitialData::Exact { name } => {
                ExactSolution::from_name(name)?.velocity(lattice, 0.0, 0.0)
            }
        }
    }
}

/// Parse strict JSON; syntax and unknown-key errors keep serde's
/// line/column position.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// SHA-256 of the canonical JSON encoding of the configuration.
pub fn config_hash(cfg: &ExperimentConfig) -> Result<String> {
    let text = serde_json::to_string(cfg)?;
    let digest = Sha256::digest(text.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// One viscosity's end-of-run comparison against the inviscid reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub nu: f64,
    pub t_final: f64,
    /// `‖u^ν(T) - u(T)‖_{G_{r-1,τ(T)}}`
    pub w_gevrey_rm1: f64,
    /// `‖p^ν(T) - p(T)‖_{G_{r,τ(T)}}`
    pub p_gevrey_r: f64,
    pub w_l2: f64,
    /// `ν ∫₀ᵀ ‖u^ν‖²_{G_{r+1,τ}} dt`
    pub m_t: f64,
}

/// Log-log least-squares fit of a norm column against viscosity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub n_used: usize,
    /// Viscosities whose rows were dropped for a non-positive norm.
    pub excluded: Vec<f64>,
}

/// Ordinary least squares of `ln(norm)` on `ln(ν)`. Rows with
/// non-positive norms carry no rate information and are excluded;
/// at least three usable rows remain or the fit is refused.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    let mut excluded = Vec::new();
    let mut xy = Vec::new();
    for &(nu, norm) in points {
        if norm > 0.0 && norm.is_finite() {
            xy.push((nu.ln(), norm.ln()));
        } else {
            excluded.push(nu);
        }
    }
    if xy.len() < 3 {
        return Err(Error::TooFewRows {
            required: 3,
            got: xy.len(),
        });
    }
    let n = xy.len() as f64;
    let mean_x = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual_rms = (xy
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFit {
        slope,
        intercept,
        residual_rms,
        n_used: xy.len(),
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationCheck {
    pub min: f64,
    pub max: f64,
    /// `max / min`; infinite when some budget vanishes.
    pub ratio: f64,
    pub factor: f64,
    pub passed: bool,
}

/// Budgets `M_T(ν)` across the (strictly viscous) rows must agree within
/// a fixed factor.
pub fn check_dissipation_budget(rows: &[SweepRow], factor: f64) -> DissipationCheck {
    let budgets: Vec<f64> = rows.iter().filter(|r| r.nu > 0.0).map(|r| r.m_t).collect();
    let min = budgets.iter().copied().fold(f64::INFINITY, f64::min);
    let max = budgets.iter().copied().fold(0.0f64, f64::max);
    let ratio = if min > 0.0 { max / min } else { f64::INFINITY };
    DissipationCheck {
        min,
        max,
        ratio,
        factor,
        passed: budgets.len() >= 2 && ratio <= factor,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyBoundCheck {
    /// Largest per-run supremum of `‖u(t)‖_{G_{r,τ(t)}}`.
    pub sup: f64,
    /// Growth envelope at the final time, from the measured constants.
    pub envelope: f64,
    pub within_envelope: bool,
    /// Max/min of the per-run suprema.
    pub spread: f64,
    pub spread_limit: f64,
    pub within_spread: bool,
    pub passed: bool,
}

/// The uniform-in-viscosity regularity statement: every run's Gevrey
/// supremum sits below the a-priori growth envelope, and the suprema
/// barely move as `ν` varies.
pub fn check_uniform_gevrey_bound(
    gevrey_sup: &[(f64, f64)],
    envelope: f64,
    spread_limit: f64,
) -> GevreyBoundCheck {
    let sup = gevrey_sup.iter().map(|p| p.1).fold(0.0f64, f64::max);
    let min = gevrey_sup
        .iter()
        .map(|p| p.1)
        .fold(f64::INFINITY, f64::min);
    let spread = if min > 0.0 { sup / min } else { f64::INFINITY };
    let within_envelope = sup <= envelope;
    let within_spread = spread < spread_limit;
    GevreyBoundCheck {
        sup,
        envelope,
        within_envelope,
        spread,
        spread_limit,
        within_spread,
        passed: within_envelope && within_spread,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    /// Viscosity-descending rows.
    pub rows: Vec<SweepRow>,
    pub velocity_fit: Option<RateFit>,
    pub pressure_fit: Option<RateFit>,
    /// `(ν, sup_t ‖u^ν‖_{G_{r,τ(t)}})`, inviscid reference first at `ν = 0`.
    pub gevrey_sup: Vec<(f64, f64)>,
    pub initial_h_r: f64,
    pub initial_gevrey: f64,
    pub constants: AprioriConstants<f64>,
    pub schedule: RadiusSchedule<f64>,
    /// Inviscid Gevrey supremum at frozen radius `τ0`, when a pilot ran —
    /// the ablation the shrinking radius is compared against.
    pub frozen_tau_sup: Option<f64>,
    pub warnings: Vec<String>,
}

/// A finished sweep plus the per-run norm histories, keyed for
/// `norms_<nu>.csv` emission (the inviscid reference is keyed `0`).
pub struct SweepOutcome {
    pub result: SweepResult,
    pub histories: Vec<(f64, Vec<NormSample<f64>>)>,
    pub pilot_history: Option<Vec<NormSample<f64>>>,
}

fn run_one(
    cfg: &ExperimentConfig,
    initial: &SpectralVectorField<f64>,
    nu: f64,
    schedule: RadiusSchedule<f64>,
) -> Result<TrajectoryRecord<f64>> {
    let solver = SolverConfig {
        nu,
        dt: cfg.dt,
        t_end: cfg.t_end,
        advection: true,
        tracking: GevreyTracking {
            r: cfg.tracking.r,
            s: cfg.tracking.s,
            schedule,
        },
        blowup_factor: cfg.blowup_factor,
        checkpoint_every: cfg.checkpoint_every,
    };
    let record = integrate(&solver, initial)?;
    if !record.status.is_completed() {
        return Err(Error::RunFailed {
            nu,
            status: serde_json::to_string(&record.status)?,
        });
    }
    Ok(record)
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let hash = config_hash(cfg)?;
    let lattice = cfg.lattice()?;
    let initial = cfg.initial_field()?;
    let (s, r, tau0) = (cfg.tracking.s, cfg.tracking.r, cfg.tracking.tau0);
    let initial_h_r = sobolev_norm(&initial, r);
    let initial_gevrey = gevrey_norm(&initial, r, s, tau0);

    let mut warnings = Vec::new();
    let mut pilot_history = None;
    let mut frozen_tau_sup = None;

    let (schedule, constants, reference) = match cfg.schedule {
        ScheduleSource::Configured { c1, c2 } => {
            let schedule = RadiusSchedule::new(tau0, c1, c2)?;
            let reference = run_one(cfg, &initial, 0.0, schedule)?;
            let constants = measure_constants(&reference, &hash);
            (schedule, constants, reference)
        }
        ScheduleSource::PilotMeasured => {
            let frozen = RadiusSchedule::new(tau0, 0.0, 0.0)?;
            let pilot = run_one(cfg, &initial, 0.0, frozen)?;
            let constants = measure_constants(&pilot, &hash);
            let schedule = constants.schedule(tau0, 1.0)?;
            frozen_tau_sup = Some(pilot.sup_gevrey_r());
            pilot_history = Some(pilot.samples);
            let reference = run_one(cfg, &initial, 0.0, schedule)?;
            (schedule, constants, reference)
        }
    };

    let tau_final = schedule.tau(cfg.t_end);
    let mut engine = AdvectionEngine::new(lattice)?;
    let reference_pressure = recover_pressure(&mut engine, &reference.final_field)?;

    let mut rows = Vec::new();
    let mut gevrey_sup = vec![(0.0, reference.sup_gevrey_r())];
    let mut histories = vec![(0.0, reference.samples.clone())];
    for &nu in &cfg.nu_list {
        let record = run_one(cfg, &initial, nu, schedule)?;
        let w = record.final_field.sub(&reference.final_field)?;
        let p = recover_pressure(&mut engine, &record.final_field)?;
        let p_diff = p.sub(&reference_pressure)?;
        let row = SweepRow {
            nu,
            t_final: record.samples.last().map(|s| s.t).unwrap_or(cfg.t_end),
            w_gevrey_rm1: gevrey_norm(&w, r - 1.0, s, tau_final),
            p_gevrey_r: gevrey_norm_scalar(&p_diff, r, s, tau_final),
            w_l2: w.l2_norm(),
            m_t: record.dissipation_total(),
        };
        if !(row.w_gevrey_rm1.is_finite() && row.p_gevrey_r.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("difference norms at nu = {nu:e}"),
            });
        }
        rows.push(row);
        gevrey_sup.push((nu, record.sup_gevrey_r()));
        histories.push((nu, record.samples));
    }
    rows.sort_by(|a, b| b.nu.total_cmp(&a.nu));

    let mut fit_column = |label: &str, col: fn(&SweepRow) -> f64| -> Result<Option<RateFit>> {
        if rows.len() < 3 {
            warnings.push(format!(
                "{label}: only {} rows, need 3 for a rate fit",
                rows.len()
            ));
            return Ok(None);
        }
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.nu, col(r))).collect();
        let fit = fit_rate(&pts)?;
        for nu in &fit.excluded {
            warnings.push(format!("{label}: dropped nu = {nu:e} (non-positive norm)"));
        }
        Ok(Some(fit))
    };
    let velocity_fit = fit_column("velocity rate", |r| r.w_gevrey_rm1)?;
    let pressure_fit = fit_column("pressure rate", |r| r.p_gevrey_r)?;

    Ok(SweepOutcome {
        result: SweepResult {
            rows,
            velocity_fit,
            pressure_fit,
            gevrey_sup,
            initial_h_r,
            initial_gevrey,
            constants,
            schedule,
            frozen_tau_sup,
            warnings,
        },
        histories,
        pilot_history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportVerdicts {
    pub velocity_rate: bool,
    pub pressure_rate: bool,
    pub w_monotone_in_nu: bool,
    pub dissipation_budget: bool,
    pub uniform_gevrey_bound: bool,
}

impl ReportVerdicts {
    pub fn all_passed(&self) -> bool {
        self.velocity_rate
            && self.pressure_rate
            && self.w_monotone_in_nu
            && self.dissipation_budget
            && self.uniform_gevrey_bound
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<SweepRow>,
    pub velocity_fit: Option<RateFit>,
    pub pressure_fit: Option<RateFit>,
    pub dissipation: DissipationCheck,
    pub gevrey_bound: GevreyBoundCheck,
    pub gevrey_sup: Vec<(f64, f64)>,
    pub constants: AprioriConstants<f64>,
    pub frozen_tau_sup: Option<f64>,
    pub verdicts: ReportVerdicts,
    pub warnings: Vec<String>,
}

/// Evaluate the sweep verdicts. The growth envelope uses the measured
/// constants with unit schedule constant.
pub fn evaluate(result: &SweepResult, t_end: f64) -> ExperimentReport {
    let dissipation = check_dissipation_budget(&result.rows, DISSIPATION_SPREAD_FACTOR);
    let envelope = growth_bound(
        t_end,
        1.0,
        result.constants.c_t,
        result.initial_gevrey,
        result.initial_h_r,
    );
    let gevrey_bound =
        check_uniform_gevrey_bound(&result.gevrey_sup, envelope, GEVREY_SUP_SPREAD_FACTOR);
    let w_monotone_in_nu = result.rows.len() >= 2
        && result
            .rows
            .windows(2)
            .all(|p| p[1].w_gevrey_rm1 < p[0].w_gevrey_rm1);
    let verdicts = ReportVerdicts {
        velocity_rate: result
            .velocity_fit
            .as_ref()
            .is_some_and(|f| f.slope >= MIN_CONVERGENCE_SLOPE),
        pressure_rate: result
            .pressure_fit
            .as_ref()
            .is_some_and(|f| f.slope >= MIN_CONVERGENCE_SLOPE),
        w_monotone_in_nu,
        dissipation_budget: dissipation.passed,
        uniform_gevrey_bound: gevrey_bound.passed,
    };
    ExperimentReport {
        rows: result.rows.clone(),
        velocity_fit: result.velocity_fit.clone(),
        pressure_fit: result.pressure_fit.clone(),
        dissipation,
        gevrey_bound,
        gevrey_sup: result.gevrey_sup.clone(),
        constants: result.constants.clone(),
        frozen_tau_sup: result.frozen_tau_sup,
        verdicts,
        warnings: result.warnings.clone(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub code_version: &'static str,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub seed: u64,
    pub constants: Option<AprioriConstants<f64>>,
    pub termination: String,
    pub wall_time_secs: Option<f64>,
}

/// Root for relative output paths: [`OUTPUT_ENV`] when set, else the
/// working directory. Absolute configured paths pass through untouched.
pub fn resolve_output_dir(cfg: &ExperimentConfig) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_default();
    match &cfg.output_dir {
        Some(dir) => root.join(dir),
        None => root.join("out"),
    }
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "nu,w_gevrey_rm1,p_gevrey_r,w_l2,M_T")?;
    for row in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            row.nu, row.w_gevrey_rm1, row.p_gevrey_r, row.w_l2, row.m_t
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_manifest(
    dir: &Path,
    cfg: &ExperimentConfig,
    hash: &str,
    constants: Option<AprioriConstants<f64>>,
    termination: String,
    wall_time_secs: Option<f64>,
) -> Result<()> {
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            schema_version: SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION"),
            config: cfg.clone(),
            config_hash: hash.to_string(),
            seed: cfg.seed,
            constants,
            termination,
            wall_time_secs,
        },
    )
}

/// Full pipeline: manifest first, then the sweep, then
/// `norms_<nu>.csv`/`sweep.csv`/`report.json`, then the manifest again
/// with the outcome. Returns the report and the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(ExperimentReport, PathBuf)> {
    cfg.validate()?;
    let dir = resolve_output_dir(cfg);
    std::fs::create_dir_all(&dir)?;
    let hash = config_hash(cfg)?;
    write_manifest(&dir, cfg, &hash, None, "running".into(), None)?;
    let clock = Instant::now();
    let outcome = match run_sweep(cfg) {
        Ok(outcome) => outcome,
        Err(e) => {
            write_manifest(
                &dir,
                cfg,
                &hash,
                None,
                format!("failed: {e}"),
                Some(clock.elapsed().as_secs_f64()),
            )?;
            return Err(e);
        }
    };
    if let Some(samples) = &outcome.pilot_history {
        write_norms_csv(&dir.join("norms_pilot.csv"), samples)?;
    }
    for (nu, samples) in &outcome.histories {
        write_norms_csv(&dir.join(format!("norms_{nu:e}.csv")), samples)?;
    }
    write_sweep_csv(&dir.join("sweep.csv"), &outcome.result.rows)?;
    let report = evaluate(&outcome.result, cfg.t_end);
    write_json(&dir.join("report.json"), &report)?;
    write_manifest(
        &dir,
        cfg,
        &hash,
        Some(outcome.result.constants.clone()),
        "completed".into(),
        Some(clock.elapsed().as_secs_f64()),
    )?;
    Ok((report, dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor_green_config(dir: Option<PathBuf>) -> ExperimentConfig {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            lattice: LatticeSpec { dim: 2, n: 4 },
            tracking: TrackingSpec {
                s: 2.0,
                r: 3.0,
                tau0: 0.4,
            },
            initial: InitialData::Exact {
                name: "taylor_green_2d".into(),
            },
            schedule: ScheduleSource::Configured { c1: 0.0, c2: 0.5 },
            dt: 1e-2,
            t_end: 0.25,
            nu_list: vec![1e-1, 1e-2, 1e-3],
            seed: 0,
            blowup_factor: 10.0,
            checkpoint_every: 0,
            output_dir: dir,
        }
    }

    #[test]
    fn rate_fit_recovers_exact_power_laws() {
        let nus = [1e-1, 1e-2, 1e-3, 1e-4];
        let linear: Vec<(f64, f64)> = nus.iter().map(|&nu| (nu, 3.0 * nu)).collect();
        let fit = fit_rate(&linear).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12, "slope {}", fit.slope);
        assert!(fit.residual_rms < 1e-12);
        let sqrt: Vec<(f64, f64)> = nus.iter().map(|&nu| (nu, nu.sqrt())).collect();
        let fit = fit_rate(&sqrt).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12, "slope {}", fit.slope);
    }

    #[test]
    fn rate_fit_drops_zero_rows_and_needs_three() {
        let pts = [(1e-1, 1e-1), (1e-2, 1e-2), (1e-3, 1e-3), (1e-4, 0.0)];
        let fit = fit_rate(&pts).unwrap();
        assert_eq!(fit.n_used, 3);
        assert_eq!(fit.excluded, vec![1e-4]);
        assert!((fit.slope - 1.0).abs() < 1e-12);
        let too_few = [(1e-1, 1.0), (1e-2, 0.5), (1e-3, 0.0)];
        assert!(matches!(
            fit_rate(&too_few),
            Err(Error::TooFewRows { required: 3, got: 2 })
        ));
    }

    #[test]
    fn config_rejects_unknown_keys_with_position() {
        let cfg = taylor_green_config(None);
        let mut value = serde_json::to_value(&cfg).unwrap();
        value["surprise"] = serde_json::json!(1);
        let text = serde_json::to_string_pretty(&value).unwrap();
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("surprise"), "{err}");
        assert!(err.contains("line"), "{err}");

        let mut value = serde_json::to_value(&cfg).unwrap();
        value["tracking"]["extra"] = serde_json::json!(2.0);
        let text = serde_json::to_string(&value).unwrap();
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn config_invariants_are_enforced() {
        let mut cfg = taylor_green_config(None);
        cfg.schema_version = 2;
        assert!(cfg.validate().is_err());

        let mut cfg = taylor_green_config(None);
        cfg.nu_list = vec![1e-2, 1e-2];
        assert!(cfg.validate().is_err());
        cfg.nu_list = vec![1e-3, 1e-2];
        assert!(cfg.validate().is_err());
        cfg.nu_list = vec![1e-2];
        assert!(cfg.validate().is_err());
        cfg.nu_list = vec![1e-2, 0.0];
        assert!(cfg.validate().is_err());

        let mut cfg = taylor_green_config(None);
        cfg.lattice = LatticeSpec { dim: 3, n: 4 };
        cfg.initial = InitialData::Exact {
            name: "beltrami_3d".into(),
        };
        assert!(cfg.validate().is_err(), "r = 3 is below the 3-d threshold");
        cfg.tracking.r = 5.0;
        assert!(cfg.validate().is_ok());

        let mut cfg = taylor_green_config(None);
        cfg.initial = InitialData::Exact {
            name: "beltrami_3d".into(),
        };
        assert!(cfg.validate().is_err(), "dimension mismatch");
    }

    #[test]
    fn config_hash_is_stable_and_key_sensitive() {
        let cfg = taylor_green_config(None);
        let h1 = config_hash(&cfg).unwrap();
        let h2 = config_hash(&cfg).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 64);
        let mut other = cfg.clone();
        other.seed = 1;
        assert_ne!(h1, config_hash(&other).unwrap());
    }

    #[test]
    fn taylor_green_sweep_matches_the_closed_form() {
        let cfg = taylor_green_config(None);
        let outcome = run_sweep(&cfg).unwrap();
        let result = &outcome.result;
        assert_eq!(result.rows.len(), 3);

        // The nonlinear term of this flow is a pure gradient, so each run
        // is exact heat decay: ‖u^ν(T) - u(T)‖ = (1 - e^{-2νT})‖u(0)‖.
        let u0 = cfg.initial_field().unwrap().l2_norm();
        for row in &result.rows {
            let expect = (1.0 - (-2.0 * row.nu * cfg.t_end).exp()) * u0;
            assert!(
                (row.w_l2 - expect).abs() <= 1e-8 * expect,
                "nu = {}: w_l2 = {:e}, closed form {:e}",
                row.nu,
                row.w_l2,
                expect
            );
        }
        for pair in result.rows.windows(2) {
            assert!(pair[0].nu > pair[1].nu);
            assert!(pair[0].w_gevrey_rm1 > pair[1].w_gevrey_rm1);
            assert!(pair[0].m_t > pair[1].m_t);
        }

        let fit = result.velocity_fit.as_ref().unwrap();
        assert!((fit.slope - 1.0).abs() < 0.02, "slope {}", fit.slope);
        let pfit = result.pressure_fit.as_ref().unwrap();
        assert!(
            (pfit.slope - 1.0).abs() < 0.05,
            "pressure slope {}",
            pfit.slope
        );

        let report = evaluate(result, cfg.t_end);
        assert!(report.verdicts.velocity_rate);
        assert!(report.verdicts.pressure_rate);
        assert!(report.verdicts.w_monotone_in_nu);
        assert!(report.verdicts.uniform_gevrey_bound);
        // Decaying flow: budgets scale like ν itself, far outside ×2.
        assert!(!report.verdicts.dissipation_budget);
        assert!(report.dissipation.ratio > 10.0);
    }

    #[test]
    fn pilot_measured_schedule_shrinks_the_radius() {
        let mut cfg = taylor_green_config(None);
        cfg.schedule = ScheduleSource::PilotMeasured;
        let outcome = run_sweep(&cfg).unwrap();
        let result = &outcome.result;
        assert!(outcome.pilot_history.is_some());
        assert!(result.frozen_tau_sup.is_some());
        assert!(result.schedule.tau(cfg.t_end) < cfg.tracking.tau0);
        assert!(matches!(
            result.constants.provenance,
            crate::constants::Provenance::Measured { .. }
        ));
        // Frozen-radius supremum dominates the shrinking-radius ones.
        let frozen = result.frozen_tau_sup.unwrap();
        for &(_, sup) in &result.gevrey_sup {
            assert!(sup <= frozen * (1.0 + 1e-12));
        }
    }

    #[test]
    fn experiment_writes_every_artifact_and_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = taylor_green_config(Some(dir.path().join("a")));
        let (report, out_a) = run_experiment(&cfg).unwrap();
        assert!(report.verdicts.w_monotone_in_nu);
        for name in [
            "manifest.json",
            "sweep.csv",
            "report.json",
            "norms_0e0.csv",
            "norms_1e-1.csv",
            "norms_1e-2.csv",
            "norms_1e-3.csv",
        ] {
            assert!(out_a.join(name).exists(), "missing {name}");
        }
        let manifest: serde_json::Value =
            crate::io::read_json(&out_a.join("manifest.json")).unwrap();
        assert_eq!(manifest["termination"], "completed");
        assert!(manifest["wall_time_secs"].as_f64().unwrap() >= 0.0);
        assert_eq!(
            manifest["config_hash"].as_str().unwrap(),
            config_hash(&cfg).unwrap()
        );

        let cfg_b = ExperimentConfig {
            output_dir: Some(dir.path().join("b")),
            ..cfg
        };
        let (_, out_b) = run_experiment(&cfg_b).unwrap();
        assert_eq!(
            std::fs::read(out_a.join("sweep.csv")).unwrap(),
            std::fs::read(out_b.join("sweep.csv")).unwrap()
        );
        assert_eq!(
            std::fs::read(out_a.join("norms_1e-2.csv")).unwrap(),
            std::fs::read(out_b.join("norms_1e-2.csv")).unwrap()
        );
    }

    #[test]
    fn failed_runs_name_the_offending_viscosity() {
        let mut cfg = taylor_green_config(None);
        cfg.initial = InitialData::Generator {
            spec: RandomFieldSpec {
                s: 2.0,
                tau0: 0.3,
                decay: 2.0,
                amplitude: 1e6,
            },
        };
        cfg.dt = 0.2;
        cfg.t_end = 1.0;
        cfg.blowup_factor = 1.5;
        match run_sweep(&cfg) {
            Err(Error::RunFailed { nu, status }) => {
                assert_eq!(nu, 0.0);
                assert!(!status.is_empty());
            }
            Err(Error::NonFinite { .. }) => {}
            Err(other) => panic!("expected a failed run, got {other:?}"),
            Ok(_) => panic!("expected a failed run, got a completed sweep"),
        }
    }
}
