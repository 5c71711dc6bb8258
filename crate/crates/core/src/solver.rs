//! Time integration of the truncated rotational Navier–Stokes system
//!
//! `∂_t û_k = -ν |k|² û_k + N(u)_k`,  `N(u) = -P[(u·∇)u]`,
//!
//! by fourth-order Runge–Kutta on the integrating-factor form: with
//! `E(θ) = e^{-ν|k|²θ}` the stiff viscous factor is solved exactly and
//! only the advection passes through the quadrature,
//!
//! `N₁ = N(uₙ)`
//! `N₂ = N(E(h/2)(uₙ + (h/2)N₁))`
//! `N₃ = N(E(h/2)uₙ + (h/2)N₂)`
//! `N₄ = N(E(h)uₙ + hE(h/2)N₃)`
//! `uₙ₊₁ = E(h)uₙ + (h/6)[E(h)N₁ + 2E(h/2)(N₂ + N₃) + N₄]`.
//!
//! With advection disabled every `Nᵢ` vanishes and the step reduces to the
//! exact heat propagator; at `ν = 0` it is the classical RK4 step. Each
//! step appends a [`NormSample`] so trajectories carry their full norm
//! history, including the cumulative dissipation integral
//! `ν ∫₀ᵗ ‖u‖²_{G_{r+1,τ(s)}} ds` (trapezoid on the step grid).

use serde::{Deserialize, Serialize};

use crate::advection::AdvectionEngine;
use crate::error::Error;
use crate::field::SpectralVectorField;
use crate::lattice::TruncatedLattice;
use crate::norms::{gevrey_norm, sobolev_norm};
use crate::radius::RadiusSchedule;
use crate::scalar::Real;
use crate::Result;

/// Norm bookkeeping parameters: the Sobolev/Gevrey order pair and the
/// radius schedule the Gevrey norms follow. A constant radius is the
/// degenerate schedule `c1 = c2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyTracking<T> {
    pub r: T,
    pub s: T,
    pub schedule: RadiusSchedule<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    pub nu: T,
    pub dt: T,
    pub t_end: T,
    /// Disable to integrate the pure heat flow (exact in this scheme).
    pub advection: bool,
    pub tracking: GevreyTracking<T>,
    /// Abort when `‖u‖_{H^r}` exceeds this multiple of its initial value.
    pub blowup_factor: T,
    /// Snapshot (and re-validate) the state every this many steps
    /// (0 = endpoints only).
    pub checkpoint_every: usize,
}

/// Norms of the state at one time node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample<T> {
    pub t: T,
    pub tau: T,
    pub l2: T,
    pub h_r: T,
    pub gevrey_r: T,
    pub gevrey_r_plus_1: T,
    /// `ν ∫₀ᵗ ‖u‖²_{G_{r+1,τ}} ds`, trapezoid-accumulated.
    pub dissipation_cum: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationStatus {
    Completed,
    /// The Sobolev guard tripped: the run is reported up to this time.
    BlowupGuard { t: f64, ratio: f64 },
    /// A non-finite coefficient appeared.
    NonFinite { t: f64 },
}

impl TerminationStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, TerminationStatus::Completed)
    }
}

/// A completed (or aborted) integration: per-step norms, validated
/// intermediate snapshots, the final state, and how the run ended.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord<T: Real> {
    pub samples: Vec<NormSample<T>>,
    /// `(t, state)` snapshots taken every `checkpoint_every` steps; each
    /// passed the full invariant validation when recorded.
    pub checkpoints: Vec<(T, SpectralVectorField<T>)>,
    pub final_field: SpectralVectorField<T>,
    pub status: TerminationStatus,
    pub steps_taken: usize,
}

impl<T: Real> TrajectoryRecord<T> {
    pub fn sup_h_r(&self) -> T {
        self.samples
            .iter()
            .fold(T::zero(), |m, s| m.max(s.h_r))
    }

    pub fn sup_gevrey_r(&self) -> T {
        self.samples
            .iter()
            .fold(T::zero(), |m, s| m.max(s.gevrey_r))
    }

    /// Final value of the cumulative dissipation integral.
    pub fn dissipation_total(&self) -> T {
        self.samples
            .last()
            .map(|s| s.dissipation_cum)
            .unwrap_or_else(T::zero)
    }
}

fn viscous_factors<T: Real>(lattice: &TruncatedLattice, nu: T, theta: T) -> Vec<T> {
    lattice
        .iter_slots()
        .map(|(_, k)| (-nu * T::lit(TruncatedLattice::norm_sq(k) as f64) * theta).exp())
        .collect()
}

fn scale_slots<T: Real>(f: &mut SpectralVectorField<T>, w: &[T]) {
    for (slot, &wk) in w.iter().enumerate() {
        for v in f.slot_mut(slot) {
            *v = v.scale(wk);
        }
    }
}

fn scaled<T: Real>(f: &SpectralVectorField<T>, w: &[T]) -> SpectralVectorField<T> {
    let mut out = f.clone();
    scale_slots(&mut out, w);
    out
}

struct Stepper<'a, T: Real> {
    engine: &'a mut AdvectionEngine<T>,
    advection: bool,
    e_half: Vec<T>,
    e_full: Vec<T>,
    h: T,
}

impl<'a, T: Real> Stepper<'a, T> {
    fn nonlinear(&mut self, u: &SpectralVectorField<T>) -> Result<SpectralVectorField<T>> {
        if self.advection {
            self.engine.nonlinear(u)
        } else {
            Ok(SpectralVectorField::zeros(*u.lattice()))
        }
    }

    fn step(&mut self, u: &SpectralVectorField<T>) -> Result<SpectralVectorField<T>> {
        let h = self.h;
        let half = T::lit(0.5) * h;
        let sixth = h / T::lit(6.0);

        let n1 = self.nonlinear(u)?;

        let mut stage = u.clone();
        stage.axpy(half, &n1);
        scale_slots(&mut stage, &self.e_half);
        let n2 = self.nonlinear(&stage)?;

        let mut stage = scaled(u, &self.e_half);
        stage.axpy(half, &n2);
        let n3 = self.nonlinear(&stage)?;

        let mut stage = scaled(u, &self.e_full);
        let n3_prop = scaled(&n3, &self.e_half);
        stage.axpy(h, &n3_prop);
        let n4 = self.nonlinear(&stage)?;

        // uₙ₊₁ = E(h)uₙ + (h/6)[E(h)N₁ + 2E(h/2)N₂ + 2E(h/2)N₃ + N₄]
        let mut next = scaled(u, &self.e_full);
        let n1_prop = scaled(&n1, &self.e_full);
        next.axpy(sixth, &n1_prop);
        let n2_prop = scaled(&n2, &self.e_half);
        next.axpy(T::lit(2.0) * sixth, &n2_prop);
        // n3_prop already carries E(h/2).
        next.axpy(T::lit(2.0) * sixth, &n3_prop);
        next.axpy(sixth, &n4);
        Ok(next)
    }
}

fn sample<T: Real>(
    u: &SpectralVectorField<T>,
    t: T,
    cfg: &SolverConfig<T>,
    prev: Option<&NormSample<T>>,
) -> NormSample<T> {
    let tr = &cfg.tracking;
    let tau = tr.schedule.tau(t);
    let g1 = gevrey_norm(u, tr.r + T::one(), tr.s, tau);
    let dissipation_cum = match prev {
        None => T::zero(),
        Some(p) => {
            let half = T::lit(0.5);
            p.dissipation_cum
                + cfg.nu * (t - p.t) * half * (p.gevrey_r_plus_1 * p.gevrey_r_plus_1 + g1 * g1)
        }
    };
    NormSample {
        t,
        tau,
        l2: u.l2_norm(),
        h_r: sobolev_norm(u, tr.r),
        gevrey_r: gevrey_norm(u, tr.r, tr.s, tau),
        gevrey_r_plus_1: g1,
        dissipation_cum,
    }
}

/// The full instantaneous right-hand side `-ν|k|²û - P[(u·∇)u]^`.
pub fn rhs<T: Real>(
    engine: &mut AdvectionEngine<T>,
    u: &SpectralVectorField<T>,
    nu: T,
) -> Result<SpectralVectorField<T>> {
    let mut out = engine.nonlinear(u)?;
    let lattice = *u.lattice();
    let dim = lattice.dim();
    for (slot, k) in lattice.iter_slots() {
        let damp = -nu * T::lit(TruncatedLattice::norm_sq(k) as f64);
        let coeffs = out.slot_mut(slot);
        let state = u.slot(slot);
        for c in 0..dim {
            coeffs[c] = coeffs[c] + state[c].scale(damp);
        }
    }
    Ok(out)
}

fn violation_error(context: &str, violations: &[crate::field::Violation]) -> Error {
    Error::InvalidConfig(format!(
        "{context}: {}",
        violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    ))
}

/// Integrate from `initial` to `t_end`. The initial field must satisfy the
/// divergence-free and zero-mean invariants; they are re-checked (and the
/// state snapshotted) every `checkpoint_every` steps and at the end.
pub fn integrate<T: Real>(
    cfg: &SolverConfig<T>,
    initial: &SpectralVectorField<T>,
) -> Result<TrajectoryRecord<T>> {
    if !(cfg.dt > T::zero()) || !(cfg.t_end > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "need dt > 0 and t_end > 0, got dt = {:e}, t_end = {:e}",
            cfg.dt, cfg.t_end
        )));
    }
    if cfg.nu < T::zero() {
        return Err(Error::InvalidConfig(format!("need ν ≥ 0, got {:e}", cfg.nu)));
    }
    let steps_f = (cfg.t_end / cfg.dt).to_f64().unwrap();
    let n_steps = steps_f.round() as usize;
    if n_steps == 0 || (steps_f - n_steps as f64).abs() > 1e-9 * steps_f.max(1.0) {
        return Err(Error::InvalidConfig(format!(
            "t_end = {:e} is not an integer multiple of dt = {:e}",
            cfg.t_end, cfg.dt
        )));
    }

    let violations = initial.validate(true);
    if !violations.is_empty() {
        return Err(violation_error("initial field", &violations));
    }

    let lattice = *initial.lattice();
    let mut engine = AdvectionEngine::new(lattice)?;
    let half = T::lit(0.5);
    let mut stepper = Stepper {
        engine: &mut engine,
        advection: cfg.advection,
        e_half: viscous_factors(&lattice, cfg.nu, half * cfg.dt),
        e_full: viscous_factors(&lattice, cfg.nu, cfg.dt),
        h: cfg.dt,
    };

    let mut u = initial.clone();
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(sample(&u, T::zero(), cfg, None));
    let h_r0 = samples[0].h_r;
    let mut checkpoints = Vec::new();

    let mut status = TerminationStatus::Completed;
    let mut steps_taken = 0usize;
    for step_idx in 1..=n_steps {
        u = stepper.step(&u)?;
        steps_taken = step_idx;
        let t = cfg.dt * T::lit(step_idx as f64);

        if !u.is_finite() {
            status = TerminationStatus::NonFinite {
                t: t.to_f64().unwrap(),
            };
            break;
        }
        let s = sample(&u, t, cfg, samples.last());
        let ratio = s.h_r / h_r0;
        samples.push(s);
        if ratio > cfg.blowup_factor {
            status = TerminationStatus::BlowupGuard {
                t: t.to_f64().unwrap(),
                ratio: ratio.to_f64().unwrap(),
            };
            break;
        }
        if cfg.checkpoint_every != 0 && step_idx % cfg.checkpoint_every == 0 {
            let violations = u.validate(true);
            if !violations.is_empty() {
                return Err(violation_error(&format!("state at step {step_idx}"), &violations));
            }
            checkpoints.push((t, u.clone()));
        }
    }

    if status.is_completed() {
        let violations = u.validate(true);
        if !violations.is_empty() {
            return Err(violation_error("final field", &violations));
        }
    }

    Ok(TrajectoryRecord {
        samples,
        checkpoints,
        final_field: u,
        status,
        steps_taken,
    })
}
