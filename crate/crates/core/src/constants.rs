//! A priori constants for the shrinking-radius argument.
//!
//! The radius schedule that keeps `t ↦ ‖u(t)‖_{G_{r,τ(t)}}` under control
//! needs three numbers from (or about) the reference trajectory:
//!
//! * `C_T = sup_{[0,T]} ‖u(t)‖_{H^r}`,
//! * `G_T = sup_{[0,T]} ‖u(t)‖_{G_{r,τ(t)}}`,
//! * `M_T = ν ∫₀ᵀ ‖u‖²_{G_{r+1,τ}} dt`, the dissipation budget.
//!
//! They can be configured up front or measured from a pilot run; the
//! provenance is recorded so downstream reports can say which. Together
//! with a bookkeeping constant `C` they induce the matched schedule
//! `τ' = -C·C_T·τ - C·(C_T + G_T)·τ²` and the growth bound
//! `‖u(t)‖_{G} ≤ e^{C·C_T·t} (‖u(0)‖_G + C‖u(0)‖²_{H^r} t)`.

use serde::{Deserialize, Serialize};

use crate::radius::RadiusSchedule;
use crate::scalar::Real;
use crate::solver::TrajectoryRecord;

/// Where a set of constants came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Supplied in the configuration, not backed by a run.
    Configured,
    /// Measured from a pilot trajectory; the hash identifies the run
    /// manifest the measurement belongs to.
    Measured { manifest_hash: String },
}

/// The trajectory-level constants entering the radius schedule and the
/// growth bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriConstants<T> {
    /// Supremum of the Sobolev norm over the time window.
    pub c_t: T,
    /// Supremum of the tracked Gevrey norm over the time window.
    pub g_t: T,
    /// Cumulative dissipation over the window.
    pub m_t: T,
    pub provenance: Provenance,
}

impl<T: Real> AprioriConstants<T> {
    /// The matched schedule `τ' = -c·c_t·τ - c·(c_t + g_t)·τ²`.
    pub fn schedule(&self, tau0: T, c: T) -> crate::Result<RadiusSchedule<T>> {
        RadiusSchedule::matched(tau0, c, self.c_t, self.g_t)
    }
}

/// Read the constants off a finished trajectory.
pub fn measure_constants<T: Real>(
    record: &TrajectoryRecord<T>,
    manifest_hash: &str,
) -> AprioriConstants<T> {
    AprioriConstants {
        c_t: record.sup_h_r(),
        g_t: record.sup_gevrey_r(),
        m_t: record.dissipation_total(),
        provenance: Provenance::Measured {
            manifest_hash: manifest_hash.to_string(),
        },
    }
}

/// `e^{c·c_t·t} (gevrey0 + c·hr0²·t)`: the a priori ceiling on the Gevrey
/// norm along the matched schedule, in terms of the initial norms.
pub fn growth_bound<T: Real>(t: T, c: T, c_t: T, gevrey0: T, hr0: T) -> T {
    (c * c_t * t).exp() * (gevrey0 + c * hr0 * hr0 * t)
}
