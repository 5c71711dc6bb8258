//! Analyticity-radius schedule.
//!
//! The Gevrey radius `τ(t)` is driven by the a priori ODE
//!
//! `τ' = -C·C_T·τ - C·(C_T + G_T)·τ²`,
//!
//! whose solution with `τ(0) = τ0` is available in closed form: writing
//! `C₁ = C·C_T` and `C₂ = C·(C_T + G_T)`, the reciprocal `y = 1/τ`
//! satisfies `y' = C₁ y + C₂`, so
//!
//! `τ(t) = 1 / ( e^{C₁ t}/τ0 + (C₂/C₁)(e^{C₁ t} - 1) )`,
//!
//! degenerating to `τ(t) = 1/(1/τ0 + C₂ t)` when `C₁ = 0`. Evaluating the
//! closed form instead of integrating numerically makes the schedule's
//! ODE residual a pure round-off quantity, which the certification in
//! [`crate::certify`] exploits.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSchedule<T> {
    pub tau0: T,
    pub c1: T,
    pub c2: T,
}

impl<T: Real> RadiusSchedule<T> {
    pub fn new(tau0: T, c1: T, c2: T) -> Result<Self> {
        if !(tau0 > T::zero()) || !tau0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "radius schedule needs tau0 > 0, got {tau0:e}"
            )));
        }
        if c1 < T::zero() || c2 < T::zero() || !c1.is_finite() || !c2.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "radius schedule needs c1, c2 ≥ 0, got c1 = {c1:e}, c2 = {c2:e}"
            )));
        }
        Ok(Self { tau0, c1, c2 })
    }

    /// Schedule matching the a priori coefficients: `c1 = c·c_t`,
    /// `c2 = c·(c_t + g_t)`.
    pub fn matched(tau0: T, c: T, c_t: T, g_t: T) -> Result<Self> {
        Self::new(tau0, c * c_t, c * (c_t + g_t))
    }

    /// `1/τ(t)` — finite for all `t ≥ 0`. `exp_m1` keeps the `C₂` term
    /// accurate as `C₁ → 0`, where `e^{C₁t} - 1` would cancel.
    fn reciprocal(&self, t: T) -> T {
        if self.c1 == T::zero() {
            T::one() / self.tau0 + self.c2 * t
        } else {
            (self.c1 * t).exp() / self.tau0 + self.c2 / self.c1 * (self.c1 * t).exp_m1()
        }
    }

    pub fn tau(&self, t: T) -> T {
        T::one() / self.reciprocal(t)
    }

    /// Derivative from the defining ODE (exact for the closed form).
    pub fn tau_prime(&self, t: T) -> T {
        let tau = self.tau(t);
        -self.c1 * tau - self.c2 * tau * tau
    }

    /// Residual of the target ODE with coefficients `(c, c_t, g_t)`:
    /// `τ'(t) + c·c_t·τ + c·(c_t + g_t)·τ²`. Zero to round-off when the
    /// schedule is [`matched`](Self::matched) to the same coefficients.
    pub fn ode_residual(&self, t: T, c: T, c_t: T, g_t: T) -> T {
        let tau = self.tau(t);
        self.tau_prime(t) + c * c_t * tau + c * (c_t + g_t) * tau * tau
    }
}
