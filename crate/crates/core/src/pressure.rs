//! Spectral pressure recovery.
//!
//! On the torus the pressure is slaved to the velocity: taking the
//! divergence of the momentum equation leaves `-Δp = ∇·[(u·∇)u]`, which
//! inverts mode by mode to
//!
//! `p̂_k = i k·â_k / |k|²`,  `â = [(u·∇)u]^`,  `p̂_0 = 0`.
//!
//! Viscosity never enters: the diffusion term is divergence-free. The
//! inversion is exact on the lattice, so `Δp + ∇·[(u·∇)u] = 0` holds to
//! round-off, and the recovered pressure inherits quadratic scaling in `u`.

use num_complex::Complex;

use crate::advection::{advect_exact, AdvectionEngine};
use crate::field::{SpectralScalarField, SpectralVectorField};
use crate::lattice::TruncatedLattice;
use crate::norms::GevreyParams;
use crate::scalar::Real;
use crate::Result;

/// Invert `-Δp = ∇·a` for mean-zero `p` given `a = [(u·∇)u]^`.
fn pressure_from_advection<T: Real>(a: &SpectralVectorField<T>) -> SpectralScalarField<T> {
    let lattice = *a.lattice();
    let dim = lattice.dim();
    let mut p = SpectralScalarField::zeros(lattice);
    for (slot, k) in lattice.iter_slots().skip(1) {
        let coeffs = a.slot(slot);
        let mut kdot = Complex::new(T::zero(), T::zero());
        for c in 0..dim {
            kdot = kdot + coeffs[c].scale(T::lit(k[c] as f64));
        }
        let inv_nsq = T::one() / T::lit(TruncatedLattice::norm_sq(k) as f64);
        // i (k·â) / |k|²
        *p.slot_mut(slot) = Complex::new(T::zero(), T::one()) * kdot.scale(inv_nsq);
    }
    p
}

/// Pressure of the state `u` via the pseudo-spectral advection path.
pub fn recover_pressure<T: Real>(
    engine: &mut AdvectionEngine<T>,
    u: &SpectralVectorField<T>,
) -> Result<SpectralScalarField<T>> {
    Ok(pressure_from_advection(&engine.advect(u, u)?))
}

/// Pressure of the state `u` via the direct convolution; the reference the
/// fast path is tested against.
pub fn recover_pressure_exact<T: Real>(
    u: &SpectralVectorField<T>,
) -> Result<SpectralScalarField<T>> {
    Ok(pressure_from_advection(&advect_exact(u, u)?))
}

/// The quadratic-bound ratio `‖p‖_{G_{r+1,τ}} / ‖u‖²_{G_{r,τ}}`, with the
/// convention `0` for the zero state. Finiteness of the ratio across an
/// ensemble is what the pressure estimate asserts.
pub fn pressure_bound_check<T: Real>(
    u: &SpectralVectorField<T>,
    p: &SpectralScalarField<T>,
    params: &GevreyParams<T>,
) -> Result<T> {
    let u_norm = params.norm(u)?;
    if u_norm == T::zero() {
        return Ok(T::zero());
    }
    let raised = GevreyParams::new(params.s, params.r + T::one(), params.tau)?;
    Ok(raised.norm_scalar(p)? / (u_norm * u_norm))
}
