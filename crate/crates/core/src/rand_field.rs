//! Seeded random divergence-free fields with prescribed Gevrey decay.
//!
//! Coefficients are drawn as complex Gaussians, shaped by the envelope
//! `σ(k) = e^{-τ0 |k|^{1/s}} |k|^{-ρ}`, Leray-projected, and rescaled to a
//! target ℓ² amplitude. Draws happen in `f64` in a fixed slot order
//! regardless of the output scalar type, so a seed identifies the same
//! field everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::field::{leray_project, SpectralVectorField};
use crate::lattice::{wavevec_len, TruncatedLattice};
use crate::scalar::Real;
use crate::Result;
use num_complex::Complex;

/// Envelope and normalization of one random draw.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RandomFieldSpec {
    /// Gevrey index `s` in the envelope exponent `|k|^{1/s}`.
    pub s: f64,
    /// Envelope radius `τ0`.
    pub tau0: f64,
    /// Algebraic decay exponent `ρ` (`|k|^{-ρ}`).
    pub decay: f64,
    /// Target ℓ² norm after projection.
    pub amplitude: f64,
}

impl RandomFieldSpec {
    fn validate(&self) -> Result<()> {
        if !(self.s >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gevrey index must satisfy s ≥ 1, got {}",
                self.s
            )));
        }
        if !(self.tau0 >= 0.0) || !(self.amplitude > 0.0) || !self.decay.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "random field spec out of range: tau0 = {}, amplitude = {}, decay = {}",
                self.tau0, self.amplitude, self.decay
            )));
        }
        Ok(())
    }
}

fn draw<T: Real>(
    lattice: TruncatedLattice,
    spec: &RandomFieldSpec,
    seed: u64,
) -> Result<SpectralVectorField<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = lattice.dim();
    let mut f = SpectralVectorField::zeros(lattice);
    for (slot, k) in lattice.iter_slots().skip(1) {
        let len = wavevec_len(k);
        let sigma = (-spec.tau0 * len.powf(1.0 / spec.s)).exp() * len.powf(-spec.decay);
        let coeffs = f.slot_mut(slot);
        for c in coeffs.iter_mut().take(dim) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *c = Complex::new(T::lit(sigma * re), T::lit(sigma * im));
        }
    }
    Ok(f)
}

fn normalized<T: Real>(
    mut f: SpectralVectorField<T>,
    amplitude: f64,
) -> Result<SpectralVectorField<T>> {
    let norm = f.l2_norm();
    if norm == T::zero() {
        return Err(Error::NonFinite {
            context: "random field projected to zero".to_string(),
        });
    }
    f.scale(T::lit(amplitude) / norm);
    Ok(f)
}

/// Draw the divergence-free field identified by `(lattice, spec, seed)`.
pub fn random_gevrey_field<T: Real>(
    lattice: TruncatedLattice,
    spec: &RandomFieldSpec,
    seed: u64,
) -> Result<SpectralVectorField<T>> {
    normalized(leray_project(&draw(lattice, spec, seed)?), spec.amplitude)
}

/// The same draw without the projection — deliberately compressible, for
/// negative controls that need the divergence-free hypothesis to fail.
pub fn random_gevrey_field_unprojected<T: Real>(
    lattice: TruncatedLattice,
    spec: &RandomFieldSpec,
    seed: u64,
) -> Result<SpectralVectorField<T>> {
    normalized(draw(lattice, spec, seed)?, spec.amplitude)
}
