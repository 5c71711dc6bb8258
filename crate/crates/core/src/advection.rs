//! The advection transform `(u·∇)v` on the truncated lattice.
//!
//! Two implementations of the same bilinear map:
//!
//! * [`advect_exact`] — the literal convolution
//!   `[(u·∇)v]^_k = i Σ_j (û_j · (k-j)) v̂_{k-j}`, quadratic in the number
//!   of modes. Slow, with no machinery between it and the formula; it
//!   serves as the reference the fast path is tested against.
//! * [`AdvectionEngine::advect`] — pseudo-spectral evaluation: synthesize
//!   `u` and the gradient components of `v` on a grid of size
//!   `M ≥ 3N + 1`, multiply pointwise, analyze back. At that grid size the
//!   quadratic products alias nowhere inside the lattice, so the two paths
//!   agree to round-off, not merely to truncation order.

use ndarray::ArrayD;
use num_complex::Complex;

use crate::error::Error;
use crate::field::{leray_project, SpectralVectorField};
use crate::lattice::TruncatedLattice;
use crate::scalar::Real;
use crate::transform::{dealias_grid_size, SpectralTransformer};
use crate::Result;

fn check_same_lattice<T: Real>(
    u: &SpectralVectorField<T>,
    v: &SpectralVectorField<T>,
) -> Result<()> {
    if u.lattice() != v.lattice() {
        return Err(Error::LatticeMismatch {
            expected_dim: u.lattice().dim(),
            expected_n: u.lattice().cutoff(),
            dim: v.lattice().dim(),
            n: v.lattice().cutoff(),
        });
    }
    Ok(())
}

/// Direct convolution evaluation of `(u·∇)v`, truncated to the lattice.
pub fn advect_exact<T: Real>(
    u: &SpectralVectorField<T>,
    v: &SpectralVectorField<T>,
) -> Result<SpectralVectorField<T>> {
    check_same_lattice(u, v)?;
    let lattice = *u.lattice();
    let dim = lattice.dim();
    let mut out = SpectralVectorField::zeros(lattice);
    for (slot, k) in lattice.iter_slots() {
        let mut acc = [Complex::new(T::zero(), T::zero()); 3];
        for j in lattice.iter_box() {
            let m = [k[0] - j[0], k[1] - j[1], k[2] - j[2]];
            if !lattice.contains(m) {
                continue;
            }
            let uj = u.coeff(j);
            let mut dot = Complex::new(T::zero(), T::zero());
            for c in 0..dim {
                dot = dot + uj[c].scale(T::lit(m[c] as f64));
            }
            if dot.re == T::zero() && dot.im == T::zero() {
                continue;
            }
            let vm = v.coeff(m);
            for c in 0..dim {
                acc[c] = acc[c] + dot * vm[c];
            }
        }
        // The i factor of the derivative symbol.
        let i = Complex::new(T::zero(), T::one());
        let coeffs = out.slot_mut(slot);
        for c in 0..dim {
            coeffs[c] = i * acc[c];
        }
    }
    Ok(out)
}

/// Reusable pseudo-spectral advection: FFT plans and grid buffers for one
/// lattice, de-aliased by construction.
pub struct AdvectionEngine<T: Real> {
    transformer: SpectralTransformer<T>,
}

impl<T: Real> AdvectionEngine<T> {
    pub fn new(lattice: TruncatedLattice) -> Result<Self> {
        let m = dealias_grid_size(&lattice);
        Ok(Self {
            transformer: SpectralTransformer::new(lattice, m)?,
        })
    }

    pub fn lattice(&self) -> &TruncatedLattice {
        self.transformer.lattice()
    }

    pub fn grid_size(&self) -> usize {
        self.transformer.grid_size()
    }

    /// `(u·∇)v` via grid products; agrees with [`advect_exact`] to
    /// round-off.
    pub fn advect(
        &mut self,
        u: &SpectralVectorField<T>,
        v: &SpectralVectorField<T>,
    ) -> Result<SpectralVectorField<T>> {
        check_same_lattice(u, v)?;
        let lattice = *self.transformer.lattice();
        let dim = lattice.dim();
        let u_grids = self.transformer.synthesize(u);
        let mut out = SpectralVectorField::zeros(lattice);
        for j in 0..dim {
            let mut product: Option<ArrayD<Complex<T>>> = None;
            for c in 0..dim {
                // ∂_c v_j has symbol i k_c.
                let deriv = self.transformer.synthesize_modes(|k| {
                    v.coeff(k)[j] * Complex::new(T::zero(), T::lit(k[c] as f64))
                });
                match &mut product {
                    None => {
                        let mut p = deriv;
                        for (d, s) in p.iter_mut().zip(u_grids[c].iter()) {
                            *d = *d * *s;
                        }
                        product = Some(p);
                    }
                    Some(p) => {
                        for ((d, s), g) in p.iter_mut().zip(deriv.iter()).zip(u_grids[c].iter()) {
                            *d = *d + *s * *g;
                        }
                    }
                }
            }
            self.transformer
                .analyze_into(product.expect("dim ≥ 2"), &mut out, j);
        }
        Ok(out)
    }

    /// The Euler/Navier–Stokes nonlinearity `-P[(u·∇)u]`: advection of `u`
    /// by itself, Leray-projected and negated. The mean mode is cleared —
    /// it vanishes analytically for divergence-free `u`, and zeroing it
    /// keeps round-off from drifting into the constant mode over long
    /// integrations.
    pub fn nonlinear(&mut self, u: &SpectralVectorField<T>) -> Result<SpectralVectorField<T>> {
        let mut n = leray_project(&self.advect(u, u)?);
        n.scale(-T::one());
        n.clear_mean();
        Ok(n)
    }
}
