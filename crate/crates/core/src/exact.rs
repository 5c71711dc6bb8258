//! Closed-form viscous flows used as integration references.
//!
//! Both families share the property that the nonlinear term is a pure
//! gradient, so the Leray-projected dynamics reduce to the heat flow and
//! every Fourier coefficient decays by an explicit exponential factor:
//!
//! * `taylor_green_2d`: `u = e^{-2νt} (cos x₁ sin x₂, -sin x₁ cos x₂)`,
//!   pressure `p = -e^{-4νt} (cos 2x₁ + cos 2x₂)/4`.
//! * `beltrami_3d`, the unit-coefficient ABC flow: a curl eigenfield
//!   (`∇×u = u`), `u = e^{-νt} u₀`, pressure
//!   `p = -e^{-2νt} (sin x₃ cos x₂ + sin x₁ cos x₃ + sin x₂ cos x₁)`.

use num_complex::Complex;

use crate::error::Error;
use crate::field::{SpectralScalarField, SpectralVectorField};
use crate::lattice::TruncatedLattice;
use crate::scalar::Real;
use crate::Result;

/// The reference flows by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactSolution {
    TaylorGreen2d,
    Beltrami3d,
}

impl ExactSolution {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "taylor_green_2d" => Ok(Self::TaylorGreen2d),
            "beltrami_3d" => Ok(Self::Beltrami3d),
            other => Err(Error::UnknownExactSolution(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::TaylorGreen2d => "taylor_green_2d",
            Self::Beltrami3d => "beltrami_3d",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::TaylorGreen2d => 2,
            Self::Beltrami3d => 3,
        }
    }

    /// Exponent `λ` in the velocity decay `u(t) = e^{-λνt} u(0)`.
    pub fn velocity_decay_rate(&self) -> f64 {
        match self {
            Self::TaylorGreen2d => 2.0,
            Self::Beltrami3d => 1.0,
        }
    }

    fn check_lattice(&self, lattice: &TruncatedLattice, required: i32) -> Result<()> {
        if lattice.dim() != self.dim() {
            return Err(Error::InvalidConfig(format!(
                "{} is a {}-d flow; got a {}-d lattice",
                self.name(),
                self.dim(),
                lattice.dim()
            )));
        }
        if lattice.cutoff() < required {
            return Err(Error::LatticeTooCoarse {
                name: self.name(),
                required,
                n: lattice.cutoff(),
            });
        }
        Ok(())
    }

    pub fn velocity<T: Real>(
        &self,
        lattice: TruncatedLattice,
        nu: T,
        t: T,
    ) -> Result<SpectralVectorField<T>> {
        self.check_lattice(&lattice, 1)?;
        Ok(match self {
            Self::TaylorGreen2d => taylor_green_velocity(lattice, nu, t),
            Self::Beltrami3d => beltrami_velocity(lattice, nu, t),
        })
    }

    /// The pressure needs the second shell (`N ≥ 2`) in the Taylor–Green
    /// case.
    pub fn pressure<T: Real>(
        &self,
        lattice: TruncatedLattice,
        nu: T,
        t: T,
    ) -> Result<SpectralScalarField<T>> {
        let required = match self {
            Self::TaylorGreen2d => 2,
            Self::Beltrami3d => 2,
        };
        self.check_lattice(&lattice, required)?;
        Ok(match self {
            Self::TaylorGreen2d => taylor_green_pressure(lattice, nu, t),
            Self::Beltrami3d => beltrami_pressure(lattice, nu, t),
        })
    }
}

/// `e^{-2νt} (cos x₁ sin x₂, -sin x₁ cos x₂)` on a 2-d lattice.
pub fn taylor_green_velocity<T: Real>(
    lattice: TruncatedLattice,
    nu: T,
    t: T,
) -> SpectralVectorField<T> {
    assert_eq!(lattice.dim(), 2);
    let decay = (-T::lit(2.0) * nu * t).exp();
    let q = T::lit(0.25) * decay;
    let zero = Complex::new(T::zero(), T::zero());
    let mut f = SpectralVectorField::zeros(lattice);
    // cos x₁ sin x₂ = Σ ∓(i/4) e^{i(±x₁+x₂)} + c.c.;
    // -sin x₁ cos x₂ contributes ±i/4 with the sign of the x₁ index.
    f.set_coeff([1, 1, 0], [Complex::new(T::zero(), -q), Complex::new(T::zero(), q), zero]);
    f.set_coeff([1, -1, 0], [Complex::new(T::zero(), q), Complex::new(T::zero(), q), zero]);
    f
}

/// `-e^{-4νt} (cos 2x₁ + cos 2x₂)/4`.
pub fn taylor_green_pressure<T: Real>(
    lattice: TruncatedLattice,
    nu: T,
    t: T,
) -> SpectralScalarField<T> {
    assert_eq!(lattice.dim(), 2);
    let decay = (-T::lit(4.0) * nu * t).exp();
    let q = Complex::new(-T::lit(0.125) * decay, T::zero());
    let mut p = SpectralScalarField::zeros(lattice);
    p.set_coeff([2, 0, 0], q);
    p.set_coeff([0, 2, 0], q);
    p
}

/// `e^{-νt} (sin x₃ + cos x₂, sin x₁ + cos x₃, sin x₂ + cos x₁)`.
pub fn beltrami_velocity<T: Real>(lattice: TruncatedLattice, nu: T, t: T) -> SpectralVectorField<T> {
    assert_eq!(lattice.dim(), 3);
    let decay = (-nu * t).exp();
    let h = T::lit(0.5) * decay;
    let sin = Complex::new(T::zero(), -h); // coefficient of sin at +k
    let cos = Complex::new(h, T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let mut f = SpectralVectorField::zeros(lattice);
    // u₁ = sin x₃ + cos x₂
    f.set_coeff([0, 0, 1], [sin, cos, zero]);
    f.set_coeff([0, 1, 0], [cos, zero, sin]);
    f.set_coeff([1, 0, 0], [zero, sin, cos]);
    f
}

/// `-e^{-2νt} (sin x₃ cos x₂ + sin x₁ cos x₃ + sin x₂ cos x₁)`.
pub fn beltrami_pressure<T: Real>(lattice: TruncatedLattice, nu: T, t: T) -> SpectralScalarField<T> {
    assert_eq!(lattice.dim(), 3);
    let decay = (-T::lit(2.0) * nu * t).exp();
    let q = T::lit(0.25) * decay;
    // -sin a cos b has coefficients +i/4 e^{i(a+b)} and +i/4 e^{i(a-b)}
    // in the (a, b) index pair.
    let c = Complex::new(T::zero(), q);
    let mut p = SpectralScalarField::zeros(lattice);
    // -sin x₃ cos x₂ → (0, ±1, 1)
    p.set_coeff([0, 1, 1], c);
    p.set_coeff([0, -1, 1], c);
    // -sin x₁ cos x₃ → (1, 0, ±1)
    p.set_coeff([1, 0, 1], c);
    p.set_coeff([1, 0, -1], c);
    // -sin x₂ cos x₁ → (±1, 1, 0)
    p.set_coeff([1, 1, 0], c);
    p.set_coeff([-1, 1, 0], c);
    p
}
