//! Spectral fields on a truncated lattice.
//!
//! A velocity field is represented by the Fourier coefficients
//! `û_k ∈ ℂ^d` of `u(x) = Σ_k û_k e^{i k·x}`. Real-valued fields satisfy
//! the Hermitian symmetry `û_{-k} = conj(û_k)`, so only the zero mode and
//! one representative of each `{k, -k}` pair are stored; the other half is
//! derived on read. Writing through [`SpectralVectorField::set_coeff`]
//! conjugates into the stored half, which makes Hermitian symmetry a
//! structural invariant for every nonzero mode. The remaining invariants —
//! a real zero mode, zero mean, and (where expected) `k·û_k = 0` — are
//! runtime checks surfaced by [`SpectralVectorField::validate`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lattice::{wavevec_len, TruncatedLattice, WaveVec};
use crate::scalar::Real;
use crate::Result;

/// Relative tolerance for the runtime invariants. Divergence is checked
/// mode by mode (`|k·û_k| ≤ tol·|û_k|·|k|`); the zero-mode checks scale
/// with the field's ℓ² norm.
pub const VALIDATE_TOL: f64 = 1e-12;

/// A single invariant violation, naming the offending mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    /// `û_0 ≠ 0`.
    ZeroMean { k: WaveVec, magnitude: f64 },
    /// Self-conjugate mode with an imaginary part (only `k = 0` can
    /// violate this under half-lattice storage).
    Hermitian { k: WaveVec, magnitude: f64 },
    /// `k·û_k ≠ 0` on a field expected to be divergence-free.
    Divergence { k: WaveVec, magnitude: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ZeroMean { k, magnitude } => {
                write!(f, "zero-mean violated at k = {k:?} (|û_0| = {magnitude:.3e})")
            }
            Violation::Hermitian { k, magnitude } => {
                write!(f, "hermitian symmetry violated at k = {k:?} (|Im| = {magnitude:.3e})")
            }
            Violation::Divergence { k, magnitude } => {
                write!(f, "divergence-free violated at k = {k:?} (|k·û| = {magnitude:.3e})")
            }
        }
    }
}

/// Spectral velocity field with `dim` components per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField<T: Real> {
    lattice: TruncatedLattice,
    /// Slot-major storage: `data[slot * dim + c]`.
    data: Vec<Complex<T>>,
}

impl<T: Real> SpectralVectorField<T> {
    pub fn zeros(lattice: TruncatedLattice) -> Self {
        let len = lattice.half_len() * lattice.dim();
        Self {
            lattice,
            data: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    pub fn lattice(&self) -> &TruncatedLattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Coefficient vector at `k`, padded with zeros to three components.
    /// Modes outside the lattice read as zero; the derived half is
    /// conjugated on the fly.
    #[inline]
    pub fn coeff(&self, k: WaveVec) -> [Complex<T>; 3] {
        let mut out = [Complex::new(T::zero(), T::zero()); 3];
        if let Some(off) = self.lattice.offset(k) {
            let dim = self.dim();
            if off >= 0 {
                let base = off as usize * dim;
                for c in 0..dim {
                    out[c] = self.data[base + c];
                }
            } else {
                let base = (-off) as usize * dim;
                for c in 0..dim {
                    out[c] = self.data[base + c].conj();
                }
            }
        }
        out
    }

    /// Assign the coefficient vector at `k`; components at and beyond
    /// `dim` are ignored. Assigning at a derived-half mode stores the
    /// conjugate, so `û_{-k} = conj(û_k)` holds by construction.
    pub fn set_coeff(&mut self, k: WaveVec, v: [Complex<T>; 3]) {
        let off = self
            .lattice
            .offset(k)
            .expect("set_coeff: wave vector outside lattice");
        let dim = self.dim();
        if off >= 0 {
            let base = off as usize * dim;
            for c in 0..dim {
                self.data[base + c] = v[c];
            }
        } else {
            let base = (-off) as usize * dim;
            for c in 0..dim {
                self.data[base + c] = v[c].conj();
            }
        }
    }

    /// Stored coefficients of one slot (see [`TruncatedLattice::iter_slots`]).
    #[inline]
    pub fn slot(&self, slot: usize) -> &[Complex<T>] {
        let dim = self.dim();
        &self.data[slot * dim..(slot + 1) * dim]
    }

    /// Mutable coefficients of one stored slot.
    #[inline]
    pub fn slot_mut(&mut self, slot: usize) -> &mut [Complex<T>] {
        let dim = self.dim();
        &mut self.data[slot * dim..(slot + 1) * dim]
    }

    /// Σ_c |û_c(k)|² for one stored slot.
    #[inline]
    pub(crate) fn slot_energy(&self, slot: usize) -> T {
        self.slot(slot)
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// ℓ² norm of the coefficient sequence over the full lattice,
    /// `sqrt(Σ_k |û_k|²)`, summed in slot order with the derived half
    /// folded in by symmetry.
    pub fn l2_norm(&self) -> T {
        let two = T::lit(2.0);
        let mut sum = self.slot_energy(0);
        for slot in 1..self.lattice.half_len() {
            sum = sum + two * self.slot_energy(slot);
        }
        sum.sqrt()
    }

    /// Check the runtime invariants. Hermitian symmetry away from `k = 0`
    /// holds structurally; the zero mode is checked for reality and for
    /// zero mean, and `check_divergence` additionally tests `k·û_k = 0`.
    /// Thresholds scale with the field's ℓ² norm ([`VALIDATE_TOL`]).
    pub fn validate(&self, check_divergence: bool) -> Vec<Violation> {
        let mut out = Vec::new();
        let scale = self.l2_norm().to_f64().unwrap_or(f64::INFINITY);
        let tol = VALIDATE_TOL * scale;

        let mean = self.slot(0);
        let mean_mag = mean
            .iter()
            .fold(T::zero(), |a, c| a + c.norm_sqr())
            .sqrt()
            .to_f64()
            .unwrap_or(f64::INFINITY);
        let mean_im = mean
            .iter()
            .fold(T::zero(), |a, c| a + c.im * c.im)
            .sqrt()
            .to_f64()
            .unwrap_or(f64::INFINITY);
        if mean_im > tol {
            out.push(Violation::Hermitian {
                k: [0, 0, 0],
                magnitude: mean_im,
            });
        }
        if mean_mag > tol {
            out.push(Violation::ZeroMean {
                k: [0, 0, 0],
                magnitude: mean_mag,
            });
        }

        if check_divergence {
            // |k·û_k| ≤ tol·|û_k|·|k| per mode. The comparison magnitude is
            // floored at the field's ℓ² norm so that modes which are
            // analytically zero but hold round-off junk (e.g. after
            // projecting out a pure gradient) do not register as
            // violations at machine scale.
            for (slot, k) in self.lattice.iter_slots().skip(1) {
                let coeffs = self.slot(slot);
                let mut div = Complex::new(T::zero(), T::zero());
                let mut energy = T::zero();
                for (c, coeff) in coeffs.iter().enumerate() {
                    div = div + coeff.scale(T::lit(k[c] as f64));
                    energy = energy + coeff.norm_sqr();
                }
                let mag = div.norm().to_f64().unwrap_or(f64::INFINITY);
                let k_len = (TruncatedLattice::norm_sq(k) as f64).sqrt();
                let mode_mag = energy.sqrt().to_f64().unwrap_or(f64::INFINITY);
                if mag > VALIDATE_TOL * k_len * mode_mag.max(scale) {
                    out.push(Violation::Divergence { k, magnitude: mag });
                }
            }
        }
        out
    }

    /// Discard any mean accumulated by round-off (e.g. after a gather from
    /// a product grid); the advection of a divergence-free field has none
    /// analytically.
    pub(crate) fn clear_mean(&mut self) {
        for c in self.slot_mut(0) {
            *c = Complex::new(T::zero(), T::zero());
        }
    }

    /// In-place `self += a * x`.
    pub fn axpy(&mut self, a: T, x: &Self) {
        debug_assert_eq!(self.lattice, x.lattice);
        for (d, s) in self.data.iter_mut().zip(x.data.iter()) {
            *d = *d + s.scale(a);
        }
    }

    /// In-place scalar multiplication.
    pub fn scale(&mut self, a: T) {
        for d in &mut self.data {
            *d = d.scale(a);
        }
    }

    /// `self - other`, requiring identical lattices (used to form the
    /// viscous-inviscid difference `w = u^ν - u`).
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch {
                expected_dim: self.lattice.dim(),
                expected_n: self.lattice.cutoff(),
                dim: other.lattice.dim(),
                n: other.lattice.cutoff(),
            });
        }
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        Ok(out)
    }

    /// Largest coefficient magnitude (diagnostic).
    pub fn max_coeff(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, c| m.max(c.norm_sqr()))
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Spectral scalar field (pressure, stream-function style diagnostics).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalarField<T: Real> {
    lattice: TruncatedLattice,
    data: Vec<Complex<T>>,
}

impl<T: Real> SpectralScalarField<T> {
    pub fn zeros(lattice: TruncatedLattice) -> Self {
        Self {
            lattice,
            data: vec![Complex::new(T::zero(), T::zero()); lattice.half_len()],
        }
    }

    pub fn lattice(&self) -> &TruncatedLattice {
        &self.lattice
    }

    #[inline]
    pub fn coeff(&self, k: WaveVec) -> Complex<T> {
        match self.lattice.offset(k) {
            Some(off) if off >= 0 => self.data[off as usize],
            Some(off) => self.data[(-off) as usize].conj(),
            None => Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn set_coeff(&mut self, k: WaveVec, v: Complex<T>) {
        let off = self
            .lattice
            .offset(k)
            .expect("set_coeff: wave vector outside lattice");
        if off >= 0 {
            self.data[off as usize] = v;
        } else {
            self.data[(-off) as usize] = v.conj();
        }
    }

    #[inline]
    pub fn slot(&self, slot: usize) -> Complex<T> {
        self.data[slot]
    }

    #[inline]
    pub fn slot_mut(&mut self, slot: usize) -> &mut Complex<T> {
        &mut self.data[slot]
    }

    #[inline]
    pub(crate) fn slot_energy(&self, slot: usize) -> T {
        self.data[slot].norm_sqr()
    }

    pub fn l2_norm(&self) -> T {
        let two = T::lit(2.0);
        let mut sum = self.slot_energy(0);
        for slot in 1..self.lattice.half_len() {
            sum = sum + two * self.slot_energy(slot);
        }
        sum.sqrt()
    }

    pub fn scale(&mut self, a: T) {
        for v in &mut self.data {
            *v = v.scale(a);
        }
    }

    pub fn max_coeff(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch {
                expected_dim: self.lattice.dim(),
                expected_n: self.lattice.cutoff(),
                dim: other.lattice.dim(),
                n: other.lattice.cutoff(),
            });
        }
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(other.data.iter()) {
            *d = *d - *s;
        }
        Ok(out)
    }
}

/// Remove the non-solenoidal part mode by mode:
/// `û_k ← û_k - k (k·û_k) / |k|²`. The zero mode is untouched. The result
/// is the L²-orthogonal projection onto divergence-free fields restricted
/// to the lattice.
pub fn leray_project<T: Real>(f: &SpectralVectorField<T>) -> SpectralVectorField<T> {
    let mut out = f.clone();
    let lattice = *out.lattice();
    for (slot, k) in lattice.iter_slots().skip(1) {
        let inv_nsq = T::one() / T::lit(TruncatedLattice::norm_sq(k) as f64);
        let coeffs = out.slot_mut(slot);
        let mut kdot = Complex::new(T::zero(), T::zero());
        for (c, v) in coeffs.iter().enumerate() {
            kdot = kdot + v.scale(T::lit(k[c] as f64));
        }
        let factor = kdot.scale(inv_nsq);
        for (c, v) in coeffs.iter_mut().enumerate() {
            *v = *v - factor.scale(T::lit(k[c] as f64));
        }
    }
    out
}

/// Apply a real Fourier multiplier `m(k)`: `û_k ← m(k) û_k`. `m` must be
/// even in `k` for the result to stay Hermitian; all multipliers in this
/// crate depend on `k` through `|k|` only. Non-finite multiplier values are
/// reported rather than propagated.
pub fn apply_multiplier<T: Real>(
    f: &SpectralVectorField<T>,
    m: impl Fn(WaveVec) -> T,
) -> Result<SpectralVectorField<T>> {
    let mut out = f.clone();
    let lattice = *out.lattice();
    for (slot, k) in lattice.iter_slots() {
        let w = m(k);
        if !w.is_finite() {
            return Err(Error::NonFiniteMultiplier { k });
        }
        for v in out.slot_mut(slot) {
            *v = v.scale(w);
        }
    }
    Ok(out)
}

/// `|k| û_k` — the first-order homogeneous derivative multiplier `Λ`.
pub fn lambda<T: Real>(f: &SpectralVectorField<T>) -> SpectralVectorField<T> {
    apply_multiplier(f, |k| T::lit(wavevec_len(k))).expect("|k| is finite")
}
