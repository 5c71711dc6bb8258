//! Spectral ↔ physical grid transforms.
//!
//! Synthesis evaluates `u(x_j) = Σ_k û_k e^{i k·x_j}` on the uniform grid
//! `x_j = 2π j / M` by scattering coefficients into an `M^d` box (indices
//! taken mod `M`) and running unnormalized inverse FFTs along each axis.
//! Analysis is the forward FFT followed by division by `M^d` and a gather
//! back onto the truncated lattice.
//!
//! For quadratic products the grid must resolve every sum `j + k` of
//! retained modes without wrap-around collisions: with `|k|_∞ ≤ N` this
//! requires `M ≥ 3N + 1`, after which gathered products are exact
//! convolutions (up to round-off), not approximations.

use std::sync::Arc;

use ndarray::{ArrayD, Axis, IxDyn};
use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::Error;
use crate::field::SpectralVectorField;
use crate::lattice::{TruncatedLattice, WaveVec};
use crate::scalar::Real;
use crate::Result;

/// Smallest grid size `≥ min` whose prime factors are all in {2, 3, 5},
/// keeping FFT lengths in the fast radix paths.
pub fn good_grid_size(min: usize) -> usize {
    let mut m = min.max(1);
    loop {
        let mut r = m;
        for p in [2usize, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Grid size guaranteeing exact (de-aliased) quadratic products on the
/// given lattice.
pub fn dealias_grid_size(lattice: &TruncatedLattice) -> usize {
    good_grid_size(3 * lattice.cutoff() as usize + 1)
}

/// FFT plans and scratch storage for one `(lattice, M)` pairing; reuse it
/// across calls to amortize planning and allocation.
pub struct SpectralTransformer<T: Real> {
    lattice: TruncatedLattice,
    m: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    lane: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> SpectralTransformer<T> {
    /// `m` must at least represent the lattice (`m ≥ 2N + 1`); pass
    /// [`dealias_grid_size`] when grids will be multiplied pointwise.
    pub fn new(lattice: TruncatedLattice, m: usize) -> Result<Self> {
        let required = 2 * lattice.cutoff() as usize + 1;
        if m < required {
            return Err(Error::GridTooSmall {
                m,
                n: lattice.cutoff(),
                required,
            });
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft(m, FftDirection::Forward);
        let inverse = planner.plan_fft(m, FftDirection::Inverse);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            lattice,
            m,
            forward,
            inverse,
            lane: vec![Complex::new(T::zero(), T::zero()); m],
            scratch: vec![Complex::new(T::zero(), T::zero()); scratch_len],
        })
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn lattice(&self) -> &TruncatedLattice {
        &self.lattice
    }

    fn grid_shape(&self) -> IxDyn {
        IxDyn(&vec![self.m; self.lattice.dim()][..])
    }

    fn grid_index(&self, k: WaveVec) -> IxDyn {
        let m = self.m as i32;
        let idx: Vec<usize> = (0..self.lattice.dim())
            .map(|a| k[a].rem_euclid(m) as usize)
            .collect();
        IxDyn(&idx[..])
    }

    fn fft_all_axes(&mut self, arr: &mut ArrayD<Complex<T>>, direction: FftDirection) {
        let plan = match direction {
            FftDirection::Forward => Arc::clone(&self.forward),
            FftDirection::Inverse => Arc::clone(&self.inverse),
        };
        let last = arr.ndim() - 1;
        for axis in 0..arr.ndim() {
            if axis == last {
                // Lanes along the last axis of a standard-layout array are
                // contiguous; rustfft batches over a multiple-length slice.
                let slice = arr.as_slice_mut().expect("grid arrays are standard layout");
                plan.process_with_scratch(slice, &mut self.scratch);
            } else {
                for mut lane in arr.lanes_mut(Axis(axis)) {
                    for (dst, src) in self.lane.iter_mut().zip(lane.iter()) {
                        *dst = *src;
                    }
                    plan.process_with_scratch(&mut self.lane, &mut self.scratch);
                    for (dst, src) in lane.iter_mut().zip(self.lane.iter()) {
                        *dst = *src;
                    }
                }
            }
        }
    }

    /// Evaluate arbitrary per-mode coefficients on the grid. The closure is
    /// queried over the full symmetric box, so Hermitian inputs yield real
    /// grids up to round-off.
    pub fn synthesize_modes(&mut self, coeff: impl Fn(WaveVec) -> Complex<T>) -> ArrayD<Complex<T>> {
        let mut arr = ArrayD::from_elem(self.grid_shape(), Complex::new(T::zero(), T::zero()));
        for k in self.lattice.iter_box() {
            let v = coeff(k);
            if v.re != T::zero() || v.im != T::zero() {
                arr[self.grid_index(k)] = v;
            }
        }
        self.fft_all_axes(&mut arr, FftDirection::Inverse);
        arr
    }

    /// Physical-space samples of each velocity component.
    pub fn synthesize(&mut self, f: &SpectralVectorField<T>) -> Vec<ArrayD<Complex<T>>> {
        (0..self.lattice.dim())
            .map(|c| self.synthesize_modes(|k| f.coeff(k)[c]))
            .collect()
    }

    /// Project grid samples of one component back onto the truncated
    /// lattice (forward FFT, `1/M^d` normalization, gather of the stored
    /// half). Consumes the grid array as FFT scratch.
    pub fn analyze_into(
        &mut self,
        mut arr: ArrayD<Complex<T>>,
        out: &mut SpectralVectorField<T>,
        component: usize,
    ) {
        self.fft_all_axes(&mut arr, FftDirection::Forward);
        let norm = T::one() / T::lit((self.m as f64).powi(self.lattice.dim() as i32));
        for (slot, k) in self.lattice.iter_slots() {
            let v = arr[self.grid_index(k)].scale(norm);
            out.slot_mut(slot)[component] = v;
        }
    }

    /// Largest imaginary part over the grid — a diagnostic for Hermitian
    /// inputs, whose synthesis is real analytically.
    pub fn reality_defect(grids: &[ArrayD<Complex<T>>]) -> T {
        grids
            .iter()
            .flat_map(|g| g.iter())
            .fold(T::zero(), |m, c| m.max(c.im.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes_are_smooth_and_large_enough() {
        assert_eq!(good_grid_size(127), 128);
        assert_eq!(good_grid_size(31), 32);
        assert_eq!(good_grid_size(10), 10);
        assert_eq!(good_grid_size(11), 12);
        assert_eq!(good_grid_size(1), 1);
        let lat = TruncatedLattice::new(2, 42).unwrap();
        assert_eq!(dealias_grid_size(&lat), 128);
        let lat3 = TruncatedLattice::new(3, 10).unwrap();
        assert_eq!(dealias_grid_size(&lat3), 32);
    }

    #[test]
    fn rejects_unrepresentable_grid() {
        let lat = TruncatedLattice::new(2, 8).unwrap();
        let err = SpectralTransformer::<f64>::new(lat, 16).err().unwrap();
        assert!(matches!(err, Error::GridTooSmall { required: 17, .. }));
    }

    #[test]
    fn single_cosine_mode_synthesizes_to_cosine_samples() {
        let lat = TruncatedLattice::new(2, 2).unwrap();
        let mut f = SpectralVectorField::<f64>::zeros(lat);
        // û_{±(1,0)} = 1/2 in component 0 → u_0(x) = cos(x_0).
        f.set_coeff(
            [1, 0, 0],
            [
                Complex::new(0.5, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
            ],
        );
        let m = 8;
        let mut tr = SpectralTransformer::new(lat, m).unwrap();
        let grids = tr.synthesize(&f);
        for j in 0..m {
            let x = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let got = grids[0][IxDyn(&[j, 0])];
            assert!((got.re - x.cos()).abs() < 1e-14);
            assert!(got.im.abs() < 1e-15);
        }
        assert!(SpectralTransformer::reality_defect(&grids) < 1e-15);
    }

    #[test]
    fn synthesize_analyze_round_trips() {
        let lat = TruncatedLattice::new(3, 3).unwrap();
        let mut f = SpectralVectorField::<f64>::zeros(lat);
        // A handful of modes with irregular values.
        f.set_coeff(
            [1, 2, -3],
            [
                Complex::new(0.3, -0.4),
                Complex::new(-0.1, 0.7),
                Complex::new(0.05, 0.02),
            ],
        );
        f.set_coeff(
            [-3, 0, 1],
            [
                Complex::new(-0.9, 0.1),
                Complex::new(0.2, 0.2),
                Complex::new(0.4, -0.6),
            ],
        );
        f.set_coeff(
            [0, 3, 0],
            [
                Complex::new(0.11, 0.0),
                Complex::new(0.0, -0.5),
                Complex::new(1.3, 0.25),
            ],
        );
        let mut tr = SpectralTransformer::new(lat, good_grid_size(7)).unwrap();
        let grids = tr.synthesize(&f);
        let mut back = SpectralVectorField::<f64>::zeros(lat);
        for (c, g) in grids.into_iter().enumerate() {
            tr.analyze_into(g, &mut back, c);
        }
        let diff = back.sub(&f).unwrap();
        assert!(diff.l2_norm() < 1e-13 * f.l2_norm());
    }
}
