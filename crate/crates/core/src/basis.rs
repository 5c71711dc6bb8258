//! The divergence-free trigonometric eigenbasis of the Stokes operator and
//! the trilinear advection form on it.
//!
//! For each stored wave vector `k ≠ 0` the plane `k^⊥` carries `d - 1`
//! orthonormal directions; paired with a cosine or sine profile each
//! direction yields one real, divergence-free, unit-norm field
//!
//! `ω = √2 · v cos(k·x)`  or  `ω = √2 · v sin(k·x)`,  `v ⊥ k`, `|v| = 1`,
//!
//! every one an eigenfield of the Stokes operator with eigenvalue `|k|²`.
//! The directions come from Gram–Schmidt on the projected coordinate axes
//! `e_j - k_j k/|k|²`, skipping the axes the projection annihilates. The
//! trilinear form `b(a, b, c) = ⟨(ω_a·∇)ω_b, ω_c⟩` is evaluated through
//! the exact convolution; it is antisymmetric in its last two arguments,
//! which is the cancellation that drives the energy identity.

use num_complex::Complex;

use crate::advection::advect_exact;
use crate::field::SpectralVectorField;
use crate::lattice::{TruncatedLattice, WaveVec};
use crate::norms::inner_product;
use crate::scalar::Real;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Cos,
    Sin,
}

/// One eigenfield descriptor: wave vector, transverse direction, profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisElement<T> {
    pub k: WaveVec,
    pub axis: [T; 3],
    pub parity: Parity,
}

impl<T: Real> BasisElement<T> {
    pub fn eigenvalue(&self) -> T {
        T::lit(TruncatedLattice::norm_sq(self.k) as f64)
    }
}

/// The full eigenbasis on one lattice plus scratch-free evaluation of the
/// trilinear form.
pub struct GalerkinSystem<T: Real> {
    lattice: TruncatedLattice,
    elements: Vec<BasisElement<T>>,
}

fn transverse_axes<T: Real>(k: WaveVec, dim: usize) -> Vec<[T; 3]> {
    let nsq = T::lit(TruncatedLattice::norm_sq(k) as f64);
    let kf: Vec<T> = (0..dim).map(|c| T::lit(k[c] as f64)).collect();
    let mut axes: Vec<[T; 3]> = Vec::with_capacity(dim - 1);
    for j in 0..dim {
        // e_j - k_j k / |k|²
        let mut v = [T::zero(); 3];
        v[j] = T::one();
        for c in 0..dim {
            v[c] = v[c] - kf[j] * kf[c] / nsq;
        }
        // Gram–Schmidt against the axes already accepted.
        for a in &axes {
            let mut dot = T::zero();
            for c in 0..dim {
                dot = dot + v[c] * a[c];
            }
            for c in 0..dim {
                v[c] = v[c] - dot * a[c];
            }
        }
        let mut norm_sq = T::zero();
        for c in 0..dim {
            norm_sq = norm_sq + v[c] * v[c];
        }
        if norm_sq <= T::lit(1e-12) {
            continue;
        }
        let inv = T::one() / norm_sq.sqrt();
        for c in 0..dim {
            v[c] = v[c] * inv;
        }
        axes.push(v);
        if axes.len() == dim - 1 {
            break;
        }
    }
    axes
}

impl<T: Real> GalerkinSystem<T> {
    pub fn new(lattice: TruncatedLattice) -> Self {
        let dim = lattice.dim();
        let mut elements = Vec::new();
        for (_, k) in lattice.iter_slots().skip(1) {
            for axis in transverse_axes::<T>(k, dim) {
                elements.push(BasisElement {
                    k,
                    axis,
                    parity: Parity::Cos,
                });
                elements.push(BasisElement {
                    k,
                    axis,
                    parity: Parity::Sin,
                });
            }
        }
        Self { lattice, elements }
    }

    pub fn lattice(&self) -> &TruncatedLattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, idx: usize) -> &BasisElement<T> {
        &self.elements[idx]
    }

    pub fn eigenvalue(&self, idx: usize) -> T {
        self.elements[idx].eigenvalue()
    }

    /// Realize element `idx` as a spectral field of unit coefficient norm.
    pub fn field(&self, idx: usize) -> SpectralVectorField<T> {
        let el = &self.elements[idx];
        let mut f = SpectralVectorField::zeros(self.lattice);
        // cos(k·x) v: û_{±k} = v/2; sin(k·x) v: û_{±k} = ∓iv/2. Scaling by
        // √2 makes the stored-plus-mirrored energy sum to one.
        let half = match el.parity {
            Parity::Cos => Complex::new(T::lit(0.5_f64.sqrt()), T::zero()),
            Parity::Sin => Complex::new(T::zero(), -T::lit(0.5_f64.sqrt())),
        };
        let coeffs = [
            half.scale(el.axis[0]),
            half.scale(el.axis[1]),
            half.scale(el.axis[2]),
        ];
        f.set_coeff(el.k, coeffs);
        f
    }

    /// Assemble `Σ coeffs[a] · ω_a`.
    pub fn synthesize_state(&self, coeffs: &[T]) -> SpectralVectorField<T> {
        assert_eq!(coeffs.len(), self.elements.len());
        let mut out = SpectralVectorField::zeros(self.lattice);
        for (idx, &alpha) in coeffs.iter().enumerate() {
            if alpha == T::zero() {
                continue;
            }
            out.axpy(alpha, &self.field(idx));
        }
        out
    }

    /// `b(a, b, c) = ⟨(ω_a·∇)ω_b, ω_c⟩` via the exact convolution.
    pub fn trilinear_b(&self, a: usize, b: usize, c: usize) -> Result<T> {
        let advected = advect_exact(&self.field(a), &self.field(b))?;
        Ok(inner_product(&advected, &self.field(c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::apply_multiplier;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn basis_counts_and_unit_norms() {
        let lat2 = TruncatedLattice::new(2, 2).unwrap();
        let sys2 = GalerkinSystem::<f64>::new(lat2);
        // 12 stored nonzero modes, one transverse direction, two parities.
        assert_eq!(sys2.len(), 24);
        let lat3 = TruncatedLattice::new(3, 1).unwrap();
        let sys3 = GalerkinSystem::<f64>::new(lat3);
        // 13 stored nonzero modes, two transverse directions, two parities.
        assert_eq!(sys3.len(), 52);
        for idx in 0..sys3.len() {
            let f = sys3.field(idx);
            assert!((f.l2_norm() - 1.0).abs() < 1e-14);
            assert!(f.validate(true).is_empty());
        }
    }

    #[test]
    fn elements_are_stokes_eigenfields() {
        let lat = TruncatedLattice::new(3, 2).unwrap();
        let sys = GalerkinSystem::<f64>::new(lat);
        for idx in (0..sys.len()).step_by(7) {
            let f = sys.field(idx);
            let stokes =
                apply_multiplier(&f, |k| TruncatedLattice::norm_sq(k) as f64).unwrap();
            let mut expected = f.clone();
            expected.scale(sys.eigenvalue(idx));
            assert!(stokes.sub(&expected).unwrap().max_coeff() < 1e-14);
        }
    }

    #[test]
    fn same_mode_elements_are_orthonormal() {
        let lat = TruncatedLattice::new(3, 2).unwrap();
        let sys = GalerkinSystem::<f64>::new(lat);
        // Group indices by wave vector; check pairwise inner products.
        for i in 0..sys.len() {
            for j in (i + 1)..sys.len() {
                if sys.element(i).k != sys.element(j).k {
                    continue;
                }
                let ip = inner_product(&sys.field(i), &sys.field(j));
                assert!(ip.abs() < 1e-14, "elements {i}, {j}: ⟨·,·⟩ = {ip:e}");
            }
        }
    }

    #[test]
    fn trilinear_form_is_antisymmetric_in_the_last_pair() {
        let lat = TruncatedLattice::new(2, 3).unwrap();
        let sys = GalerkinSystem::<f64>::new(lat);
        let mut rng = StdRng::seed_from_u64(1234);
        let mut max_defect = 0.0f64;
        let mut max_diag = 0.0f64;
        let mut nonzero = 0usize;
        for _ in 0..200 {
            let a = rng.gen_range(0..sys.len());
            let b = rng.gen_range(0..sys.len());
            let c = rng.gen_range(0..sys.len());
            let abc = sys.trilinear_b(a, b, c).unwrap();
            let acb = sys.trilinear_b(a, c, b).unwrap();
            max_defect = max_defect.max((abc + acb).abs());
            max_diag = max_diag.max(sys.trilinear_b(a, b, b).unwrap().abs());
            if abc.abs() > 1e-3 {
                nonzero += 1;
            }
        }
        assert!(max_defect < 1e-13, "antisymmetry defect {max_defect:e}");
        assert!(max_diag < 1e-13, "diagonal {max_diag:e}");
        assert!(nonzero > 0, "form vanished on every sampled triple");
    }

    #[test]
    fn cubic_contraction_vanishes_for_random_states() {
        let lat = TruncatedLattice::new(2, 2).unwrap();
        let sys = GalerkinSystem::<f64>::new(lat);
        let mut rng = StdRng::seed_from_u64(777);
        for _ in 0..3 {
            let alphas: Vec<f64> = (0..sys.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = sys.synthesize_state(&alphas);
            assert!(u.validate(true).is_empty());
            // Σ_{a,b,c} α_a α_b α_c b(a,b,c) = ⟨(u·∇)u, u⟩.
            let advected = advect_exact(&u, &u).unwrap();
            let contraction = inner_product(&advected, &u);
            assert!(contraction.abs() < 1e-12, "contraction {contraction:e}");
        }
    }
}
