//! Scalar abstraction for the numerical kernels.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable in every kernel of this crate: ordinary
/// float arithmetic, exact constants, conversions from literals, and FFT
/// support. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + rustfft::FftNum + std::fmt::LowerExp
{
    /// Lossless-enough conversion from an `f64` literal; panics only on
    /// values no float type can represent (never for the constants used
    /// here).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
