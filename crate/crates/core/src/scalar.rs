//! Scalar abstraction for the field layer.
//!
//! The FFT/multiplier layer works for `f32` and `f64` through [`Real`].
//! Geometry (grid side lengths, frequencies) and everything above the field
//! layer stay in `f64`, so the trait only needs lossless-enough conversions
//! in and out of `f64`.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign
    + std::fmt::Display
    + std::fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Round-trip FFT tolerance scale for this precision.
    const FFT_TOL: f64;

    fn of(x: f64) -> Self {
        // Every f64 we feed through here is finite; the cast saturates only
        // on overflow, which the f32 lane never reaches at the grid sizes
        // and symbol values this crate uses.
        Self::from_f64(x).expect("f64 value representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f64 {
    const FFT_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const FFT_TOL: f64 = 1e-5;
}
