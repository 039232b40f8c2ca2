//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use rustfft::{Fft, FftPlanner};

/// In-place discrete Fourier transform of a fixed length, unnormalized in
/// both directions.
pub trait Transform<T>: Send + Sync {
    fn forward(&self, data: &mut [Complex<T>]);
    fn inverse(&self, data: &mut [Complex<T>]);
}

struct RustFftPair<T: rustfft::FftNum> {
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: rustfft::FftNum> Transform<T> for RustFftPair<T> {
    fn forward(&self, data: &mut [Complex<T>]) {
        self.fwd.process(data);
    }

    fn inverse(&self, data: &mut [Complex<T>]) {
        self.inv.process(data);
    }
}

fn plan<T: rustfft::FftNum>(len: usize) -> Arc<dyn Transform<T>> {
    let mut planner = FftPlanner::new();
    Arc::new(RustFftPair {
        fwd: planner.plan_fft_forward(len),
        inv: planner.plan_fft_inverse(len),
    })
}

/// Real floating-point scalar: `f32` or `f64`.
///
/// The FFT backend is reached through [`Real::transform`] rather than a
/// supertrait so that `Float` methods stay unambiguous in generic code.
pub trait Real:
    Float + FloatConst + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    fn lit(v: f64) -> Self;

    fn to_f64_lossy(self) -> f64;

    fn transform(len: usize) -> Arc<dyn Transform<Self>>;
}

impl Real for f64 {
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }

    fn transform(len: usize) -> Arc<dyn Transform<Self>> {
        plan(len)
    }
}

impl Real for f32 {
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }

    fn transform(len: usize) -> Arc<dyn Transform<Self>> {
        plan(len)
    }
}

/// Shorthand for `T::lit(v)`.
#[inline]
pub(crate) fn c<T: Real>(v: f64) -> T {
    T::lit(v)
}

#[inline]
pub(crate) fn from_usize<T: Real>(n: usize) -> T {
    T::lit(n as f64)
}
