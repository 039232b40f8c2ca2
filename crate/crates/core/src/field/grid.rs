use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::scalar::{c, from_usize, Real, Transform};

/// Uniform periodic grid on `[x_min, x_max)`.
///
/// Cloning is cheap: the FFT plan is shared.
#[derive(Clone)]
pub struct Grid1D<T: Real> {
    x_min: T,
    x_max: T,
    n: usize,
    fft: Arc<dyn Transform<T>>,
}

impl<T: Real> fmt::Debug for Grid1D<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("x_min", &self.x_min)
            .field("x_max", &self.x_max)
            .field("n_points", &self.n)
            .finish()
    }
}

impl<T: Real> PartialEq for Grid1D<T> {
    fn eq(&self, other: &Self) -> bool {
        self.x_min == other.x_min && self.x_max == other.x_max && self.n == other.n
    }
}

/// Which Fourier multiplier to use at the Nyquist mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Nyquist {
    Keep,
    Zero,
}

impl<T: Real> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        if n_points < 8 {
            return Err(invalid(format!("grid needs at least 8 points, got {n_points}")));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(invalid(format!("grid bounds must satisfy x_max > x_min ({x_min}, {x_max})")));
        }
        Ok(Self {
            x_min,
            x_max,
            n: n_points,
            fft: T::transform(n_points),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> T {
        self.length() / from_usize(self.n)
    }

    pub fn x(&self, i: usize) -> T {
        self.x_min + from_usize::<T>(i) * self.spacing()
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers in FFT order; the Nyquist entry is negative.
    pub fn wavenumbers(&self) -> Vec<T> {
        let dk = c::<T>(2.0) * T::PI() / self.length();
        let n = self.n as isize;
        (0..n)
            .map(|j| {
                let m = if j < (n + 1) / 2 { j } else { j - n };
                T::lit(m as f64) * dk
            })
            .collect()
    }

    pub fn k_max(&self) -> T {
        T::PI() / self.spacing()
    }

    pub(crate) fn nyquist_index(&self) -> Option<usize> {
        (self.n % 2 == 0).then_some(self.n / 2)
    }

    pub(crate) fn forward(&self, data: &mut [Complex<T>]) {
        self.fft.forward(data);
    }

    /// Inverse transform including the `1/n` normalization.
    pub(crate) fn inverse(&self, data: &mut [Complex<T>]) {
        self.fft.inverse(data);
        let s = T::one() / from_usize(self.n);
        for z in data.iter_mut() {
            *z = z.scale(s);
        }
    }

    /// Applies the Fourier multiplier `m(k)` to periodic samples.
    pub(crate) fn multiply_in_k(
        &self,
        values: &[Complex<T>],
        nyquist: Nyquist,
        m: impl Fn(T) -> Complex<T>,
    ) -> Vec<Complex<T>> {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        let nyq = self.nyquist_index();
        for (j, (z, k)) in buf.iter_mut().zip(self.wavenumbers()).enumerate() {
            *z = if nyq == Some(j) && nyquist == Nyquist::Zero {
                Complex::zero()
            } else {
                *z * m(k)
            };
        }
        self.inverse(&mut buf);
        buf
    }

    /// `p^n v` with `p = -i d/dx`. Odd powers drop the Nyquist mode so that
    /// they stay Hermitian on the grid.
    pub(crate) fn momentum_power(&self, v: &[Complex<T>], n: u32) -> Vec<Complex<T>> {
        let nyq = if n % 2 == 1 { Nyquist::Zero } else { Nyquist::Keep };
        self.multiply_in_k(v, nyq, |k| Complex::new(k.powi(n as i32), T::zero()))
    }

    /// Spectral n-th derivative of real samples.
    pub fn derivative_real(&self, v: &[T], order: u32) -> Result<Vec<T>> {
        if v.len() != self.n {
            return Err(invalid(format!("{} samples on a {}-point grid", v.len(), self.n)));
        }
        check_finite(v.iter().copied())?;
        let z: Vec<Complex<T>> = v.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Ok(self
            .derivative_complex(&z, order)
            .into_iter()
            .map(|w| w.re)
            .collect())
    }

    pub(crate) fn derivative_complex(&self, v: &[Complex<T>], order: u32) -> Vec<Complex<T>> {
        let nyq = if order % 2 == 1 { Nyquist::Zero } else { Nyquist::Keep };
        let i = Complex::new(T::zero(), T::one());
        self.multiply_in_k(v, nyq, |k| (i * k).powu(order))
    }
}

pub(crate) fn check_finite<T: Real>(values: impl IntoIterator<Item = T>) -> Result<()> {
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric("non-finite sample".into()))
    }
}
