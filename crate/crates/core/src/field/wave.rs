use num_complex::Complex;

use super::grid::{check_finite, Grid1D};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Complex field sampled on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction<T: Real> {
    grid: Grid1D<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> Wavefunction<T> {
    pub fn new(grid: &Grid1D<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!("{} values on a {}-point grid", values.len(), grid.len())));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn(grid: &Grid1D<T>, f: impl Fn(T) -> Complex<T>) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.points().into_iter().map(f).collect(),
        }
    }

    pub fn from_real(grid: &Grid1D<T>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub(crate) fn with_values(&self, values: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    /// `Σ |ψ_i|² dx`.
    pub fn norm_sq(&self) -> T {
        self.values.iter().map(|z| z.norm_sqr()).sum::<T>() * self.grid.spacing()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sq();
        if !n.is_finite() || n == T::zero() {
            return Err(Error::Numeric(format!("cannot normalize a state of norm² {n}")));
        }
        let s = T::one() / n.sqrt();
        for z in self.values.iter_mut() {
            *z = z.scale(s);
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `⟨self|other⟩ = Σ conj(ψ_i) φ_i dx`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.grid != other.grid {
            return Err(invalid("wavefunctions live on different grids"));
        }
        Ok(crate::linalg::inner(&self.values, &other.values).scale(self.grid.spacing()))
    }

    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        check_finite(self.values.iter().flat_map(|z| [z.re, z.im]))
    }
}
