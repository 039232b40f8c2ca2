//! Low-wavenumber Fourier subspaces of a grid.
//!
//! Used two ways: as the resolved band on which operator identities are
//! certified, and as a Rayleigh–Ritz basis for low-lying eigenstates of
//! `p² + u`, which is far cheaper than diagonalizing the full grid matrix.

use num_complex::Complex;
use num_traits::Zero;

use super::grid::Grid1D;
use crate::error::{invalid, Result};
use crate::linalg::{eigen, OperatorMatrix};
use crate::scalar::{c, from_usize, Real};

/// Fourier modes `|m| ≤ m_max` on a periodic grid.
#[derive(Debug, Clone)]
pub struct BandBasis<T: Real> {
    grid: Grid1D<T>,
    m_max: usize,
}

impl<T: Real> BandBasis<T> {
    pub fn new(grid: &Grid1D<T>, m_max: usize) -> Result<Self> {
        if 2 * m_max >= grid.len() {
            return Err(invalid(format!(
                "band of {m_max} modes does not fit below Nyquist on {} points",
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            m_max,
        })
    }

    /// Band `|k| ≤ fraction · k_max`.
    pub fn fraction(grid: &Grid1D<T>, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(invalid(format!("band fraction must lie in (0, 1), got {fraction}")));
        }
        Self::new(grid, (fraction * (grid.len() / 2) as f64).floor() as usize)
    }

    /// Band holding every mode with `k² ≤ k_cut²`.
    pub fn cutoff(grid: &Grid1D<T>, k_cut: T) -> Result<Self> {
        let dk = c::<T>(2.0) * T::PI() / grid.length();
        let m = (k_cut / dk).floor().to_f64_lossy().max(1.0) as usize;
        Self::new(grid, m)
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn dim(&self) -> usize {
        2 * self.m_max + 1
    }

    fn k(&self, m: usize) -> T {
        c::<T>(2.0) * T::PI() * from_usize::<T>(m) / self.grid.length()
    }

    /// `G_m = Σ_j e^{-i k_m x_j} f_j` for `m` in `-m_max..=m_max`, indexed by
    /// `m + m_max`.
    fn fourier_sums(&self, f: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.grid.len();
        let mut buf = f.to_vec();
        self.grid.forward(&mut buf);
        let x0 = self.grid.x_min();
        let mut out = vec![Complex::zero(); self.dim()];
        for m in 0..=self.m_max {
            let k = self.k(m);
            out[self.m_max + m] = buf[m] * Complex::new(T::zero(), -k * x0).exp();
            if m > 0 {
                out[self.m_max - m] = buf[n - m] * Complex::new(T::zero(), k * x0).exp();
            }
        }
        out
    }

    /// Normalized plane wave `e^{i k_m x}/√L` sampled on the grid.
    pub fn plane_wave(&self, m: isize) -> Vec<Complex<T>> {
        let norm = T::one() / self.grid.length().sqrt();
        let k = self.k(m.unsigned_abs()) * if m < 0 { -T::one() } else { T::one() };
        self.grid
            .points()
            .into_iter()
            .map(|x| Complex::new(T::zero(), k * x).exp().scale(norm))
            .collect()
    }

    /// Matrix of a linear operator in the plane-wave basis of the band.
    pub fn plane_wave_matrix(
        &self,
        action: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
    ) -> OperatorMatrix<T> {
        let d = self.dim();
        let scale = self.grid.spacing() / self.grid.length().sqrt();
        let mut entries = vec![Complex::zero(); d * d];
        for b in 0..d {
            let col = action(&self.plane_wave(b as isize - self.m_max as isize));
            for (a, g) in self.fourier_sums(&col).into_iter().enumerate() {
                entries[a * d + b] = g.scale(scale);
            }
        }
        OperatorMatrix::from_entries(d, entries).expect("square by construction")
    }

    /// Real basis `1/√L, √(2/L) cos(k_m x), √(2/L) sin(k_m x)`.
    pub fn real_function(&self, idx: usize) -> Vec<T> {
        let l = self.grid.length();
        if idx == 0 {
            return vec![T::one() / l.sqrt(); self.grid.len()];
        }
        let m = (idx + 1) / 2;
        let k = self.k(m);
        let a = (c::<T>(2.0) / l).sqrt();
        self.grid
            .points()
            .into_iter()
            .map(|x| if idx % 2 == 1 { a * (k * x).cos() } else { a * (k * x).sin() })
            .collect()
    }

    /// Matrix of a real operator in the real cos/sin basis of the band.
    pub fn real_matrix(&self, action: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>) -> Vec<T> {
        let d = self.dim();
        let dx = self.grid.spacing();
        let l = self.grid.length();
        let a0 = T::one() / l.sqrt();
        let a = (c::<T>(2.0) / l).sqrt();
        let half = c::<T>(0.5);
        let mut out = vec![T::zero(); d * d];
        for b in 0..d {
            let col: Vec<Complex<T>> = self
                .real_function(b)
                .into_iter()
                .map(|v| Complex::new(v, T::zero()))
                .collect();
            let g = self.fourier_sums(&action(&col));
            for row in 0..d {
                let val = if row == 0 {
                    g[self.m_max].re * a0
                } else {
                    let m = (row + 1) / 2;
                    let (gp, gm) = (g[self.m_max + m], g[self.m_max - m]);
                    if row % 2 == 1 {
                        (gp + gm).re * half * a
                    } else {
                        // Σ sin·f = i (G_m − G_{−m}) / 2
                        -(gp - gm).im * half * a
                    }
                };
                out[row * d + b] = val * dx;
            }
        }
        for i in 0..d {
            for j in 0..i {
                let s = (out[i * d + j] + out[j * d + i]) * half;
                out[i * d + j] = s;
                out[j * d + i] = s;
            }
        }
        out
    }

    /// Grid samples of `Σ coeffs_i φ_i` in the real basis.
    pub fn expand_real(&self, coeffs: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.grid.len()];
        for (i, &a) in coeffs.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            for (o, f) in out.iter_mut().zip(self.real_function(i)) {
                *o = *o + a * f;
            }
        }
        out
    }

    /// Lowest `count` Ritz pairs of a real symmetric operator restricted to the
    /// band, with eigenvectors returned as grid samples.
    pub fn lowest_states(
        &self,
        action: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
        count: usize,
    ) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        let d = self.dim();
        let eig = eigen::symmetric_lowest(self.real_matrix(action), d, count)?;
        let states = (0..count).map(|k| self.expand_real(eig.vector(k))).collect();
        Ok((eig.values, states))
    }
}
