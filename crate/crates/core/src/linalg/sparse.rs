//! Compressed-sparse-row complex matrices for the spin sectors.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{invalid, Result};
use crate::linalg::OperatorMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
}

impl<T: Real> CsrMatrix<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex<T>)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(invalid(format!("triplet ({r}, {c}) outside a {dim}x{dim} matrix")));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex<T>> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                let top = vals.last_mut().unwrap();
                *top = *top + v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { dim, row_ptr, cols, vals })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = A x`.
    pub fn apply_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = Complex::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc = acc + self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn apply(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.dim {
            return Err(invalid(format!("vector length {} vs dimension {}", x.len(), self.dim)));
        }
        let mut y = vec![Complex::zero(); self.dim];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    pub fn to_dense(&self) -> OperatorMatrix<T> {
        let mut entries = vec![Complex::zero(); self.dim * self.dim];
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                entries[i * self.dim + self.cols[k]] = self.vals[k];
            }
        }
        OperatorMatrix::from_entries(self.dim, entries).expect("square by construction")
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn row_sum_bound(&self) -> T {
        (0..self.dim)
            .map(|i| {
                self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<T>()
            })
            .fold(T::zero(), T::max)
    }
}
