use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::linalg::eigen::{self, SymmetricEigen};
use crate::scalar::{c, Real};

/// Dense square complex matrix, row-major.
///
/// The `hermitian` flag is a checked claim: it can only be set through
/// [`OperatorMatrix::assert_hermitian`], which verifies
/// `max|A - A†| < 1e-12 · max|A|` (scaled by the scalar's epsilon for `f32`).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
    hermitian: bool,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex::zero(); dim * dim],
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self {
            dim,
            entries,
            hermitian: false,
        }
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self {
            dim,
            entries,
            hermitian: false,
        })
    }

    /// Builds a complex matrix from a real row-major array.
    pub fn from_real(dim: usize, values: &[T]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(invalid("real entry count does not match dimension"));
        }
        Ok(Self {
            dim,
            entries: values.iter().map(|&v| Complex::new(v, T::zero())).collect(),
            hermitian: false,
        })
    }

    pub fn diagonal(values: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m.hermitian = values.iter().all(|v| v.im == T::zero());
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// `max|A - A†|`.
    pub fn hermitian_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Verifies Hermiticity and sets the flag.
    pub fn assert_hermitian(mut self) -> Result<Self> {
        let tol = hermitian_tolerance::<T>() * self.max_abs().max(T::min_positive_value());
        let defect = self.hermitian_defect();
        if defect > tol {
            return Err(Error::Numeric(format!(
                "matrix is not Hermitian: max|A - A^H| = {defect:e} exceeds {tol:e}"
            )));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::from_fn(n, |i, j| self[(j, i)].conj());
        out.hermitian = self.hermitian;
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
            hermitian: self.hermitian && s.im == T::zero(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = vec![Complex::zero(); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.entries[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(Self {
            dim: n,
            entries: out,
            hermitian: false,
        })
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.sub(&ba)
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.dim {
            return Err(invalid(format!(
                "vector length {} does not match matrix dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(self
            .entries
            .chunks(self.dim)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// `U† A U` for a unitary `U`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.adjoint().matmul(&self.matmul(u)?)
    }

    /// Real part as a row-major array when every imaginary part vanishes.
    pub fn real_entries(&self) -> Option<Vec<T>> {
        if self.entries.iter().all(|z| z.im == T::zero()) {
            Some(self.entries.iter().map(|z| z.re).collect())
        } else {
            None
        }
    }

    /// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
    ///
    /// Real symmetric matrices go straight to the real solver. Genuinely
    /// complex ones are embedded as the real symmetric `[[A, -B], [B, A]]`,
    /// whose spectrum is that of `A + iB` with every level doubled.
    pub fn eigh(&self) -> Result<HermitianEigen<T>> {
        if !self.hermitian {
            return Err(invalid("eigh requires a matrix flagged Hermitian"));
        }
        let n = self.dim;
        if let Some(real) = self.real_entries() {
            let eig = eigen::symmetric_eigen(real, n)?;
            let vectors = (0..n)
                .map(|k| {
                    eig.vector(k)
                        .iter()
                        .map(|&x| Complex::new(x, T::zero()))
                        .collect()
                })
                .collect();
            return Ok(HermitianEigen {
                values: eig.values,
                vectors,
            });
        }
        let m = 2 * n;
        let mut emb = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self[(i, j)];
                emb[i * m + j] = z.re;
                emb[(i + n) * m + (j + n)] = z.re;
                emb[i * m + (j + n)] = -z.im;
                emb[(i + n) * m + j] = z.im;
            }
        }
        let eig: SymmetricEigen<T> = eigen::symmetric_eigen(emb, m)?;
        // Each level appears twice, as (x, y) and (-y, x); keep one vector per
        // level by Gram-Schmidt over the complex vectors x + i y.
        let mut values = Vec::with_capacity(n);
        let mut vectors: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
        for k in 0..m {
            if values.len() == n {
                break;
            }
            let col = eig.vector(k);
            let mut v: Vec<Complex<T>> = (0..n).map(|i| Complex::new(col[i], col[i + n])).collect();
            for w in &vectors {
                let ov = inner(w, &v);
                for (vi, wi) in v.iter_mut().zip(w) {
                    *vi = *vi - *wi * ov;
                }
            }
            let nrm = inner(&v, &v).re.sqrt();
            if nrm > c::<T>(1e-6) {
                for vi in v.iter_mut() {
                    *vi = *vi / nrm;
                }
                values.push(eig.values[k]);
                vectors.push(v);
            }
        }
        if values.len() != n {
            return Err(Error::Numeric(
                "failed to separate complex eigenvectors from the real embedding".into(),
            ));
        }
        Ok(HermitianEigen { values, vectors })
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for OperatorMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.entries[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for OperatorMatrix<T> {
    /// Mutable access clears the Hermitian flag.
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        self.hermitian = false;
        &mut self.entries[i * self.dim + j]
    }
}

#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<Complex<T>>>,
}

/// `⟨a|b⟩` with the conjugate on the left.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

pub(crate) fn hermitian_tolerance<T: Real>() -> T {
    c::<T>(1e-12).max(T::epsilon() * c(64.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn hermitian_flag_is_checked() {
        let m = OperatorMatrix::from_entries(2, vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(2.0, 0.0)])
            .unwrap()
            .assert_hermitian()
            .unwrap();
        assert!(m.is_hermitian());
        let bad = OperatorMatrix::from_entries(2, vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, 1.0), c64(2.0, 0.0)]).unwrap();
        assert!(matches!(bad.assert_hermitian(), Err(Error::Numeric(_))));
    }

    #[test]
    fn commutator_of_paulis() {
        let sx = OperatorMatrix::from_entries(2, vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let sy = OperatorMatrix::from_entries(2, vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)]).unwrap();
        let sz = OperatorMatrix::diagonal(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let comm = sx.commutator(&sy).unwrap();
        let expect = sz.scale(c64(0.0, 2.0));
        assert!(comm.sub(&expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn complex_hermitian_eigen_via_embedding() {
        // sigma_y has eigenvalues -1, +1.
        let sy = OperatorMatrix::from_entries(2, vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
            .unwrap()
            .assert_hermitian()
            .unwrap();
        let eig = sy.eigh().unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-13);
        assert!((eig.values[1] - 1.0).abs() < 1e-13);
        for (k, v) in eig.vectors.iter().enumerate() {
            let hv = sy.apply(v).unwrap();
            for (a, b) in hv.iter().zip(v) {
                assert!((*a - *b * eig.values[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = OperatorMatrix::<f64>::zeros(2);
        let b = OperatorMatrix::<f64>::zeros(3);
        assert!(matches!(a.matmul(&b), Err(Error::InvalidArgument(_))));
    }
}
