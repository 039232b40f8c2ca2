//! Real symmetric eigensolvers.
//!
//! Dense matrices are reduced to tridiagonal form by Householder
//! reflections; the tridiagonal problem is solved by the implicit QL
//! iteration with Wilkinson-type shifts. Selected eigenvectors come from
//! inverse iteration on the tridiagonal matrix followed by back-transformation,
//! which keeps "lowest few levels of a 1024-point grid" cheap.

use crate::error::{invalid, Error, Result};
use crate::scalar::{c, Real};

const MAX_QL_SWEEPS: usize = 60;

/// Symmetric tridiagonal matrix: `diag` has length n, `off` length n-1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(invalid(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let mut d = self.diag.clone();
        let mut e = self.padded_off();
        ql_implicit(&mut d, &mut e, None)?;
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(d)
    }

    /// Full eigen-decomposition.
    pub fn eigen(&self) -> Result<SymmetricEigen<T>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.padded_off();
        let mut z = vec![T::zero(); n * n];
        for i in 0..n {
            z[i * n + i] = T::one();
        }
        ql_implicit(&mut d, &mut e, Some(&mut z))?;
        Ok(SymmetricEigen::from_unsorted(d, &z, n))
    }

    /// Eigenvector for an (accurate) eigenvalue by inverse iteration,
    /// orthogonalized against `against`.
    fn inverse_iteration(&self, lambda: T, against: &[Vec<T>]) -> Result<Vec<T>> {
        let n = self.dim();
        if n == 1 {
            return Ok(vec![T::one()]);
        }
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(T::zero(), |m, &v| m.max(v.abs()))
            .max(T::min_positive_value());
        let shift = lambda + scale * T::epsilon() * c(4.0);
        let mut x: Vec<T> = (0..n)
            .map(|i| T::one() + c::<T>(0.1) * T::lit(((i * 7919) % 101) as f64 / 101.0))
            .collect();
        normalize(&mut x);
        for _ in 0..4 {
            let mut y = solve_shifted_tridiagonal(&self.diag, &self.off, shift, &x);
            for v in against {
                let dot: T = v.iter().zip(&y).map(|(&a, &b)| a * b).sum();
                for (yi, &vi) in y.iter_mut().zip(v) {
                    *yi = *yi - dot * vi;
                }
            }
            let nrm = norm(&y);
            if !nrm.is_finite() || nrm == T::zero() {
                return Err(Error::Numeric("inverse iteration broke down".into()));
            }
            for yi in y.iter_mut() {
                *yi = *yi / nrm;
            }
            x = y;
        }
        Ok(x)
    }

    fn padded_off(&self) -> Vec<T> {
        let mut e = self.off.clone();
        e.push(T::zero());
        e
    }
}

/// Eigenvalues ascending, eigenvectors stored column-major (`n` rows, one
/// column per retained level).
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    vectors: Vec<T>,
    n: usize,
}

impl<T: Real> SymmetricEigen<T> {
    fn from_unsorted(values: Vec<T>, z_row_major: &[T], n: usize) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let mut vectors = Vec::with_capacity(n * order.len());
        for &k in &order {
            for i in 0..n {
                vectors.push(z_row_major[i * n + k]);
            }
        }
        Self {
            values: order.iter().map(|&k| values[k]).collect(),
            vectors,
            n,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> &[T] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }
}

/// Householder reflectors produced by [`tridiagonalize`].
pub struct Reflectors<T> {
    n: usize,
    /// `(beta, v)` for reflector k acting on rows `k+1..n`.
    list: Vec<(T, Vec<T>)>,
}

impl<T: Real> Reflectors<T> {
    /// Maps an eigenvector of the tridiagonal matrix back to the original basis.
    pub fn back_transform(&self, y: &mut [T]) {
        debug_assert_eq!(y.len(), self.n);
        for (k, (beta, v)) in self.list.iter().enumerate().rev() {
            if *beta == T::zero() {
                continue;
            }
            let tail = &mut y[k + 1..];
            let dot: T = v.iter().zip(tail.iter()).map(|(&a, &b)| a * b).sum();
            let s = *beta * dot;
            for (yi, &vi) in tail.iter_mut().zip(v) {
                *yi = *yi - s * vi;
            }
        }
    }
}

/// Reduces a real symmetric row-major matrix to tridiagonal form.
pub fn tridiagonalize<T: Real>(mut a: Vec<T>, n: usize) -> Result<(SymTridiagonal<T>, Reflectors<T>)> {
    if a.len() != n * n || n == 0 {
        return Err(invalid("tridiagonalize: matrix shape mismatch"));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite matrix entry".into()));
    }
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n.saturating_sub(1)];
    let mut list = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![T::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: Vec<T> = (0..m).map(|i| a[(k + 1 + i) * n + k]).collect();
        let xnorm = norm(&v);
        if xnorm == T::zero() {
            diag[k] = a[k * n + k];
            off[k] = T::zero();
            list.push((T::zero(), v));
            continue;
        }
        let alpha = if v[0] >= T::zero() { -xnorm } else { xnorm };
        v[0] = v[0] - alpha;
        let vv: T = v.iter().map(|&x| x * x).sum();
        let beta = c::<T>(2.0) / vv;
        diag[k] = a[k * n + k];
        off[k] = alpha;
        // p = beta * A22 v ; w = p - (beta/2)(p.v) v ; A22 -= v w^T + w v^T
        let base = k + 1;
        for i in 0..m {
            let row = &a[(base + i) * n + base..(base + i) * n + n];
            p[i] = beta * row.iter().zip(&v).map(|(&x, &y)| x * y).sum::<T>();
        }
        let pv: T = p[..m].iter().zip(&v).map(|(&x, &y)| x * y).sum();
        let half = beta * pv * c(0.5);
        for i in 0..m {
            p[i] = p[i] - half * v[i];
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(base + i) * n + base..(base + i) * n + n];
            for j in 0..m {
                row[j] = row[j] - vi * p[j] - wi * v[j];
            }
        }
        list.push((beta, v));
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + (n - 2)];
        off[n - 2] = a[(n - 1) * n + (n - 2)];
    }
    diag[n - 1] = a[(n - 1) * n + (n - 1)];
    Ok((SymTridiagonal { diag, off }, Reflectors { n, list }))
}

/// All eigenvalues (ascending) of a real symmetric row-major matrix.
pub fn symmetric_eigenvalues<T: Real>(a: Vec<T>, n: usize) -> Result<Vec<T>> {
    let (tri, _) = tridiagonalize(a, n)?;
    tri.eigenvalues()
}

/// Full eigen-decomposition of a real symmetric row-major matrix.
pub fn symmetric_eigen<T: Real>(a: Vec<T>, n: usize) -> Result<SymmetricEigen<T>> {
    let (tri, refl) = tridiagonalize(a, n)?;
    let mut d = tri.diag.clone();
    let mut e = tri.padded_off();
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    ql_implicit(&mut d, &mut e, Some(&mut z))?;
    let eig = SymmetricEigen::from_unsorted(d, &z, n);
    let mut vectors = eig.vectors;
    for col in vectors.chunks_mut(n) {
        refl.back_transform(col);
    }
    Ok(SymmetricEigen {
        values: eig.values,
        vectors,
        n,
    })
}

/// The `count` lowest eigenpairs of a real symmetric row-major matrix.
pub fn symmetric_lowest<T: Real>(a: Vec<T>, n: usize, count: usize) -> Result<SymmetricEigen<T>> {
    if count > n {
        return Err(invalid(format!("requested {count} levels of a {n}-dimensional matrix")));
    }
    let (tri, refl) = tridiagonalize(a, n)?;
    let values: Vec<T> = tri.eigenvalues()?.into_iter().take(count).collect();
    let cluster_tol = c::<T>(1e-10)
        * values
            .iter()
            .fold(T::one(), |m, &v| m.max(v.abs()));
    let mut tri_vectors: Vec<Vec<T>> = Vec::with_capacity(count);
    for (k, &lam) in values.iter().enumerate() {
        let cluster: Vec<Vec<T>> = (0..k)
            .filter(|&j| (values[j] - lam).abs() < cluster_tol.max(c(1e-9)))
            .map(|j| tri_vectors[j].clone())
            .collect();
        tri_vectors.push(tri.inverse_iteration(lam, &cluster)?);
    }
    let mut vectors = Vec::with_capacity(n * count);
    for mut y in tri_vectors {
        refl.back_transform(&mut y);
        vectors.extend(y);
    }
    Ok(SymmetricEigen { values, vectors, n })
}

/// Implicit QL on a symmetric tridiagonal matrix. `e[i]` couples `i` and
/// `i+1`, with `e[n-1] == 0`. When `z` (row-major n×n) is given, the
/// rotations are accumulated into its columns.
fn ql_implicit<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut [T]>) -> Result<()> {
    let n = d.len();
    let two = c::<T>(2.0);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Numeric("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
            let (mut s, mut cs, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = cs * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                cs = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * cs * b;
                p = s * r;
                d[i + 1] = g + p;
                g = cs * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zk = &mut z[k * n..(k + 1) * n];
                        let f = zk[i + 1];
                        zk[i + 1] = s * zk[i] + cs * f;
                        zk[i] = cs * zk[i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Solves `(T - shift) x = b` by Gaussian elimination with partial pivoting
/// on the tridiagonal band. Zero pivots are nudged to keep inverse iteration
/// well defined.
fn solve_shifted_tridiagonal<T: Real>(diag: &[T], off: &[T], shift: T, b: &[T]) -> Vec<T> {
    let n = diag.len();
    let tiny = T::epsilon() * c(1e-3);
    // Row i holds entries at columns i, i+1, i+2 after pivoting.
    let mut a0: Vec<T> = diag.iter().map(|&d| d - shift).collect();
    let mut a1: Vec<T> = off.to_vec();
    a1.push(T::zero());
    let mut a2 = vec![T::zero(); n];
    let mut sub: Vec<T> = off.to_vec();
    let mut rhs = b.to_vec();
    for i in 0..n - 1 {
        if sub[i].abs() > a0[i].abs() {
            // swap rows i and i+1
            let (r0, r1, r2) = (a0[i], a1[i], a2[i]);
            a0[i] = sub[i];
            a1[i] = a0[i + 1];
            a2[i] = a1[i + 1];
            rhs.swap(i, i + 1);
            let factor = r0 / a0[i];
            a0[i + 1] = r1 - factor * a1[i];
            a1[i + 1] = r2 - factor * a2[i];
            rhs[i + 1] = rhs[i + 1] - factor * rhs[i];
            sub[i] = factor;
        } else {
            if a0[i] == T::zero() {
                a0[i] = tiny;
            }
            let factor = sub[i] / a0[i];
            a0[i + 1] = a0[i + 1] - factor * a1[i];
            rhs[i + 1] = rhs[i + 1] - factor * rhs[i];
            sub[i] = factor;
        }
    }
    if a0[n - 1] == T::zero() {
        a0[n - 1] = tiny;
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        if i + 1 < n {
            acc = acc - a1[i] * x[i + 1];
        }
        if i + 2 < n {
            acc = acc - a2[i] * x[i + 2];
        }
        x[i] = acc / a0[i];
    }
    x
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

fn normalize<T: Real>(v: &mut [T]) {
    let n = norm(v);
    for x in v.iter_mut() {
        *x = *x / n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        a
    }

    fn residual(a: &[f64], n: usize, lam: f64, v: &[f64]) -> f64 {
        (0..n)
            .map(|i| {
                let av: f64 = (0..n).map(|j| a[i * n + j] * v[j]).sum();
                (av - lam * v[i]).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn full_decomposition_satisfies_eigen_equation() {
        let n = 40;
        let a = random_symmetric(n, 7);
        let eig = symmetric_eigen(a.clone(), n).unwrap();
        for k in 0..n {
            assert!(residual(&a, n, eig.values[k], eig.vector(k)) < 1e-12);
        }
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        let sum: f64 = eig.values.iter().sum();
        assert!((trace - sum).abs() < 1e-12);
    }

    #[test]
    fn lowest_levels_match_full_solver() {
        let n = 60;
        let a = random_symmetric(n, 11);
        let full = symmetric_eigen(a.clone(), n).unwrap();
        let low = symmetric_lowest(a.clone(), n, 5).unwrap();
        for k in 0..5 {
            assert!((full.values[k] - low.values[k]).abs() < 1e-12);
            assert!(residual(&a, n, low.values[k], low.vector(k)) < 1e-11);
        }
    }

    #[test]
    fn degenerate_levels_get_orthogonal_vectors() {
        // diag(1, 1, 2) rotated: a doubly degenerate level.
        let n = 3;
        let a = vec![1.5, 0.5, 0.0, 0.5, 1.5, 0.0, 0.0, 0.0, 1.0];
        let low = symmetric_lowest::<f64>(a.clone(), n, 2).unwrap();
        assert!((low.values[0] - 1.0).abs() < 1e-14);
        assert!((low.values[1] - 1.0).abs() < 1e-14);
        let dot: f64 = low.vector(0).iter().zip(low.vector(1)).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-10);
    }

    #[test]
    fn free_chain_tridiagonal_spectrum() {
        // tridiag(0, 1) of size n has eigenvalues 2 cos(k pi / (n+1)).
        let n = 25;
        let tri = SymTridiagonal::new(vec![0.0; n], vec![1.0; n - 1]).unwrap();
        let vals = tri.eigenvalues().unwrap();
        let mut expect: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in vals.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn f32_path_works() {
        let tri = SymTridiagonal::<f32>::new(vec![1.0, 2.0, 3.0], vec![0.5, 0.25]).unwrap();
        let eig = tri.eigen().unwrap();
        let sum: f32 = eig.values.iter().sum();
        assert!((sum - 6.0).abs() < 1e-5);
    }

    #[test]
    fn shape_errors() {
        assert!(SymTridiagonal::<f64>::new(vec![1.0], vec![1.0]).is_err());
        assert!(symmetric_lowest(vec![1.0], 1, 2).is_err());
    }
}
