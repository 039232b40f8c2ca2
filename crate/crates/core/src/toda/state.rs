//! Lattice state, flow equations and Lax matrices.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::linalg::OperatorMatrix;
use crate::scalar::{c, Real};

/// How the chain ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// No bonds beyond the first and last site.
    #[default]
    Open,
    /// A window cut out of an infinite chain whose far field is the relaxed
    /// state `J = 1/2, h = 0`. The flow treats the two missing edge bonds as
    /// frozen at `1/2`.
    InfiniteTruncated,
}

/// Couplings `J_n` on the `N − 1` bonds and fields `h_n` on the `N` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct TodaState<T> {
    couplings: Vec<T>,
    fields: Vec<T>,
    boundary: Boundary,
}

impl<T: Real> TodaState<T> {
    pub fn new(couplings: Vec<T>, fields: Vec<T>, boundary: Boundary) -> Result<Self> {
        if fields.len() < 2 {
            return Err(invalid(format!("need at least 2 sites, got {}", fields.len())));
        }
        if couplings.len() + 1 != fields.len() {
            return Err(invalid(format!(
                "{} sites need {} couplings, got {}",
                fields.len(),
                fields.len() - 1,
                couplings.len()
            )));
        }
        if couplings.iter().chain(&fields).any(|v| !v.is_finite()) {
            return Err(invalid("non-finite coupling or field"));
        }
        Ok(Self { couplings, fields, boundary })
    }

    pub fn open(couplings: Vec<T>, fields: Vec<T>) -> Result<Self> {
        Self::new(couplings, fields, Boundary::Open)
    }

    /// Uniform chain: every coupling `j`, every field `h`.
    pub fn uniform(sites: usize, j: T, h: T, boundary: Boundary) -> Result<Self> {
        Self::new(vec![j; sites.saturating_sub(1)], vec![h; sites], boundary)
    }

    /// From Flaschka variables: `J_n = a_n`, `h_n = −b_n`.
    pub fn from_flaschka(a: Vec<T>, b: &[T], boundary: Boundary) -> Result<Self> {
        Self::new(a, b.iter().map(|&v| -v).collect(), boundary)
    }

    pub fn flaschka(&self) -> (Vec<T>, Vec<T>) {
        (self.couplings.clone(), self.fields.iter().map(|&v| -v).collect())
    }

    pub fn sites(&self) -> usize {
        self.fields.len()
    }

    pub fn couplings(&self) -> &[T] {
        &self.couplings
    }

    pub fn fields(&self) -> &[T] {
        &self.fields
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Coupling across the missing edge bonds.
    pub fn edge_coupling(&self) -> T {
        match self.boundary {
            Boundary::Open => T::zero(),
            Boundary::InfiniteTruncated => c(0.5),
        }
    }

    /// `Σ h_n`, conserved under the open flow.
    pub fn trace(&self) -> T {
        self.fields.iter().copied().sum()
    }

    /// `tr L² = Σ h_n² + 2 Σ J_n²`, conserved under the open flow.
    pub fn trace_sq(&self) -> T {
        self.fields.iter().map(|&h| h * h).sum::<T>()
            + c::<T>(2.0) * self.couplings.iter().map(|&j| j * j).sum::<T>()
    }

    /// How far the window edges are from the relaxed far field
    /// (`max |J − 1/2|, |h|` at both ends); zero by definition when open.
    pub fn edge_defect(&self) -> T {
        if self.boundary == Boundary::Open {
            return T::zero();
        }
        let half: T = c(0.5);
        let n = self.sites();
        let (j0, j1) = (self.couplings[0], self.couplings[n - 2]);
        [(j0 - half).abs(), (j1 - half).abs(), self.fields[0].abs(), self.fields[n - 1].abs()]
            .into_iter()
            .fold(T::zero(), T::max)
    }

    /// `max |h| + 2 max J`, an upper bound on the spectral radius of `L`.
    pub fn spectral_bound(&self) -> T {
        let h = self.fields.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let j = self
            .couplings
            .iter()
            .fold(self.edge_coupling(), |m, v| m.max(v.abs()));
        h + c::<T>(2.0) * j
    }

    pub(crate) fn max_abs(&self) -> T {
        self.couplings
            .iter()
            .chain(&self.fields)
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub(crate) fn axpy(&self, s: T, rate: &TodaRate<T>) -> Self {
        Self {
            couplings: self.couplings.iter().zip(&rate.dj).map(|(&j, &d)| j + s * d).collect(),
            fields: self.fields.iter().zip(&rate.dh).map(|(&h, &d)| h + s * d).collect(),
            boundary: self.boundary,
        }
    }
}

/// Time derivative of a [`TodaState`].
#[derive(Debug, Clone, PartialEq)]
pub struct TodaRate<T> {
    pub dj: Vec<T>,
    pub dh: Vec<T>,
}

impl<T: Real> TodaRate<T> {
    /// Centred difference `(s_plus − s_minus) / (2 eps)`.
    pub fn centered(plus: &TodaState<T>, minus: &TodaState<T>, eps: T) -> Result<Self> {
        if plus.sites() != minus.sites() {
            return Err(invalid("states of different length"));
        }
        let two_eps = eps + eps;
        let diff = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| (x - y) / two_eps).collect();
        Ok(Self {
            dj: diff(plus.couplings(), minus.couplings()),
            dh: diff(plus.fields(), minus.fields()),
        })
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            dj: self.dj.iter().map(|&v| v * s).collect(),
            dh: self.dh.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.dj.iter().chain(&self.dh).fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// `dJ_n/dt = J_n (h_{n+1} − h_n)`, `dh_n/dt = 2 (J_n² − J_{n−1}²)`.
pub fn toda_rhs<T: Real>(s: &TodaState<T>) -> TodaRate<T> {
    let (j, h) = (s.couplings(), s.fields());
    let edge = s.edge_coupling();
    let two: T = c(2.0);
    let dj = j.iter().enumerate().map(|(n, &jn)| jn * (h[n + 1] - h[n])).collect();
    let dh = (0..h.len())
        .map(|n| {
            let right = if n < j.len() { j[n] } else { edge };
            let left = if n > 0 { j[n - 1] } else { edge };
            two * (right * right - left * left)
        })
        .collect();
    TodaRate { dj, dh }
}

/// Lax pair: `L = tridiag(J; h; J)` (the single-flip matrix of the
/// adiabatic Hamiltonian) and `M` with `+J` above and `−J` below the
/// diagonal, so that `dL/dt = [M, L]` and `M = −i H_cd`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxPairMatrices<T> {
    pub l: OperatorMatrix<T>,
    pub m: OperatorMatrix<T>,
}

pub fn lax_matrices<T: Real>(s: &TodaState<T>) -> LaxPairMatrices<T> {
    let n = s.sites();
    let mut l = OperatorMatrix::zeros(n);
    let mut m = OperatorMatrix::zeros(n);
    for (i, &h) in s.fields().iter().enumerate() {
        l[(i, i)] = Complex::new(h, T::zero());
    }
    for (i, &j) in s.couplings().iter().enumerate() {
        l[(i, i + 1)] = Complex::new(j, T::zero());
        l[(i + 1, i)] = Complex::new(j, T::zero());
        m[(i, i + 1)] = Complex::new(j, T::zero());
        m[(i + 1, i)] = Complex::new(-j, T::zero());
    }
    let l = l.assert_hermitian().expect("symmetric by construction");
    LaxPairMatrices { l, m }
}

/// Tridiagonal `L` as a real symmetric matrix, ready for the QL solver.
pub fn lax_tridiagonal<T: Real>(s: &TodaState<T>) -> crate::linalg::eigen::SymTridiagonal<T> {
    crate::linalg::eigen::SymTridiagonal::new(s.fields().to_vec(), s.couplings().to_vec())
        .expect("lengths checked at construction")
}

/// Ascending eigenvalues of `L`.
pub fn lax_spectrum<T: Real>(s: &TodaState<T>) -> Result<Vec<T>> {
    lax_tridiagonal(s).eigenvalues()
}

/// `‖dL/dt − [M, L]‖_F` given the state and its time derivative.
pub fn lax_residual<T: Real>(s: &TodaState<T>, rate: &TodaRate<T>) -> Result<T> {
    let LaxPairMatrices { l, m } = lax_matrices(s);
    let mut dl = OperatorMatrix::zeros(s.sites());
    for (i, &d) in rate.dh.iter().enumerate() {
        dl[(i, i)] = Complex::new(d, T::zero());
    }
    for (i, &d) in rate.dj.iter().enumerate() {
        dl[(i, i + 1)] = Complex::new(d, T::zero());
        dl[(i + 1, i)] = Complex::new(d, T::zero());
    }
    Ok(dl.sub(&m.commutator(&l)?)?.frobenius_norm())
}
