//! One- and two-flip sectors of the isotropic XY chain.
//!
//! Under the Jordan–Wigner map the chain is a free-fermion hopping model, so
//! the single-flip sector is the one-body matrix itself and the double-flip
//! sector is its antisymmetric two-particle lift. The constant `−½ Σ h_n`
//! (from `σᶻ = 2 f†f − 1`) is dropped everywhere.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{invalid, Result};
use crate::linalg::{CsrMatrix, OperatorMatrix};
use crate::scalar::Real;
use crate::toda::{TodaRate, TodaState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    SingleFlip,
    DoubleFlip,
}

impl Sector {
    pub fn dim(self, sites: usize) -> usize {
        match self {
            Sector::SingleFlip => sites,
            Sector::DoubleFlip => sites * sites.saturating_sub(1) / 2,
        }
    }

    /// Basis labels in storage order: sites `n`, or pairs `(m, n)` with
    /// `m < n` in lexicographic order. Zero-based.
    pub fn labels(self, sites: usize) -> Vec<BasisLabel> {
        match self {
            Sector::SingleFlip => (0..sites).map(BasisLabel::Site).collect(),
            Sector::DoubleFlip => (0..sites)
                .flat_map(|m| (m + 1..sites).map(move |n| BasisLabel::Pair(m, n)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    Site(usize),
    Pair(usize, usize),
}

/// Index of the pair `(m, n)`, `m < n`, in the double-flip basis.
pub fn pair_index(m: usize, n: usize, sites: usize) -> usize {
    debug_assert!(m < n && n < sites);
    m * sites - m * (m + 1) / 2 + (n - m - 1)
}

/// Sector matrices of `H_ad` and `H_cd` for given couplings.
#[derive(Debug, Clone)]
pub struct SectorMatrixSet<T> {
    pub sector: Sector,
    pub h_ad: CsrMatrix<T>,
    pub h_cd: CsrMatrix<T>,
    pub basis_labels: Vec<BasisLabel>,
}

/// One-body (single-flip) matrix of
/// `Σ (t_n f†_n f_{n+1} + h.c.) + Σ h_n f†_n f_n`, with `t_n = upper[n]`.
pub fn one_body_matrix<T: Real>(fields: &[T], upper: &[Complex<T>]) -> Result<OperatorMatrix<T>> {
    if upper.len() + 1 != fields.len() {
        return Err(invalid(format!(
            "{} sites need {} hoppings, got {}",
            fields.len(),
            fields.len() - 1,
            upper.len()
        )));
    }
    let n = fields.len();
    let mut m = OperatorMatrix::zeros(n);
    for (i, &h) in fields.iter().enumerate() {
        m[(i, i)] = Complex::new(h, T::zero());
    }
    for (i, &t) in upper.iter().enumerate() {
        m[(i, i + 1)] = t;
        m[(i + 1, i)] = t.conj();
    }
    m.assert_hermitian()
}

/// `H_ad`: hopping `J_n`, fields `h_n`.
pub fn adiabatic_one_body<T: Real>(s: &TodaState<T>) -> OperatorMatrix<T> {
    let upper: Vec<_> = s.couplings().iter().map(|&j| Complex::new(j, T::zero())).collect();
    one_body_matrix(s.fields(), &upper).expect("lengths checked at construction")
}

/// `H_cd = i Σ J_n (f†_n f_{n+1} − f†_{n+1} f_n)`.
pub fn counterdiabatic_one_body<T: Real>(s: &TodaState<T>) -> OperatorMatrix<T> {
    let upper: Vec<_> = s.couplings().iter().map(|&j| Complex::new(T::zero(), j)).collect();
    one_body_matrix(&vec![T::zero(); s.sites()], &upper).expect("lengths checked at construction")
}

/// One-body matrix of `dH_ad/dt` for a state rate.
pub fn rate_one_body<T: Real>(rate: &TodaRate<T>) -> Result<OperatorMatrix<T>> {
    let upper: Vec<_> = rate.dj.iter().map(|&j| Complex::new(j, T::zero())).collect();
    one_body_matrix(&rate.dh, &upper)
}

/// Antisymmetric two-particle lift of a one-body operator
/// `O = Σ o_ij f†_i f_j` onto `span{f†_m f†_n |0⟩ : m < n}`.
pub fn two_particle_lift<T: Real>(one: &OperatorMatrix<T>) -> Result<CsrMatrix<T>> {
    let n = one.dim();
    let dim = Sector::DoubleFlip.dim(n);
    let mut triplets = Vec::new();
    for m in 0..n {
        for q in m + 1..n {
            let col = pair_index(m, q, n);
            for i in 0..n {
                // f†_i f_m moves the particle at m; f†_i f_q the one at q.
                let om = one[(i, m)];
                if !om.is_zero() && i != q {
                    let (row, sign) = ordered::<T>(i, q, n);
                    triplets.push((row, col, om * sign));
                }
                let oq = one[(i, q)];
                if !oq.is_zero() && i != m {
                    let (row, sign) = ordered::<T>(m, i, n);
                    triplets.push((row, col, oq * sign));
                }
            }
        }
    }
    CsrMatrix::from_triplets(dim, triplets)
}

/// Index of `f†_a f†_b |0⟩` and the sign from reordering it to `a < b`.
fn ordered<T: Real>(a: usize, b: usize, n: usize) -> (usize, T) {
    if a < b {
        (pair_index(a, b, n), T::one())
    } else {
        (pair_index(b, a, n), -T::one())
    }
}

pub(crate) fn to_csr<T: Real>(m: &OperatorMatrix<T>) -> CsrMatrix<T> {
    let n = m.dim();
    let triplets = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !m[(i, j)].is_zero())
        .map(|(i, j)| (i, j, m[(i, j)]))
        .collect();
    CsrMatrix::from_triplets(n, triplets).expect("indices in range")
}

/// Any one-body operator expressed in a sector.
pub fn sector_operator<T: Real>(one: &OperatorMatrix<T>, sector: Sector) -> Result<CsrMatrix<T>> {
    match sector {
        Sector::SingleFlip => Ok(to_csr(one)),
        Sector::DoubleFlip => two_particle_lift(one),
    }
}

pub fn build_sector<T: Real>(s: &TodaState<T>, sector: Sector) -> Result<SectorMatrixSet<T>> {
    if sector == Sector::DoubleFlip && s.sites() < 2 {
        return Err(invalid("double-flip sector needs at least 2 sites"));
    }
    Ok(SectorMatrixSet {
        sector,
        h_ad: sector_operator(&adiabatic_one_body(s), sector)?,
        h_cd: sector_operator(&counterdiabatic_one_body(s), sector)?,
        basis_labels: sector.labels(s.sites()),
    })
}
