//! Sector spectra along a coupling schedule.

use super::sector::{pair_index, Sector};
use crate::error::{invalid, Result};
use crate::linalg::eigen::SymmetricEigen;
use crate::scalar::Real;
use crate::toda::{lax_tridiagonal, TodaState};

/// Single-flip eigenpairs (eigenvalues ascending, real eigenvectors).
pub fn single_flip_eigen<T: Real>(s: &TodaState<T>) -> Result<SymmetricEigen<T>> {
    lax_tridiagonal(s).eigen()
}

/// Double-flip levels as `(ε_a + ε_b, a, b)` with `a < b`, ascending.
pub fn pair_levels<T: Real>(single: &[T]) -> Vec<(T, usize, usize)> {
    let n = single.len();
    let mut out: Vec<_> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| (single[a] + single[b], a, b))
        .collect();
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    out
}

/// Ascending sector eigenvalues. The double-flip sector uses the exact
/// free-fermion structure (pairwise sums of distinct single-flip levels)
/// instead of diagonalizing the `N(N−1)/2` matrix.
pub fn sector_spectrum<T: Real>(s: &TodaState<T>, sector: Sector) -> Result<Vec<T>> {
    let single = lax_tridiagonal(s).eigenvalues()?;
    Ok(match sector {
        Sector::SingleFlip => single,
        Sector::DoubleFlip => pair_levels(&single).into_iter().map(|l| l.0).collect(),
    })
}

/// Slater eigenvector `φ_a(m) φ_b(n) − φ_a(n) φ_b(m)` in the pair basis.
pub fn pair_eigenvector<T: Real>(eig: &SymmetricEigen<T>, a: usize, b: usize) -> Vec<T> {
    let pa = eig.vector(a);
    let pb = eig.vector(b);
    let n = pa.len();
    let mut out = vec![T::zero(); Sector::DoubleFlip.dim(n)];
    for m in 0..n {
        for q in m + 1..n {
            out[pair_index(m, q, n)] = pa[m] * pb[q] - pa[q] * pb[m];
        }
    }
    out
}

/// A run of eigenvalues with no internal gap wider than the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band<T> {
    pub lo: T,
    pub hi: T,
    pub count: usize,
}

impl<T: Real> Band<T> {
    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// Splits an ascending spectrum wherever consecutive levels are more than
/// `gap` apart.
pub fn band_structure<T: Real>(sorted: &[T], gap: T) -> Vec<Band<T>> {
    let mut bands: Vec<Band<T>> = Vec::new();
    for &e in sorted {
        match bands.last_mut() {
            Some(b) if e - b.hi <= gap => {
                b.hi = e;
                b.count += 1;
            }
            _ => bands.push(Band { lo: e, hi: e, count: 1 }),
        }
    }
    bands
}

#[derive(Debug, Clone)]
pub struct SpectrumFlow<T> {
    pub sector: Sector,
    pub times: Vec<T>,
    /// Ascending eigenvalues per time.
    pub eigenvalues: Vec<Vec<T>>,
    pub bands: Vec<Vec<Band<T>>>,
    /// `max_t max_k |E_k(t) − E_k(t_0)|`.
    pub max_drift: T,
}

pub fn spectrum_flow<T: Real>(
    times: &[T],
    states: &[TodaState<T>],
    sector: Sector,
    band_gap: T,
) -> Result<SpectrumFlow<T>> {
    if times.len() != states.len() || times.len() < 2 {
        return Err(invalid("need at least two (time, state) samples of equal count"));
    }
    let eigenvalues = states
        .iter()
        .map(|s| sector_spectrum(s, sector))
        .collect::<Result<Vec<_>>>()?;
    let first = &eigenvalues[0];
    let mut max_drift = T::zero();
    for ev in &eigenvalues {
        if ev.len() != first.len() {
            return Err(invalid("schedule changes the number of sites"));
        }
        for (a, b) in ev.iter().zip(first) {
            max_drift = max_drift.max((*a - *b).abs());
        }
    }
    let bands = eigenvalues.iter().map(|ev| band_structure(ev, band_gap)).collect();
    Ok(SpectrumFlow { sector, times: times.to_vec(), eigenvalues, bands, max_drift })
}
