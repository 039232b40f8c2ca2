//! Sector time evolution.
//!
//! Each step applies the exact one-body propagator of a fourth-order
//! commutator-free Magnus scheme (two exponentials of Hermitian tridiagonal
//! matrices, so the step is unitary to rounding). The double-flip sector is
//! evolved through the same one-body propagator, `Ψ ↦ U Ψ Uᵀ` on the
//! antisymmetric amplitude matrix, which is exact for the free-fermion lift.

use num_complex::Complex;
use num_traits::Zero;

use super::sector::{pair_index, Sector};
use super::spectrum::single_flip_eigen;
use crate::error::{invalid, Error, Result};
use crate::linalg::eigen::SymTridiagonal;
use crate::scalar::{c, from_usize, Real};
use crate::toda::{CouplingSchedule, TodaState};

/// Largest `dt · ρ(H)` accepted; beyond it the Magnus expansion loses
/// accuracy even though every step stays unitary.
const MAX_PHASE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions<T> {
    pub with_cd: bool,
    /// The schedule is run as `s(speedup · t)`; the counterdiabatic term
    /// is scaled by the same factor.
    pub speedup: T,
    pub record_every: usize,
}

impl<T: Real> Default for EvolveOptions<T> {
    fn default() -> Self {
        Self { with_cd: true, speedup: T::one(), record_every: 1 }
    }
}

/// Instantaneous eigenstate whose occupation is tracked, by ascending index
/// of the single-flip levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackedLevel {
    Single(usize),
    /// Slater state of single-flip levels `a < b`.
    Pair(usize, usize),
}

#[derive(Debug, Clone)]
pub struct SectorEvolution<T: Real> {
    pub times: Vec<T>,
    pub occupations: Vec<T>,
    pub norms: Vec<T>,
    pub final_state: Vec<Complex<T>>,
    pub max_norm_drift: T,
}

impl<T: Real> SectorEvolution<T> {
    pub fn min_occupation(&self) -> T {
        self.occupations.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn final_occupation(&self) -> T {
        *self.occupations.last().expect("at least the initial sample")
    }
}

/// Hermitian tridiagonal one-body matrix: fields and upper hoppings.
#[derive(Debug, Clone)]
struct Tridiag<T> {
    diag: Vec<T>,
    upper: Vec<Complex<T>>,
}

impl<T: Real> Tridiag<T> {
    fn driven(s: &TodaState<T>, cd: T) -> Self {
        Self {
            diag: s.fields().to_vec(),
            upper: s.couplings().iter().map(|&j| Complex::new(j, cd * j)).collect(),
        }
    }

    fn combine(a: &Self, wa: T, b: &Self, wb: T) -> Self {
        Self {
            diag: a.diag.iter().zip(&b.diag).map(|(&x, &y)| wa * x + wb * y).collect(),
            upper: a.upper.iter().zip(&b.upper).map(|(&x, &y)| x * wa + y * wb).collect(),
        }
    }

    fn bound(&self) -> T {
        let d = self.diag.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let u = self.upper.iter().fold(T::zero(), |m, v| m.max(v.norm()));
        d + u + u
    }

    /// Row-major `exp(−i s A)`. A diagonal phase makes the hoppings real,
    /// then the real symmetric tridiagonal is diagonalized.
    fn expm(&self, s: T) -> Result<Vec<Complex<T>>> {
        let n = self.diag.len();
        let mut phase = vec![T::zero(); n];
        for k in 0..n - 1 {
            let t = self.upper[k];
            let arg = if t.is_zero() { T::zero() } else { t.arg() };
            phase[k + 1] = phase[k] - arg;
        }
        let mags = self.upper.iter().map(|t| t.norm()).collect();
        let eig = SymTridiagonal::new(self.diag.clone(), mags)?.eigen()?;
        let rot: Vec<Complex<T>> =
            eig.values.iter().map(|&l| Complex::from_polar(T::one(), -s * l)).collect();
        let mut out = vec![Complex::zero(); n * n];
        for k in 0..n {
            let v = eig.vector(k);
            for i in 0..n {
                let vi = rot[k] * v[i];
                if vi.is_zero() {
                    continue;
                }
                let row = &mut out[i * n..(i + 1) * n];
                for (o, &vj) in row.iter_mut().zip(v) {
                    *o = *o + vi * vj;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = out[i * n + j] * Complex::from_polar(T::one(), phase[i] - phase[j]);
            }
        }
        Ok(out)
    }
}

fn matmul<T: Real>(a: &[Complex<T>], b: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            let row = &mut out[i * n..(i + 1) * n];
            for (o, &bkj) in row.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                *o = *o + aik * bkj;
            }
        }
    }
    out
}

fn transpose<T: Real>(a: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

/// Pair amplitudes → antisymmetric `N × N` matrix.
fn pairs_to_matrix<T: Real>(psi: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut m = vec![Complex::zero(); n * n];
    for a in 0..n {
        for b in a + 1..n {
            let v = psi[pair_index(a, b, n)];
            m[a * n + b] = v;
            m[b * n + a] = -v;
        }
    }
    m
}

fn matrix_to_pairs<T: Real>(m: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut psi = vec![Complex::zero(); Sector::DoubleFlip.dim(n)];
    for a in 0..n {
        for b in a + 1..n {
            psi[pair_index(a, b, n)] = m[a * n + b];
        }
    }
    psi
}

fn occupation<T: Real>(
    psi: &[Complex<T>],
    s: &TodaState<T>,
    level: TrackedLevel,
) -> Result<T> {
    let n = s.sites();
    let eig = single_flip_eigen(s)?;
    let amp = match level {
        TrackedLevel::Single(k) => {
            eig.vector(k).iter().zip(psi).map(|(&v, &p)| p * v).sum::<Complex<T>>()
        }
        TrackedLevel::Pair(a, b) => {
            // Σ_{m<n} χ(m,n) ψ(m,n) with χ the Slater vector
            let (pa, pb) = (eig.vector(a), eig.vector(b));
            let mut acc = Complex::zero();
            for m in 0..n {
                for q in m + 1..n {
                    acc = acc + psi[pair_index(m, q, n)] * (pa[m] * pb[q] - pa[q] * pb[m]);
                }
            }
            acc
        }
    };
    Ok(amp.norm_sqr())
}

/// Evolves a sector state under `H_ad(s(λt))` (plus `λ H_cd` if requested)
/// from `t0` to `t1`, recording the occupation of the tracked instantaneous
/// eigenstate. Schedule times are `λ t`.
#[allow(clippy::too_many_arguments)]
pub fn evolve_sector<T: Real>(
    psi0: &[Complex<T>],
    sector: Sector,
    schedule: &mut dyn CouplingSchedule<T>,
    level: TrackedLevel,
    opts: EvolveOptions<T>,
    t0: T,
    t1: T,
    dt: T,
) -> Result<SectorEvolution<T>> {
    if !(dt > T::zero()) || !(t1 >= t0) {
        return Err(invalid("need dt > 0 and t1 ≥ t0"));
    }
    if !(opts.speedup > T::zero()) {
        return Err(invalid("speedup must be positive"));
    }
    let lambda = opts.speedup;
    let s0 = schedule.state_at(lambda * t0)?;
    let n = s0.sites();
    if psi0.len() != sector.dim(n) {
        return Err(invalid(format!(
            "state has {} amplitudes, sector needs {}",
            psi0.len(),
            sector.dim(n)
        )));
    }
    match (sector, level) {
        (Sector::SingleFlip, TrackedLevel::Single(k)) if k < n => {}
        (Sector::DoubleFlip, TrackedLevel::Pair(a, b)) if a < b && b < n => {}
        _ => return Err(invalid(format!("level {level:?} does not belong to {sector:?} on {n} sites"))),
    }
    let norm0: T = psi0.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if (norm0 - T::one()).abs() > c(1e-10) {
        return Err(invalid(format!("initial state not normalized (norm {norm0})")));
    }

    let cd = if opts.with_cd { lambda } else { T::zero() };
    let steps = ((t1 - t0) / dt).ceil().to_f64_lossy().max(1.0) as usize;
    let h = (t1 - t0) / from_usize(steps);
    let sqrt3: T = c::<T>(3.0).sqrt();
    let (c1, c2) = (c::<T>(0.5) - sqrt3 / c(6.0), c::<T>(0.5) + sqrt3 / c(6.0));
    let (b1, b2) = (c::<T>(0.25) + sqrt3 / c(6.0), c::<T>(0.25) - sqrt3 / c(6.0));

    let mut psi = psi0.to_vec();
    let every = opts.record_every.max(1);
    let mut out = SectorEvolution {
        times: vec![t0],
        occupations: vec![occupation(&psi, &s0, level)?],
        norms: vec![norm0],
        final_state: Vec::new(),
        max_norm_drift: T::zero(),
    };
    for k in 0..steps {
        let t = t0 + h * from_usize(k);
        let a1 = Tridiag::driven(&schedule.state_at(lambda * (t + c1 * h))?, cd);
        let a2 = Tridiag::driven(&schedule.state_at(lambda * (t + c2 * h))?, cd);
        let first = Tridiag::combine(&a1, b1, &a2, b2);
        let second = Tridiag::combine(&a1, b2, &a2, b1);
        if h * first.bound().max(second.bound()) > c(MAX_PHASE) {
            return Err(Error::StepSize(format!("dt = {h} too large for the sector spectrum")));
        }
        let u = matmul(&second.expm(h)?, &first.expm(h)?, n);
        psi = match sector {
            Sector::SingleFlip => (0..n)
                .map(|i| (0..n).map(|j| u[i * n + j] * psi[j]).sum())
                .collect(),
            Sector::DoubleFlip => {
                let m = pairs_to_matrix(&psi, n);
                matrix_to_pairs(&matmul(&matmul(&u, &m, n), &transpose(&u, n), n), n)
            }
        };
        if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric(format!("non-finite amplitude at t = {t}")));
        }
        let norm: T = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        out.max_norm_drift = out.max_norm_drift.max((norm - norm0).abs());
        if (k + 1) % every == 0 || k + 1 == steps {
            let tn = t0 + h * from_usize(k + 1);
            let s = schedule.state_at(lambda * tn)?;
            out.times.push(tn);
            out.occupations.push(occupation(&psi, &s, level)?);
            out.norms.push(norm);
        }
    }
    out.final_state = psi;
    Ok(out)
}

/// Eigenstate of the sector at `s` as a complex amplitude vector.
pub fn sector_eigenstate<T: Real>(s: &TodaState<T>, level: TrackedLevel) -> Result<Vec<Complex<T>>> {
    let eig = single_flip_eigen(s)?;
    let n = s.sites();
    let real = match level {
        TrackedLevel::Single(k) if k < n => eig.vector(k).to_vec(),
        TrackedLevel::Pair(a, b) if a < b && b < n => super::spectrum::pair_eigenvector(&eig, a, b),
        _ => return Err(invalid(format!("level {level:?} out of range for {n} sites"))),
    };
    Ok(real.into_iter().map(|v| Complex::new(v, T::zero())).collect())
}
