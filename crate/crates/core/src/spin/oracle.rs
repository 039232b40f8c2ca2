//! Independent checks of the Toda counterdiabatic term: the spectral
//! (eigenvector) construction, the invariant residual, and the diagonal
//! gauge linking it to the inverse-engineered chain.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex;

use super::sector::{
    adiabatic_one_body, counterdiabatic_one_body, one_body_matrix, rate_one_body, sector_operator,
    Sector,
};
use crate::error::{Error, Result};
use crate::linalg::OperatorMatrix;
use crate::scalar::{c, from_usize, Real};
use crate::toda::{TodaRate, TodaState};

/// Levels closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Single-flip `H_cd = i Σ_{m≠n} |m⟩⟨m|∂ₜH|n⟩⟨n| / (E_n − E_m)` from the
/// instantaneous eigenvectors. Degenerate pairs contribute nothing as long
/// as `∂ₜH` does not couple them; otherwise the construction does not exist.
pub fn spectral_cd_oracle<T: Real>(s: &TodaState<T>, rate: &TodaRate<T>) -> Result<OperatorMatrix<T>> {
    let h = adiabatic_one_body(s);
    let dh = rate_one_body(rate)?;
    let eig = h.eigh()?;
    let n = h.dim();
    let dh_eig = in_basis(&dh, &eig.vectors)?;
    let tol: T = c(DEGENERACY_TOL);
    let scale = dh.max_abs().max(T::one());
    let mut k = OperatorMatrix::zeros(n);
    for m in 0..n {
        for q in 0..n {
            if m == q {
                continue;
            }
            let gap = eig.values[q] - eig.values[m];
            let elem = dh_eig[(m, q)];
            if gap.abs() < tol {
                if elem.norm() > tol * scale {
                    return Err(Error::DegenerateSpectrum(format!(
                        "levels {m} and {q} are degenerate but coupled by dH/dt"
                    )));
                }
                continue;
            }
            k[(m, q)] = elem * Complex::new(T::zero(), T::one() / gap);
        }
    }
    from_basis(&k, &eig.vectors)?.assert_hermitian()
}

/// `V† A V` for eigenvectors `V` (columns).
fn in_basis<T: Real>(a: &OperatorMatrix<T>, v: &[Vec<Complex<T>>]) -> Result<OperatorMatrix<T>> {
    let vm = columns(v);
    vm.adjoint().matmul(a)?.matmul(&vm)
}

fn from_basis<T: Real>(a: &OperatorMatrix<T>, v: &[Vec<Complex<T>>]) -> Result<OperatorMatrix<T>> {
    let vm = columns(v);
    vm.matmul(a)?.matmul(&vm.adjoint())
}

fn columns<T: Real>(v: &[Vec<Complex<T>>]) -> OperatorMatrix<T> {
    OperatorMatrix::from_fn(v.len(), |i, k| v[k][i])
}

/// Largest off-diagonal element of `V†(A − B)V` in the eigenbasis `V` of
/// `H_ad(s)` — the part of two counterdiabatic terms that must agree.
pub fn eigenbasis_offdiagonal_distance<T: Real>(
    a: &OperatorMatrix<T>,
    b: &OperatorMatrix<T>,
    s: &TodaState<T>,
) -> Result<T> {
    let eig = adiabatic_one_body(s).eigh()?;
    let d = in_basis(&a.sub(b)?, &eig.vectors)?;
    let n = d.dim();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(d[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

/// `‖i dH_ad/dt − [H_cd, H_ad]‖_F / ‖H_ad‖_F` in the given sector.
pub fn invariant_residual_sector<T: Real>(
    s: &TodaState<T>,
    rate: &TodaRate<T>,
    sector: Sector,
) -> Result<T> {
    let lift = |m: &OperatorMatrix<T>| -> Result<OperatorMatrix<T>> {
        Ok(sector_operator(m, sector)?.to_dense())
    };
    let h = lift(&adiabatic_one_body(s))?;
    let k = lift(&counterdiabatic_one_body(s))?;
    let dh = lift(&rate_one_body(rate)?)?;
    let r = dh.scale(Complex::new(T::zero(), T::one())).sub(&k.commutator(&h)?)?;
    Ok(r.frobenius_norm() / h.frobenius_norm())
}

/// Single-flip form of `exp(−(i/2) Σ θ_n σᶻ_n)` with `θ_n = −n π/4`:
/// `diag(e^{−iθ_n})` up to a global phase.
pub fn theta_gauge<T: Real>(sites: usize) -> OperatorMatrix<T> {
    let step: T = c(-FRAC_PI_4);
    let d: Vec<_> = (0..sites)
        .map(|n| Complex::from_polar(T::one(), -(step * from_usize(n))))
        .collect();
    OperatorMatrix::diagonal(&d)
}

/// Inverse-engineered chain with `d_n = √2 J_n`: the Hamiltonian
/// `H = (d; h)` and its invariant `F = (a = d/2, b = −d/2, c = h)`,
/// single-flip matrices.
pub fn inverse_engineering_pair<T: Real>(s: &TodaState<T>) -> (OperatorMatrix<T>, OperatorMatrix<T>) {
    let r2 = c::<T>(2.0).sqrt();
    let hop: Vec<_> = s.couplings().iter().map(|&j| Complex::new(r2 * j, T::zero())).collect();
    let inv: Vec<_> = s
        .couplings()
        .iter()
        .map(|&j| Complex::new(j / r2, -j / r2))
        .collect();
    (
        one_body_matrix(s.fields(), &hop).expect("lengths checked at construction"),
        one_body_matrix(s.fields(), &inv).expect("lengths checked at construction"),
    )
}
