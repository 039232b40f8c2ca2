//! Spectral differential operators and Hamiltonian matrices on a grid.

use num_complex::Complex;

use super::grid::{check_finite, Grid1D};
use super::wave::Wavefunction;
use crate::error::{invalid, Result};
use crate::linalg::OperatorMatrix;
use crate::scalar::{c, Real};

/// Spectral `d^order ψ / dx^order` for `order` in `1..=5`.
pub fn derivative<T: Real>(psi: &Wavefunction<T>, order: usize) -> Result<Wavefunction<T>> {
    if !(1..=5).contains(&order) {
        return Err(invalid(format!("derivative order must be in 1..=5, got {order}")));
    }
    psi.check_finite()?;
    Ok(psi.with_values(psi.grid().derivative_complex(psi.values(), order as u32)))
}

/// `p^n ψ` with `p = -i d/dx`.
pub fn momentum_power<T: Real>(psi: &Wavefunction<T>, n: u32) -> Wavefunction<T> {
    psi.with_values(psi.grid().momentum_power(psi.values(), n))
}

fn check_samples<T: Real>(grid: &Grid1D<T>, u: &[T]) -> Result<()> {
    if u.len() != grid.len() {
        return Err(invalid(format!("{} potential samples on a {}-point grid", u.len(), grid.len())));
    }
    check_finite(u.iter().copied())
}

fn pointwise<T: Real>(u: &[T], v: &[Complex<T>]) -> Vec<Complex<T>> {
    u.iter().zip(v).map(|(&a, &z)| z.scale(a)).collect()
}

fn axpy<T: Real>(acc: &mut [Complex<T>], s: T, v: &[Complex<T>]) {
    for (a, &z) in acc.iter_mut().zip(v) {
        *a = *a + z.scale(s);
    }
}

/// Dense matrix of `p² + u` (kinetic part from the spectral second derivative).
pub fn hamiltonian_matrix<T: Real>(u: &[T], grid: &Grid1D<T>) -> Result<OperatorMatrix<T>> {
    check_samples(grid, u)?;
    let n = grid.len();
    // Kinetic matrix is circulant: K[i][j] = kernel[(i - j) mod n].
    let mut kernel: Vec<Complex<T>> = grid
        .wavenumbers()
        .into_iter()
        .map(|k| Complex::new(k * k, T::zero()))
        .collect();
    grid.inverse(&mut kernel);
    let mut real = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            real[i * n + j] = kernel[(i + n - j) % n].re;
        }
        real[i * n + i] = real[i * n + i] + u[i];
    }
    // Enforce exact symmetry (the inverse FFT leaves round-off asymmetry).
    for i in 0..n {
        for j in 0..i {
            let s = (real[i * n + j] + real[j * n + i]) * c(0.5);
            real[i * n + j] = s;
            real[j * n + i] = s;
        }
    }
    OperatorMatrix::from_real(n, &real)?.assert_hermitian()
}

/// `(p² + u) ψ`.
pub fn apply_hamiltonian<T: Real>(psi: &Wavefunction<T>, u: &[T]) -> Result<Wavefunction<T>> {
    check_samples(psi.grid(), u)?;
    Ok(psi.with_values(apply_hamiltonian_raw(psi.grid(), psi.values(), u)))
}

pub(crate) fn apply_hamiltonian_raw<T: Real>(
    grid: &Grid1D<T>,
    v: &[Complex<T>],
    u: &[T],
) -> Vec<Complex<T>> {
    let mut out = grid.momentum_power(v, 2);
    for ((o, &z), &ui) in out.iter_mut().zip(v).zip(u) {
        *o = *o + z.scale(ui);
    }
    out
}

/// `(p a + a p) ψ` for a real coefficient field `a(x)`.
pub fn apply_symmetrized_p<T: Real>(psi: &Wavefunction<T>, a: &[T]) -> Result<Wavefunction<T>> {
    check_samples(psi.grid(), a)?;
    Ok(psi.with_values(symmetrized_p_raw(psi.grid(), psi.values(), a)))
}

pub(crate) fn symmetrized_p_raw<T: Real>(
    grid: &Grid1D<T>,
    v: &[Complex<T>],
    a: &[T],
) -> Vec<Complex<T>> {
    let mut out = grid.momentum_power(&pointwise(a, v), 1);
    let pv = grid.momentum_power(v, 1);
    for ((o, &z), &ai) in out.iter_mut().zip(&pv).zip(a) {
        *o = *o + z.scale(ai);
    }
    out
}

/// Third-order counterdiabatic operator
/// `a [p³ + ¾(p u + u p)] + c1 p` applied to `ψ`.
pub fn operator_apply_cd3<T: Real>(
    psi: &Wavefunction<T>,
    u: &[T],
    a: T,
    c1: T,
) -> Result<Wavefunction<T>> {
    check_samples(psi.grid(), u)?;
    psi.check_finite()?;
    if !(a.is_finite() && c1.is_finite()) {
        return Err(crate::error::Error::Numeric("non-finite coefficient".into()));
    }
    Ok(psi.with_values(cd3_raw(psi.grid(), psi.values(), u, a, c1)))
}

pub(crate) fn cd3_raw<T: Real>(
    grid: &Grid1D<T>,
    v: &[Complex<T>],
    u: &[T],
    a: T,
    c1: T,
) -> Vec<Complex<T>> {
    let mut out: Vec<Complex<T>> = grid.momentum_power(v, 3).iter().map(|z| z.scale(a)).collect();
    axpy(&mut out, a * c(0.75), &symmetrized_p_raw(grid, v, u));
    axpy(&mut out, c1, &grid.momentum_power(v, 1));
    out
}

/// Fifth-order counterdiabatic operator
/// `16 p⁵ + 20(p³u + u p³) + 30 u p u + 5(p u'' + u'' p)` applied to `ψ`,
/// with `u''` taken spectrally from the samples.
///
/// This is the member of the hierarchy whose commutator with `p² + u`
/// reproduces `u_t = 10(u u_xxx + 2 u_x u_xx) − 30 u² u_x − u_xxxxx`.
pub fn operator_apply_cd5<T: Real>(psi: &Wavefunction<T>, u: &[T]) -> Result<Wavefunction<T>> {
    let uxx = psi.grid().derivative_real(u, 2)?;
    operator_apply_cd5_with(psi, u, &uxx)
}

/// As [`operator_apply_cd5`] with an explicitly supplied `u''`.
pub fn operator_apply_cd5_with<T: Real>(
    psi: &Wavefunction<T>,
    u: &[T],
    uxx: &[T],
) -> Result<Wavefunction<T>> {
    check_samples(psi.grid(), u)?;
    check_samples(psi.grid(), uxx)?;
    psi.check_finite()?;
    Ok(psi.with_values(cd5_raw(psi.grid(), psi.values(), u, uxx)))
}

pub(crate) fn cd5_raw<T: Real>(
    grid: &Grid1D<T>,
    v: &[Complex<T>],
    u: &[T],
    uxx: &[T],
) -> Vec<Complex<T>> {
    let mut out: Vec<Complex<T>> = grid.momentum_power(v, 5).iter().map(|z| z.scale(c(16.0))).collect();
    let p3_uv = grid.momentum_power(&pointwise(u, v), 3);
    let u_p3v = pointwise(u, &grid.momentum_power(v, 3));
    axpy(&mut out, c(20.0), &p3_uv);
    axpy(&mut out, c(20.0), &u_p3v);
    let upu = pointwise(u, &grid.momentum_power(&pointwise(u, v), 1));
    axpy(&mut out, c(30.0), &upu);
    axpy(&mut out, c(5.0), &symmetrized_p_raw(grid, v, uxx));
    out
}

/// Dense matrix of a linear operator given by its action, column by column.
pub fn operator_matrix_from_action<T: Real>(
    grid: &Grid1D<T>,
    action: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
) -> OperatorMatrix<T> {
    let n = grid.len();
    let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n];
    let mut e = vec![Complex::new(T::zero(), T::zero()); n];
    for j in 0..n {
        e[j] = Complex::new(T::one(), T::zero());
        let col = action(&e);
        for i in 0..n {
            entries[i * n + j] = col[i];
        }
        e[j] = Complex::new(T::zero(), T::zero());
    }
    OperatorMatrix::from_entries(n, entries).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(-5.0, 5.0, 64).unwrap()
    }

    #[test]
    fn derivative_order_is_checked() {
        let psi = Wavefunction::from_real(&grid(), |x| x.sin());
        assert!(derivative(&psi, 0).is_err());
        assert!(derivative(&psi, 6).is_err());
    }

    #[test]
    fn non_finite_is_numeric_error() {
        let psi = Wavefunction::from_real(&grid(), |_| f64::NAN);
        assert!(matches!(derivative(&psi, 1), Err(crate::Error::Numeric(_))));
    }

    #[test]
    fn plane_wave_through_cd3() {
        let g = grid();
        let k = 2.0 * PI * 3.0 / g.length();
        let psi = Wavefunction::from_fn(&g, |x| Complex::new(0.0, k * x).exp());
        let u = vec![0.0; g.len()];
        let out = operator_apply_cd3(&psi, &u, 2.5, 0.0).unwrap();
        for (o, z) in out.values().iter().zip(psi.values()) {
            assert!((o - z * (2.5 * k.powi(3))).norm() < 1e-9);
        }
        let out5 = operator_apply_cd5(&psi, &u).unwrap();
        for (o, z) in out5.values().iter().zip(psi.values()) {
            assert!((o - z * (16.0 * k.powi(5))).norm() < 1e-6);
        }
    }

    #[test]
    fn hamiltonian_matrix_matches_action() {
        let g = grid();
        let u: Vec<f64> = g.points().iter().map(|x| -(-x * x).exp()).collect();
        let h = hamiltonian_matrix(&u, &g).unwrap();
        let dense = operator_matrix_from_action(&g, |v| apply_hamiltonian_raw(&g, v, &u));
        assert!(h.sub(&dense).unwrap().max_abs() < 1e-10);
        assert!(h.is_hermitian());
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(hamiltonian_matrix(&[0.0; 3], &grid()).is_err());
    }
}
