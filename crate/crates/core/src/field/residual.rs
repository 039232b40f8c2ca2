//! Dynamical-invariant residuals `i ∂ₜH_ad − [H_cd, H_ad]`.

use num_complex::Complex;

use super::band::BandBasis;
use crate::error::{invalid, Result};
use crate::linalg::OperatorMatrix;
use crate::scalar::{c, Real};

/// Relative Frobenius residual
/// `‖i (H(t+ε) − H(t−ε))/(2ε) − [H_cd, H_ad]‖ / ‖H_ad‖`.
pub fn invariant_residual<T: Real>(
    h_plus: &OperatorMatrix<T>,
    h_minus: &OperatorMatrix<T>,
    eps: T,
    h_cd: &OperatorMatrix<T>,
    h_ad: &OperatorMatrix<T>,
) -> Result<T> {
    let d = h_ad.dim();
    if [h_plus.dim(), h_minus.dim(), h_cd.dim()].iter().any(|&x| x != d) {
        return Err(invalid("invariant_residual: matrix dimensions differ"));
    }
    if !(eps > T::zero()) {
        return Err(invalid("invariant_residual: ε must be positive"));
    }
    let factor = Complex::new(T::zero(), T::one() / (c::<T>(2.0) * eps));
    let dhdt = h_plus.sub(h_minus)?.scale(factor);
    let r = dhdt.sub(&h_cd.commutator(h_ad)?)?;
    Ok(relative(r.frobenius_norm(), h_ad.frobenius_norm()))
}

/// Same residual with an explicitly supplied `∂ₜH_ad`.
pub fn invariant_residual_exact<T: Real>(
    dh_dt: &OperatorMatrix<T>,
    h_cd: &OperatorMatrix<T>,
    h_ad: &OperatorMatrix<T>,
) -> Result<T> {
    let i = Complex::new(T::zero(), T::one());
    let r = dh_dt.scale(i).sub(&h_cd.commutator(h_ad)?)?;
    Ok(relative(r.frobenius_norm(), h_ad.frobenius_norm()))
}

/// Residual restricted to a resolved band: `‖Π R Π‖ / ‖Π H_ad Π‖`.
///
/// Operators are applied spectrally on the full grid and only the result is
/// projected, so the commutator is exact inside the band. High-order
/// operators like `p³`, `p⁵` alias near Nyquist; the band keeps the check
/// away from that region.
pub fn band_invariant_residual<T: Real>(
    band: &BandBasis<T>,
    dh_dt: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
    h_cd: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
    h_ad: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
) -> T {
    let i = Complex::new(T::zero(), T::one());
    let r = band.plane_wave_matrix(|v| {
        let a = h_cd(&h_ad(v));
        let b = h_ad(&h_cd(v));
        dh_dt(v)
            .into_iter()
            .zip(a.into_iter().zip(b))
            .map(|(d, (x, y))| i * d - (x - y))
            .collect()
    });
    let h = band.plane_wave_matrix(&h_ad);
    relative(r.frobenius_norm(), h.frobenius_norm())
}

fn relative<T: Real>(num: T, den: T) -> T {
    if den == T::zero() {
        num
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_system_has_zero_residual() {
        let h = OperatorMatrix::<f64>::from_real(2, &[1.0, 0.5, 0.5, -1.0]).unwrap();
        let z = OperatorMatrix::zeros(2);
        assert_eq!(invariant_residual(&h, &h, 1e-5, &z, &h).unwrap(), 0.0);
    }

    #[test]
    fn identity_shift_of_cd_is_invisible() {
        let h = OperatorMatrix::<f64>::from_real(2, &[1.0, 0.5, 0.5, -1.0]).unwrap();
        let hp = OperatorMatrix::<f64>::from_real(2, &[1.1, 0.5, 0.5, -1.0]).unwrap();
        let cd = OperatorMatrix::<f64>::from_real(2, &[0.0, 0.3, 0.3, 0.0]).unwrap();
        let shifted = cd.add(&OperatorMatrix::identity(2).scale(Complex::new(7.0, 0.0))).unwrap();
        let r1 = invariant_residual(&hp, &h, 1e-3, &cd, &h).unwrap();
        let r2 = invariant_residual(&hp, &h, 1e-3, &shifted, &h).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let a = OperatorMatrix::<f64>::zeros(2);
        let b = OperatorMatrix::<f64>::zeros(3);
        assert!(invariant_residual(&a, &a, 1e-5, &b, &a).is_err());
    }
}
