//! KdV-hierarchy flows and their counterdiabatic operators.

use num_complex::Complex;

use super::field::{require_order, SpaceTimeField};
use super::soliton::traveling_soliton;
use crate::error::{invalid, Error, Result};
use crate::field::{band_invariant_residual, cd3_raw, cd5_raw, apply_hamiltonian_raw, BandBasis, Grid1D};
use crate::scalar::{c, Real};

/// `u_t − (6 u u_x − u_xxx)`.
pub fn kdv_residual<T: Real>(u: &dyn SpaceTimeField<T>, x: T, t: T) -> Result<T> {
    require_order(u, 3)?;
    let j = u.jet(x, t);
    let d = |n| j.dx(n).expect("order checked");
    Ok(j.dt() - (c::<T>(6.0) * d(0) * d(1) - d(3)))
}

/// `u_t − 10(u_xxx u + 2 u_xx u_x) + 30 u² u_x + u_xxxxx`.
pub fn kdv5_residual<T: Real>(u: &dyn SpaceTimeField<T>, x: T, t: T) -> Result<T> {
    require_order(u, 5)?;
    let j = u.jet(x, t);
    let d = |n| j.dx(n).expect("order checked");
    Ok(j.dt() - c::<T>(10.0) * (d(3) * d(0) + c::<T>(2.0) * d(2) * d(1))
        + c::<T>(30.0) * d(0) * d(0) * d(1)
        + d(5))
}

/// Which counterdiabatic operator to certify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdOrder<T> {
    /// `a [p³ + ¾(p u + u p)] + c1 p`.
    Third { a: T, c1: T },
    /// `16 p⁵ + 20(p³u + u p³) + 30 u p u + 5(p u'' + u'' p)`.
    Fifth,
}

/// How `∂ₜH_ad = ∂ₜu` enters the invariant residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeDerivative<T> {
    Analytic,
    /// Centered difference with the given step.
    Centered(T),
}

/// Relative invariant residual of `(p² + u, H_cd)` on the band `|k| ≤ fraction·k_max`.
pub fn kdv_invariant_residual<T: Real>(
    u: &dyn SpaceTimeField<T>,
    grid: &Grid1D<T>,
    t: T,
    cd: CdOrder<T>,
    band_fraction: f64,
    dt: TimeDerivative<T>,
) -> Result<T> {
    let band = BandBasis::fraction(grid, band_fraction)?;
    let us = u.sample(grid, t);
    let ut = match dt {
        TimeDerivative::Analytic => u.sample_dt(grid, t),
        TimeDerivative::Centered(eps) => {
            if !(eps > T::zero()) {
                return Err(invalid("time step for the centered difference must be positive"));
            }
            let (up, um) = (u.sample(grid, t + eps), u.sample(grid, t - eps));
            up.iter()
                .zip(&um)
                .map(|(&p, &m)| (p - m) / (c::<T>(2.0) * eps))
                .collect()
        }
    };
    let mult = |f: &[T], v: &[Complex<T>]| -> Vec<Complex<T>> {
        f.iter().zip(v).map(|(&a, &z)| z.scale(a)).collect()
    };
    let h_ad = |v: &[Complex<T>]| apply_hamiltonian_raw(grid, v, &us);
    let dh = |v: &[Complex<T>]| mult(&ut, v);
    Ok(match cd {
        CdOrder::Third { a, c1 } => {
            band_invariant_residual(&band, dh, |v: &[Complex<T>]| cd3_raw(grid, v, &us, a, c1), h_ad)
        }
        CdOrder::Fifth => {
            require_order(u, 2)?;
            let uxx = u.sample_dx(grid, t, 2)?;
            band_invariant_residual(&band, dh, |v: &[Complex<T>]| cd5_raw(grid, v, &us, &uxx), h_ad)
        }
    })
}

/// Speed `c` at which the sech² well of decay rate `κ` solves the fifth-order
/// flow, found by bisection on the projected residual
/// `g(c) = Σ u_x(x) · R₅(c, x)` over a fixed sample set.
pub fn hierarchy_speed<T: Real>(kappa: T) -> Result<T> {
    if !(kappa > T::zero()) {
        return Err(invalid(format!("κ must be positive, got {kappa}")));
    }
    let samples: Vec<T> = (-20..=20).map(|i| T::lit(i as f64 * 0.15) / kappa).collect();
    let g = |speed: T| -> Result<T> {
        let u = traveling_soliton(kappa, speed)?;
        samples.iter().try_fold(T::zero(), |acc, &x| {
            Ok(acc + u.dx(x, T::zero(), 1)? * kdv5_residual(&u, x, T::zero())?)
        })
    };
    // Bracket: R₅ = −c u_x + N[u], so g is affine and decreasing in c.
    let mut hi = T::one();
    let g0 = g(T::zero())?;
    while g(hi)? * g0 > T::zero() {
        hi = hi * c(2.0);
        if hi > c(1e12) {
            return Err(Error::Numeric("no sign change of the fifth-order residual".into()));
        }
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) * c(0.5);
        if g(mid)? * g0 > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * hi * c(4.0) {
            break;
        }
    }
    Ok((lo + hi) * c(0.5))
}
