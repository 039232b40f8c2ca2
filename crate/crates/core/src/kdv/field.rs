use std::sync::Arc;

use super::jet::Jet;
use crate::error::{Error, Result};
use crate::field::Grid1D;
use crate::scalar::{c, Real};

/// A scalar field `u(x, t)` with analytic partials.
pub trait SpaceTimeField<T: Real>: Send + Sync {
    /// Taylor jet of the field at `(x, t)`.
    fn jet(&self, x: T, t: T) -> Jet<T>;

    /// Highest x-derivative the field provides exactly.
    fn max_x_order(&self) -> usize;

    fn value(&self, x: T, t: T) -> T {
        self.jet(x, t).value()
    }

    fn dx(&self, x: T, t: T, order: usize) -> Result<T> {
        self.jet(x, t).dx(order).ok_or(Error::Capability {
            requested: order,
            available: self.max_x_order(),
        })
    }

    fn dt(&self, x: T, t: T) -> T {
        self.jet(x, t).dt()
    }

    fn sample(&self, grid: &Grid1D<T>, t: T) -> Vec<T> {
        grid.points().into_iter().map(|x| self.value(x, t)).collect()
    }

    fn sample_dx(&self, grid: &Grid1D<T>, t: T, order: usize) -> Result<Vec<T>> {
        grid.points().into_iter().map(|x| self.dx(x, t, order)).collect()
    }

    fn sample_dt(&self, grid: &Grid1D<T>, t: T) -> Vec<T> {
        grid.points().into_iter().map(|x| self.dt(x, t)).collect()
    }
}

pub type SharedField<T> = Arc<dyn SpaceTimeField<T>>;

pub(crate) fn require_order<T: Real>(field: &dyn SpaceTimeField<T>, order: usize) -> Result<()> {
    if field.max_x_order() < order {
        Err(Error::Capability {
            requested: order,
            available: field.max_x_order(),
        })
    } else {
        Ok(())
    }
}

const MAX_TERMS: usize = 8;

/// `ln τ` for `τ = Σ_j c_j e^{λ_j x + μ_j t}` with positive `c_j`.
///
/// Evaluated in the log domain: the exponents are shifted by their maximum
/// and the rates are centered on their weighted mean, so neither overflow
/// nor cancellation in the x-derivatives (the cumulants of λ) occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTau<T> {
    /// `(ln c_j, λ_j, μ_j)`
    terms: Vec<(T, T, T)>,
}

impl<T: Real> LogTau<T> {
    /// At most eight terms (two-soliton tau functions use four).
    pub fn new(terms: Vec<(T, T, T)>) -> Self {
        assert!(
            !terms.is_empty() && terms.len() <= MAX_TERMS,
            "tau function needs 1..={MAX_TERMS} terms"
        );
        Self { terms }
    }

    /// Fills `w` with normalized weights `w_j ∝ c_j e^{λ_j x + μ_j t}` and
    /// returns `ln τ`.
    fn weights(&self, x: T, t: T, w: &mut [T; MAX_TERMS]) -> T {
        let n = self.terms.len();
        let mut top = T::neg_infinity();
        for (wi, &(lc, l, m)) in w.iter_mut().zip(&self.terms) {
            *wi = lc + l * x + m * t;
            top = top.max(*wi);
        }
        let mut total = T::zero();
        for wi in w[..n].iter_mut() {
            *wi = (*wi - top).exp();
            total = total + *wi;
        }
        for wi in w[..n].iter_mut() {
            *wi = *wi / total;
        }
        top + total.ln()
    }

    /// `ln τ` alone.
    pub fn value(&self, x: T, t: T) -> T {
        self.weights(x, t, &mut [T::zero(); MAX_TERMS])
    }

    /// `∂ₓ² ln τ` and `∂ₜ∂ₓ² ln τ`: the variance of λ under the weights and
    /// its time derivative `E[(λ−λ̄)²(μ−μ̄)]`.
    pub fn curvature(&self, x: T, t: T) -> (T, T) {
        let mut w = [T::zero(); MAX_TERMS];
        self.weights(x, t, &mut w);
        let (mut lbar, mut mbar) = (T::zero(), T::zero());
        for (&(_, l, m), &wi) in self.terms.iter().zip(&w) {
            lbar = lbar + wi * l;
            mbar = mbar + wi * m;
        }
        let (mut var, mut dvar) = (T::zero(), T::zero());
        for (&(_, l, m), &wi) in self.terms.iter().zip(&w) {
            let d2 = (l - lbar) * (l - lbar) * wi;
            var = var + d2;
            dvar = dvar + d2 * (m - mbar);
        }
        (var, dvar)
    }

    pub fn jet(&self, x: T, t: T) -> Jet<T> {
        let expo: Vec<T> = self
            .terms
            .iter()
            .map(|&(lc, l, m)| lc + l * x + m * t)
            .collect();
        let top = expo.iter().copied().fold(T::neg_infinity(), T::max);
        let w: Vec<T> = expo.iter().map(|&e| (e - top).exp()).collect();
        let total: T = w.iter().copied().sum();
        let lbar = self.terms.iter().zip(&w).map(|(&(_, l, _), &wi)| l * wi).sum::<T>() / total;
        let mbar = self.terms.iter().zip(&w).map(|(&(_, _, m), &wi)| m * wi).sum::<T>() / total;
        let mut shifted = Jet::constant(T::zero());
        for (&(_, l, m), &wi) in self.terms.iter().zip(&w) {
            shifted = shifted + Jet::exponential(wi / total, l - lbar, m - mbar);
        }
        // ln τ = top + ln total + λ̄ x + μ̄ t + ln(shifted)
        (shifted.ln() + Jet::var_x(x).scale(lbar) + Jet::var_t(t).scale(mbar))
            .add_const(top + total.ln() - lbar * x - mbar * t)
    }
}

/// `u = −2 ∂ₓ² ln τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauField<T> {
    tau: LogTau<T>,
}

impl<T: Real> TauField<T> {
    pub fn new(tau: LogTau<T>) -> Self {
        Self { tau }
    }

    pub fn log_tau(&self) -> &LogTau<T> {
        &self.tau
    }
}

impl<T: Real> SpaceTimeField<T> for TauField<T> {
    fn jet(&self, x: T, t: T) -> Jet<T> {
        self.tau.jet(x, t).diff_x().diff_x().scale(c(-2.0))
    }

    fn value(&self, x: T, t: T) -> T {
        self.tau.curvature(x, t).0 * c(-2.0)
    }

    fn dt(&self, x: T, t: T) -> T {
        self.tau.curvature(x, t).1 * c(-2.0)
    }

    fn max_x_order(&self) -> usize {
        super::jet::MAX_ORDER - 2
    }
}

/// Field given by a jet expression in the coordinates, e.g. a harmonic well
/// or a Gaussian bump. The closure receives the coordinate jets `x` and `t`.
pub struct AnalyticField<T> {
    f: Box<dyn Fn(Jet<T>, Jet<T>) -> Jet<T> + Send + Sync>,
    order: usize,
}

impl<T: Real> AnalyticField<T> {
    pub fn new(f: impl Fn(Jet<T>, Jet<T>) -> Jet<T> + Send + Sync + 'static) -> Self {
        Self {
            f: Box::new(f),
            order: super::jet::MAX_ORDER,
        }
    }

    /// Harmonic well `ω² x² / 4`, whose levels under `p² + u` are `ω(n + ½)`.
    pub fn harmonic(omega: T) -> Self {
        Self::new(move |x, _| x.square().scale(omega * omega * c(0.25)))
    }

    /// `amp · exp(−(x − x0)²/w²)`.
    pub fn gaussian(amp: T, x0: T, width: T) -> Self {
        Self::new(move |x, _| {
            x.add_const(-x0)
                .square()
                .scale(-T::one() / (width * width))
                .exp()
                .scale(amp)
        })
    }

    pub fn zero() -> Self {
        Self::new(|_, _| Jet::constant(T::zero()))
    }
}

impl<T: Real> std::fmt::Debug for AnalyticField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticField").field("order", &self.order).finish()
    }
}

impl<T: Real> SpaceTimeField<T> for AnalyticField<T> {
    fn jet(&self, x: T, t: T) -> Jet<T> {
        (self.f)(Jet::var_x(x), Jet::var_t(t))
    }

    fn max_x_order(&self) -> usize {
        self.order
    }
}

/// Pointwise sum of two fields.
pub struct SumField<T> {
    parts: Vec<SharedField<T>>,
}

impl<T: Real> SumField<T> {
    pub fn new(parts: Vec<SharedField<T>>) -> Self {
        Self { parts }
    }
}

impl<T: Real> SpaceTimeField<T> for SumField<T> {
    fn jet(&self, x: T, t: T) -> Jet<T> {
        self.parts
            .iter()
            .fold(Jet::constant(T::zero()), |acc, f| acc + f.jet(x, t))
    }

    fn max_x_order(&self) -> usize {
        self.parts.iter().map(|f| f.max_x_order()).min().unwrap_or(super::jet::MAX_ORDER)
    }
}
