//! Truncated Taylor jets in `(x, t)`: up to seventh order in `x`, first order in `t`.
//!
//! A jet stores Taylor coefficients `a[n] = ∂ₓⁿf/n!` and
//! `b[n] = ∂ₜ∂ₓⁿf/n!` at a point. Arithmetic on jets is exact differentiation
//! of the composed expression, which is how every field in this module gets
//! its analytic partials.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{from_usize, Real};

pub const MAX_ORDER: usize = 7;
const LEN: usize = MAX_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    a: [T; LEN],
    b: [T; LEN],
    /// Highest x-order carried exactly.
    order: usize,
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * from_usize::<T>(k))
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        let mut a = [T::zero(); LEN];
        a[0] = v;
        Self {
            a,
            b: [T::zero(); LEN],
            order: MAX_ORDER,
        }
    }

    /// The coordinate `x` itself, evaluated at `x`.
    pub fn var_x(x: T) -> Self {
        let mut j = Self::constant(x);
        j.a[1] = T::one();
        j
    }

    /// The coordinate `t` itself, evaluated at `t`.
    pub fn var_t(t: T) -> Self {
        let mut j = Self::constant(t);
        j.b[0] = T::one();
        j
    }

    /// `c·e^{λx+μt}` at the point where the exponent equals `log_c + λx + μt = e`.
    /// The caller passes `value = e^e` directly so overflow can be managed.
    pub fn exponential(value: T, lambda: T, mu: T) -> Self {
        let mut a = [T::zero(); LEN];
        let mut b = [T::zero(); LEN];
        let mut p = value;
        for n in 0..LEN {
            a[n] = p / factorial::<T>(n);
            b[n] = a[n] * mu;
            p = p * lambda;
        }
        Self {
            a,
            b,
            order: MAX_ORDER,
        }
    }

    /// Jet from partials: `dx[n] = ∂ₓⁿf`, `dxdt[n] = ∂ₜ∂ₓⁿf`, exact up to
    /// `order` (entries beyond it are ignored).
    pub fn from_partials(dx: &[T], dxdt: &[T], order: usize) -> Self {
        let order = order.min(MAX_ORDER);
        let mut j = Self::constant(T::zero());
        for n in 0..=order {
            let f = factorial::<T>(n);
            j.a[n] = dx.get(n).copied().unwrap_or_else(T::zero) / f;
            j.b[n] = dxdt.get(n).copied().unwrap_or_else(T::zero) / f;
        }
        j.order = order;
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> T {
        self.a[0]
    }

    /// `∂ₓⁿ f`, or `None` beyond the carried order.
    pub fn dx(&self, n: usize) -> Option<T> {
        (n <= self.order).then(|| self.a[n] * factorial::<T>(n))
    }

    /// `∂ₜ∂ₓⁿ f`.
    pub fn dxdt(&self, n: usize) -> Option<T> {
        (n <= self.order).then(|| self.b[n] * factorial::<T>(n))
    }

    pub fn dt(&self) -> T {
        self.b[0]
    }

    /// Jet of `∂ₓ f`; loses one order.
    pub fn diff_x(&self) -> Self {
        let mut out = Self::constant(T::zero());
        for n in 0..MAX_ORDER {
            let k = from_usize::<T>(n + 1);
            out.a[n] = self.a[n + 1] * k;
            out.b[n] = self.b[n + 1] * k;
        }
        out.order = self.order.saturating_sub(1);
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for n in 0..LEN {
            out.a[n] = out.a[n] * s;
            out.b[n] = out.b[n] * s;
        }
        out
    }

    pub fn add_const(&self, s: T) -> Self {
        let mut out = *self;
        out.a[0] = out.a[0] + s;
        out
    }

    pub fn square(&self) -> Self {
        *self * *self
    }

    /// `f(g)` for a scalar function whose derivatives at `g(x₀,t₀)` are
    /// `derivs[k] = f⁽ᵏ⁾`, `k = 0..=MAX_ORDER+1`.
    pub fn compose(&self, derivs: &[T; LEN + 1]) -> Self {
        let mut d = *self;
        d.a[0] = T::zero();
        let mut out = Self::constant(derivs[0]);
        out.order = self.order;
        let mut power = Self::constant(T::one());
        for (k, &f) in derivs.iter().enumerate().skip(1) {
            power = power * d;
            out = out + power.scale(f / factorial::<T>(k));
        }
        out.order = self.order;
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.a[0].exp();
        self.compose(&[e; LEN + 1])
    }

    /// Natural logarithm; the value must be positive.
    pub fn ln(&self) -> Self {
        let g = self.a[0];
        let mut derivs = [T::zero(); LEN + 1];
        derivs[0] = g.ln();
        let mut p = T::one() / g;
        for (k, d) in derivs.iter_mut().enumerate().skip(1) {
            // f⁽ᵏ⁾ = (−1)^{k+1} (k−1)! / g^k
            *d = p * factorial::<T>(k - 1);
            p = -p / g;
        }
        self.compose(&derivs)
    }

    pub fn recip(&self) -> Self {
        let g = self.a[0];
        let mut derivs = [T::zero(); LEN + 1];
        let mut p = T::one() / g;
        for (k, d) in derivs.iter_mut().enumerate() {
            *d = p * factorial::<T>(k);
            p = -p / g;
        }
        self.compose(&derivs)
    }

    pub fn tanh(&self) -> Self {
        // Polynomials in y = tanh: y' = 1 − y², built by repeated differentiation.
        let y = self.a[0].tanh();
        let mut poly = vec![T::zero(), T::one()];
        let mut derivs = [T::zero(); LEN + 1];
        for d in derivs.iter_mut() {
            *d = poly.iter().rev().fold(T::zero(), |acc, &c| acc * y + c);
            let mut next = vec![T::zero(); poly.len() + 1];
            for (i, &c) in poly.iter().enumerate().skip(1) {
                let ic = c * from_usize::<T>(i);
                next[i - 1] = next[i - 1] + ic;
                next[i + 1] = next[i + 1] - ic;
            }
            poly = next;
        }
        self.compose(&derivs)
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        for n in 0..LEN {
            out.a[n] = out.a[n] + o.a[n];
            out.b[n] = out.b[n] + o.b[n];
        }
        out.order = self.order.min(o.order);
        out
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant(T::zero());
        for i in 0..LEN {
            for j in 0..LEN - i {
                out.a[i + j] = out.a[i + j] + self.a[i] * o.a[j];
                out.b[i + j] = out.b[i + j] + self.a[i] * o.b[j] + self.b[i] * o.a[j];
            }
        }
        out.order = self.order.min(o.order);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_and_chain_rule() {
        let (x0, t0) = (0.3f64, -0.2f64);
        let x = Jet::var_x(x0);
        let t = Jet::var_t(t0);
        // f = exp(x t) sin-free polynomial mix
        let f = (x * t).exp() * x;
        // ∂ₓ f = e^{xt}(1 + x t)
        let fx = (x0 * t0).exp() * (1.0 + x0 * t0);
        assert!((f.dx(1).unwrap() - fx).abs() < 1e-14);
        // ∂ₜ f = x² e^{xt}
        assert!((f.dt() - x0 * x0 * (x0 * t0).exp()).abs() < 1e-14);
        // ∂ₓ² f = e^{xt}(2t + x t²)
        let fxx = (x0 * t0).exp() * (2.0 * t0 + x0 * t0 * t0);
        assert!((f.dx(2).unwrap() - fxx).abs() < 1e-13);
    }

    #[test]
    fn ln_inverts_exp_and_tanh_matches_definition() {
        let x = Jet::<f64>::var_x(0.7) * Jet::var_t(1.3) + Jet::var_x(0.7);
        let back = x.exp().ln();
        // ∂ₓⁿ of e^x here scales like n!·sⁿ (s = ∂ₓx = 2.3); round-off follows it.
        let s = x.dx(1).unwrap();
        for n in 0..=MAX_ORDER {
            let tol = 1e-13 * factorial::<f64>(n) * s.powi(n as i32);
            assert!((back.dx(n).unwrap() - x.dx(n).unwrap()).abs() < tol);
            assert!((back.dxdt(n).unwrap() - x.dxdt(n).unwrap()).abs() < tol);
        }
        let e2 = x.scale(2.0).exp();
        let th = (e2.add_const(-1.0)) * e2.add_const(1.0).recip();
        let direct = x.tanh();
        for n in 0..=MAX_ORDER {
            let tol = 1e-13 * factorial::<f64>(n) * (2.0 * s).powi(n as i32);
            assert!((th.dx(n).unwrap() - direct.dx(n).unwrap()).abs() < tol);
        }
    }

    #[test]
    fn differentiation_drops_order() {
        let j = Jet::var_x(1.0).exp();
        let d = j.diff_x().diff_x();
        assert_eq!(d.order(), 5);
        assert!(d.dx(6).is_none());
        assert!((d.dx(3).unwrap() - 1f64.exp()).abs() < 1e-14);
    }
}
