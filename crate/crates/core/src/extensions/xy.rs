//! Inverse engineering of the XY chain in the single-flip sector.
//!
//! The invariant `F` carries couplings `a_n + i b_n` and fields `c_n`, the
//! Hamiltonian `H` real couplings `d_n` and fields `h_n`. Writing out
//! `i ∂ₜF = [H, F]` entry by entry gives
//!
//! ```text
//! ȧ_n = −b_n (h_{n+1} − h_n)
//! ḃ_n = −d_n (c_{n+1} − c_n) + a_n (h_{n+1} − h_n)
//! ċ_n = −2 (d_n b_n − d_{n−1} b_{n−1})
//! d_n a_{n−1} = d_{n−1} a_n,   d_n b_{n−1} = d_{n−1} b_n
//! ```
//!
//! (the last two from the `(n, n+2)` entries).

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::linalg::OperatorMatrix;
use crate::scalar::{c, Real};
use crate::spin::one_body_matrix;
use crate::toda::TodaState;

/// Snapshot of the invariant and Hamiltonian couplings at one time.
///
/// `a, b, d` live on the `N − 1` bonds, `c, h` on the `N` sites. `alpha` and
/// `beta` are only read by [`alpha_extension_check`], where `b = αa` and
/// `d = βa`.
#[derive(Debug, Clone, PartialEq)]
pub struct XYInvariantCoeffs<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub c: Vec<T>,
    pub d: Vec<T>,
    pub h: Vec<T>,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> XYInvariantCoeffs<T> {
    pub fn validate(&self) -> Result<()> {
        let n = self.c.len();
        if n < 2 || self.h.len() != n {
            return Err(invalid(format!(
                "XY coefficients: {} invariant fields vs {} Hamiltonian fields (need ≥ 2, equal)",
                n,
                self.h.len()
            )));
        }
        for (name, v) in [("a", &self.a), ("b", &self.b), ("d", &self.d)] {
            if v.len() != n - 1 {
                return Err(invalid(format!("XY coefficients: `{name}` has {} bonds, expected {}", v.len(), n - 1)));
            }
        }
        let all = self.a.iter().chain(&self.b).chain(&self.c).chain(&self.d).chain(&self.h);
        if all.chain([&self.alpha, &self.beta]).any(|v| !v.is_finite()) {
            return Err(invalid("XY coefficients contain non-finite values"));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.c.len()
    }

    /// Single-flip matrix of `H`.
    pub fn hamiltonian(&self) -> Result<OperatorMatrix<T>> {
        let upper: Vec<_> = self.d.iter().map(|&d| Complex::new(d, T::zero())).collect();
        one_body_matrix(&self.h, &upper)
    }

    /// Single-flip matrix of `F`.
    pub fn invariant(&self) -> Result<OperatorMatrix<T>> {
        let upper: Vec<_> = self.a.iter().zip(&self.b).map(|(&a, &b)| Complex::new(a, b)).collect();
        one_body_matrix(&self.c, &upper)
    }

    fn flatten(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(3 * self.c.len() + 2 * self.a.len() + 2);
        for part in [&self.a, &self.b, &self.c, &self.d, &self.h] {
            v.extend_from_slice(part);
        }
        v.push(self.alpha);
        v.push(self.beta);
        v
    }

    fn unflatten(&self, v: &[T]) -> Self {
        let (nb, ns) = (self.a.len(), self.c.len());
        let mut it = v.iter().copied();
        let mut take = |k: usize| it.by_ref().take(k).collect::<Vec<T>>();
        let (a, b, cc, d, h) = (take(nb), take(nb), take(ns), take(nb), take(ns));
        let ab = take(2);
        Self { a, b, c: cc, d, h, alpha: ab[0], beta: ab[1] }
    }
}

/// Coefficients of the Toda reduction: `d = √2 J`, `a = d/2`, `b = −d/2`,
/// `c = h` (so `α = −1`, `β = 2`).
pub fn toda_reduced_coeffs<T: Real>(s: &TodaState<T>) -> XYInvariantCoeffs<T> {
    let d: Vec<T> = s.couplings().iter().map(|&j| j * c::<T>(2.0).sqrt()).collect();
    XYInvariantCoeffs {
        a: d.iter().map(|&x| x * c(0.5)).collect(),
        b: d.iter().map(|&x| x * c(-0.5)).collect(),
        c: s.fields().to_vec(),
        h: s.fields().to_vec(),
        d,
        alpha: -T::one(),
        beta: c(2.0),
    }
}

/// Time-dependent coefficients.
pub trait XYSchedule<T: Real> {
    fn coeffs_at(&mut self, t: T) -> Result<XYInvariantCoeffs<T>>;
}

impl<T: Real, F: FnMut(T) -> Result<XYInvariantCoeffs<T>>> XYSchedule<T> for F {
    fn coeffs_at(&mut self, t: T) -> Result<XYInvariantCoeffs<T>> {
        self(t)
    }
}

/// Value and once-Richardson-extrapolated centered time derivative.
pub fn schedule_rate<T: Real>(
    schedule: &mut dyn XYSchedule<T>,
    t: T,
    step: T,
) -> Result<(XYInvariantCoeffs<T>, XYInvariantCoeffs<T>)> {
    if !(step > T::zero()) {
        return Err(invalid(format!("finite-difference step must be positive, got {step}")));
    }
    let now = schedule.coeffs_at(t)?;
    now.validate()?;
    let mut sample = |dt: T| -> Result<Vec<T>> {
        let s = schedule.coeffs_at(t + dt)?;
        s.validate()?;
        if s.sites() != now.sites() {
            return Err(invalid("schedule changes the chain length"));
        }
        Ok(s.flatten())
    };
    let half = step * c(0.5);
    let (p1, m1, p2, m2) = (sample(step)?, sample(-step)?, sample(half)?, sample(-half)?);
    let rate: Vec<T> = (0..p1.len())
        .map(|i| {
            let d1 = (p1[i] - m1[i]) / (c::<T>(2.0) * step);
            let d2 = (p2[i] - m2[i]) / step;
            (c::<T>(4.0) * d2 - d1) / c(3.0)
        })
        .collect();
    let rate = now.unflatten(&rate);
    Ok((now, rate))
}

/// Per-equation maxima of the five XY conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XYResidual<T> {
    /// `[ȧ, ḃ, ċ, a-compatibility, b-compatibility]`
    pub equations: [T; 5],
}

impl<T: Real> XYResidual<T> {
    pub fn max(&self) -> T {
        self.equations.iter().copied().fold(T::zero(), T::max)
    }
}

/// Residuals of the five conditions given a snapshot and its time derivative.
pub fn xy_equations<T: Real>(s: &XYInvariantCoeffs<T>, r: &XYInvariantCoeffs<T>) -> XYResidual<T> {
    let n = s.sites();
    let mut e = [T::zero(); 5];
    let mut bump = |k: usize, v: T| e[k] = e[k].max(v.abs());
    for i in 0..n - 1 {
        let dh = s.h[i + 1] - s.h[i];
        let dc = s.c[i + 1] - s.c[i];
        bump(0, r.a[i] + s.b[i] * dh);
        bump(1, r.b[i] + s.d[i] * dc - s.a[i] * dh);
        if i > 0 {
            bump(3, s.d[i] * s.a[i - 1] - s.d[i - 1] * s.a[i]);
            bump(4, s.d[i] * s.b[i - 1] - s.d[i - 1] * s.b[i]);
        }
    }
    let flux = |i: usize| if i < n - 1 { s.d[i] * s.b[i] } else { T::zero() };
    for i in 0..n {
        let prev = if i > 0 { flux(i - 1) } else { T::zero() };
        bump(2, r.c[i] + c::<T>(2.0) * (flux(i) - prev));
    }
    XYResidual { equations: e }
}

/// Maximum residual of the five conditions at `t`, derivatives by
/// Richardson-extrapolated centered differences of step `step`.
pub fn xy_invariant_residual<T: Real>(
    schedule: &mut dyn XYSchedule<T>,
    t: T,
    step: T,
) -> Result<XYResidual<T>> {
    let (s, r) = schedule_rate(schedule, t, step)?;
    Ok(xy_equations(&s, &r))
}

/// Outcome of [`alpha_extension_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport<T> {
    /// Maxima over the samples of the three α/β relations.
    pub relations: [T; 3],
    /// Maximum of the five XY conditions over the samples.
    pub xy: T,
    /// `(t, relation index)` where a relation exceeded the tolerance.
    pub violations: Vec<(T, usize)>,
    /// `max |ȧ_n(τ)|` and `max |ċ_n(τ)|`.
    pub final_da: T,
    pub final_dc: T,
    /// `‖[H(τ), F(τ)]‖_F`.
    pub final_commutator: T,
}

impl<T: Real> AlphaReport<T> {
    pub fn holds(&self, tol: T) -> bool {
        self.violations.is_empty() && self.final_da <= tol && self.final_dc <= tol && self.final_commutator <= tol
    }
}

/// The three α/β relations (with `b = αa`, `d = βa`, `a_{−1} = 0` and, for
/// sites, `a_{N−1} = 0`), multiplied through so no division by `a` occurs:
///
/// ```text
/// R1 = 2(1+α²) ȧ_n Δ_n + 2αα̇ a_n Δ_n − a_n (c_{n+1} − c_n) ċ_n
/// R2 = ċ_n + 2αβ Δ_n
/// R3 = α a_n (h_{n+1} − h_n) + ȧ_n
/// ```
///
/// with `Δ_n = a_n² − a_{n−1}²`.
pub fn alpha_relations<T: Real>(s: &XYInvariantCoeffs<T>, r: &XYInvariantCoeffs<T>) -> [T; 3] {
    let n = s.sites();
    let a = |i: isize| -> T {
        if i < 0 || i as usize >= n - 1 {
            T::zero()
        } else {
            s.a[i as usize]
        }
    };
    let delta = |i: usize| a(i as isize).powi(2) - a(i as isize - 1).powi(2);
    let (al, dal, be) = (s.alpha, r.alpha, s.beta);
    let two = c::<T>(2.0);
    let mut out = [T::zero(); 3];
    for i in 0..n - 1 {
        let d = delta(i);
        let r1 = two * (T::one() + al * al) * r.a[i] * d + two * al * dal * s.a[i] * d
            - s.a[i] * (s.c[i + 1] - s.c[i]) * r.c[i];
        let r3 = al * s.a[i] * (s.h[i + 1] - s.h[i]) + r.a[i];
        out[0] = out[0].max(r1.abs());
        out[2] = out[2].max(r3.abs());
    }
    for i in 0..n {
        out[1] = out[1].max((r.c[i] + two * al * be * delta(i)).abs());
    }
    out
}

/// Verifies the α-extension relations at `samples`, and the final
/// conditions `ȧ(τ) = ċ(τ) = 0`, `[H(τ), F(τ)] = 0`.
///
/// `α(τ)` must vanish (to `tol`), otherwise the final conditions are not the
/// ones implied by the construction and a precondition error is returned.
pub fn alpha_extension_check<T: Real>(
    schedule: &mut dyn XYSchedule<T>,
    tau: T,
    samples: &[T],
    step: T,
    tol: T,
) -> Result<AlphaReport<T>> {
    let (end, end_rate) = schedule_rate(schedule, tau, step)?;
    if end.alpha.abs() > tol {
        return Err(Error::Precondition(format!("α(τ) = {} must vanish at τ = {tau}", end.alpha)));
    }
    let mut relations = [T::zero(); 3];
    let mut xy = T::zero();
    let mut violations = Vec::new();
    for &t in samples {
        let (s, r) = schedule_rate(schedule, t, step)?;
        let rel = alpha_relations(&s, &r);
        for (k, &v) in rel.iter().enumerate() {
            relations[k] = relations[k].max(v);
            if v > tol {
                violations.push((t, k));
            }
        }
        xy = xy.max(xy_equations(&s, &r).max());
    }
    let maxabs = |v: &[T]| v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let h = end.hamiltonian()?;
    let f = end.invariant()?;
    Ok(AlphaReport {
        relations,
        xy,
        violations,
        final_da: maxabs(&end_rate.a),
        final_dc: maxabs(&end_rate.c),
        final_commutator: h.commutator(&f)?.frobenius_norm(),
    })
}

/// Constructed α-extension schedule (an example, not a unique solution).
///
/// `α(t) = sin²(π(τ − t)/(2τ))`, `β = g0` constant, and `a_n, c_n` solve
///
/// ```text
/// ċ_n = −2 g0 α (a_n² − a_{n−1}²)
/// ȧ_n = −a_n (α α̇ + g0 α (c_{n+1} − c_n)) / (1 + α²)
/// ```
///
/// from `(a(0), c(0))`. Then `b = αa`, `d = g0 a`, and the fields follow from
/// `h_{n+1} − h_n = (α̇ + g0 (c_{n+1} − c_n)) / (1 + α²)` with `h_0 = g0 c_0`.
/// At `τ` the drive is frozen (`α = α̇ = 0`) and `H(τ) = g0 F(τ)`.
#[derive(Debug, Clone)]
pub struct AlphaFixture<T> {
    a0: Vec<T>,
    c0: Vec<T>,
    g0: T,
    tau: T,
    steps: usize,
}

impl<T: Real> AlphaFixture<T> {
    /// `steps` RK4 steps are used from 0 to any requested time, so the
    /// integration error is a smooth function of `t` and can be differenced.
    pub fn new(a0: Vec<T>, c0: Vec<T>, g0: T, tau: T, steps: usize) -> Result<Self> {
        if c0.len() < 2 || a0.len() + 1 != c0.len() {
            return Err(invalid("fixture needs N ≥ 2 fields and N − 1 couplings"));
        }
        if !(tau > T::zero()) || steps == 0 {
            return Err(invalid("fixture needs τ > 0 and at least one step"));
        }
        if a0.iter().any(|&a| !(a > T::zero())) {
            return Err(invalid("fixture couplings must be positive"));
        }
        Ok(Self { a0, c0, g0, tau, steps })
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn alpha(&self, t: T) -> (T, T) {
        let w = T::PI() / (c::<T>(2.0) * self.tau);
        let phase = w * (self.tau - t);
        (phase.sin().powi(2), -w * (c::<T>(2.0) * phase).sin())
    }

    fn rhs(&self, t: T, a: &[T], cc: &[T]) -> (Vec<T>, Vec<T>) {
        let (al, dal) = self.alpha(t);
        let g = self.g0 * al;
        let n = cc.len();
        let sq = |i: isize| if i < 0 || i as usize >= n - 1 { T::zero() } else { a[i as usize].powi(2) };
        let dc = (0..n)
            .map(|i| c::<T>(-2.0) * g * (sq(i as isize) - sq(i as isize - 1)))
            .collect();
        let da = (0..n - 1)
            .map(|i| -a[i] * (al * dal + g * (cc[i + 1] - cc[i])) / (T::one() + al * al))
            .collect();
        (da, dc)
    }

    fn state(&self, t: T) -> (Vec<T>, Vec<T>) {
        let (mut a, mut cc) = (self.a0.clone(), self.c0.clone());
        let h = t / T::lit(self.steps as f64);
        let axpy = |x: &[T], s: T, y: &[T]| -> Vec<T> { x.iter().zip(y).map(|(&p, &q)| p + s * q).collect() };
        let half = h * c(0.5);
        for k in 0..self.steps {
            let t0 = h * T::lit(k as f64);
            let (ka1, kc1) = self.rhs(t0, &a, &cc);
            let (ka2, kc2) = self.rhs(t0 + half, &axpy(&a, half, &ka1), &axpy(&cc, half, &kc1));
            let (ka3, kc3) = self.rhs(t0 + half, &axpy(&a, half, &ka2), &axpy(&cc, half, &kc2));
            let (ka4, kc4) = self.rhs(t0 + h, &axpy(&a, h, &ka3), &axpy(&cc, h, &kc3));
            let six = h / c(6.0);
            for i in 0..a.len() {
                a[i] = a[i] + six * (ka1[i] + c::<T>(2.0) * (ka2[i] + ka3[i]) + ka4[i]);
            }
            for i in 0..cc.len() {
                cc[i] = cc[i] + six * (kc1[i] + c::<T>(2.0) * (kc2[i] + kc3[i]) + kc4[i]);
            }
        }
        (a, cc)
    }

    pub fn coeffs(&self, t: T) -> Result<XYInvariantCoeffs<T>> {
        let (a, cc) = self.state(t);
        let (al, dal) = self.alpha(t);
        let mut h = vec![self.g0 * cc[0]];
        for i in 0..a.len() {
            let step = (dal + self.g0 * (cc[i + 1] - cc[i])) / (T::one() + al * al);
            h.push(h[i] + step);
        }
        let out = XYInvariantCoeffs {
            b: a.iter().map(|&x| al * x).collect(),
            d: a.iter().map(|&x| self.g0 * x).collect(),
            a,
            c: cc,
            h,
            alpha: al,
            beta: self.g0,
        };
        if out.a.iter().chain(&out.c).any(|v| !v.is_finite()) {
            return Err(Error::Divergence(format!("α-fixture diverged before t = {t}")));
        }
        Ok(out)
    }
}

impl<T: Real> XYSchedule<T> for AlphaFixture<T> {
    fn coeffs_at(&mut self, t: T) -> Result<XYInvariantCoeffs<T>> {
        self.coeffs(t)
    }
}
