//! Nonisospectral driving: `u(x, t) = γ⁻² u₀((x − x₀)/γ)` with the invariant
//! `F = γ² H_ad`, the dilation counterdiabatic term and the γ-dressed KdV
//! equation.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::field::{BandBasis, Grid1D};
use crate::field::{apply_hamiltonian_raw, hamiltonian_matrix};
use crate::kdv::{Jet, SharedField, SpaceTimeField};
use crate::linalg::{eigen, OperatorMatrix};
use crate::scalar::{c, Real};

type TimeFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Dilation `γ(t) > 0` and centre `x₀(t)`, each with its derivative.
#[derive(Clone)]
pub struct GammaSchedule<T> {
    gamma: TimeFn<T>,
    gamma_dot: TimeFn<T>,
    x0: TimeFn<T>,
    x0_dot: TimeFn<T>,
}

impl<T: Real> std::fmt::Debug for GammaSchedule<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GammaSchedule")
            .field("gamma(0)", &(self.gamma)(T::zero()))
            .field("gamma_dot(0)", &(self.gamma_dot)(T::zero()))
            .finish()
    }
}

impl<T: Real> GammaSchedule<T> {
    pub fn new(
        gamma: impl Fn(T) -> T + Send + Sync + 'static,
        gamma_dot: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            gamma: Arc::new(gamma),
            gamma_dot: Arc::new(gamma_dot),
            x0: Arc::new(|_| T::zero()),
            x0_dot: Arc::new(|_| T::zero()),
        }
    }

    pub fn constant(g: T) -> Self {
        Self::new(move |_| g, |_| T::zero())
    }

    /// `γ = g0 + rate·t`.
    pub fn linear(g0: T, rate: T) -> Self {
        Self::new(move |t| g0 + rate * t, move |_| rate)
    }

    /// `γ = g0·e^{rate·t}`.
    pub fn exponential(g0: T, rate: T) -> Self {
        Self::new(move |t| g0 * (rate * t).exp(), move |t| g0 * rate * (rate * t).exp())
    }

    /// Moving centre `x₀(t)` with derivative `ẋ₀(t)`.
    pub fn with_center(
        mut self,
        x0: impl Fn(T) -> T + Send + Sync + 'static,
        x0_dot: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        self.x0 = Arc::new(x0);
        self.x0_dot = Arc::new(x0_dot);
        self
    }

    pub fn gamma(&self, t: T) -> T {
        (self.gamma)(t)
    }

    pub fn gamma_dot(&self, t: T) -> T {
        (self.gamma_dot)(t)
    }

    pub fn x0(&self, t: T) -> T {
        (self.x0)(t)
    }

    pub fn x0_dot(&self, t: T) -> T {
        (self.x0_dot)(t)
    }

    /// `γ̇/γ`.
    pub fn rate(&self, t: T) -> T {
        self.gamma_dot(t) / self.gamma(t)
    }

    /// Translation velocity of the counterdiabatic term, `ẋ₀ − (γ̇/γ) x₀`.
    pub fn velocity(&self, t: T) -> T {
        self.x0_dot(t) - self.rate(t) * self.x0(t)
    }

    /// Coefficient `a(t) = −4(1 − 3tγ̇/γ)` of the γ-dressed KdV equation
    /// solved by `γ⁻² u₀(x/γ, t/γ³)`.
    pub fn kdv_coefficient(&self, t: T) -> T {
        c::<T>(-4.0) * (T::one() - c::<T>(3.0) * t * self.rate(t))
    }

    /// Checks `γ > 0` at `samples` points of `[t0, t1]` and that the supplied
    /// derivatives agree with Richardson-extrapolated centered differences
    /// (step `1e-5·(t1 − t0)`) to `1e-6`, relative to `max(1, |f'|)`.
    pub fn validate(&self, t0: T, t1: T, samples: usize) -> Result<()> {
        if !(t1 > t0) || samples < 2 {
            return Err(invalid("γ schedule window must satisfy t1 > t0 with ≥ 2 samples"));
        }
        let h = (t1 - t0) * c(1e-5);
        let tol = c::<T>(1e-6);
        for k in 0..samples {
            let t = t0 + (t1 - t0) * T::lit(k as f64 / (samples - 1) as f64);
            let g = self.gamma(t);
            if !(g > T::zero()) || !g.is_finite() {
                return Err(invalid(format!("γ({t}) = {g} is not positive")));
            }
            for (name, f, df) in [("γ", &self.gamma, &self.gamma_dot), ("x₀", &self.x0, &self.x0_dot)] {
                let fd = richardson(|s| f(s), t, h);
                let exact = df(t);
                if !((fd - exact).abs() <= tol * T::one().max(exact.abs())) {
                    return Err(invalid(format!(
                        "{name} derivative inconsistent at t = {t}: supplied {exact}, finite difference {fd}"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn richardson<T: Real>(f: impl Fn(T) -> T, t: T, h: T) -> T {
    let d1 = (f(t + h) - f(t - h)) / (c::<T>(2.0) * h);
    let d2 = (f(t + h * c(0.5)) - f(t - h * c(0.5))) / h;
    (c::<T>(4.0) * d2 - d1) / c(3.0)
}

/// Which time the base profile `u₀` sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeMap<T> {
    /// `u₀(z, s₀)` at a fixed time.
    Frozen(T),
    /// `s = t/γ³`, the KdV self-similar time.
    Kdv,
}

/// `u(x, t) = γ(t)⁻² u₀((x − x₀(t))/γ(t), s(t))`.
#[derive(Clone)]
pub struct ScaledField<T> {
    base: SharedField<T>,
    schedule: GammaSchedule<T>,
    time: TimeMap<T>,
}

impl<T: Real> ScaledField<T> {
    pub fn new(base: SharedField<T>, schedule: GammaSchedule<T>, time: TimeMap<T>) -> Self {
        Self { base, schedule, time }
    }

    pub fn schedule(&self) -> &GammaSchedule<T> {
        &self.schedule
    }

    /// `(s, ṡ)`.
    fn base_time(&self, t: T) -> (T, T) {
        match self.time {
            TimeMap::Frozen(s0) => (s0, T::zero()),
            TimeMap::Kdv => {
                let g = self.schedule.gamma(t);
                let g3 = g * g * g;
                (t / g3, (T::one() - c::<T>(3.0) * t * self.schedule.rate(t)) / g3)
            }
        }
    }
}

impl<T: Real> SpaceTimeField<T> for ScaledField<T> {
    fn jet(&self, x: T, t: T) -> Jet<T> {
        let g = self.schedule.gamma(t);
        let gd = self.schedule.gamma_dot(t);
        let z = (x - self.schedule.x0(t)) / g;
        let zt = -(self.schedule.x0_dot(t) + z * gd) / g;
        let (s, sd) = self.base_time(t);
        let base = self.base.jet(z, s);
        // ∂ₜ needs U_{n+1}, so one x-order is lost.
        let order = base.order().saturating_sub(1);
        let mut dx = Vec::with_capacity(order + 1);
        let mut dxdt = Vec::with_capacity(order + 1);
        let mut gp = T::one() / (g * g);
        for n in 0..=order {
            let un = base.dx(n).expect("within base order");
            let un1 = base.dx(n + 1).expect("within base order");
            let us = base.dxdt(n).expect("within base order");
            let v = gp * un;
            dx.push(v);
            dxdt.push(-T::lit((n + 2) as f64) * gd / g * v + gp * (un1 * zt + us * sd));
            gp = gp / g;
        }
        Jet::from_partials(&dx, &dxdt, order)
    }

    fn max_x_order(&self) -> usize {
        self.base.max_x_order().saturating_sub(1)
    }
}

/// Residual of the γ-dressed KdV equation
/// `u_t + (c1 + (γ̇/γ)x) u_x + 2(γ̇/γ) u + (a/4)(6 u u_x − u_xxx)`.
///
/// With `γ̇ = 0`, `a = −4`, `c1 = 0` the arithmetic is exactly that of
/// [`crate::kdv::kdv_residual`].
pub fn generalized_kdv_residual<T: Real>(
    u: &dyn SpaceTimeField<T>,
    g: &GammaSchedule<T>,
    a: T,
    c1: T,
    x: T,
    t: T,
) -> Result<T> {
    if u.max_x_order() < 3 {
        return Err(crate::Error::Capability { requested: 3, available: u.max_x_order() });
    }
    let j = u.jet(x, t);
    let d = |n| j.dx(n).expect("order checked");
    let k = -a / c(4.0);
    let mut r = j.dt() - k * (c::<T>(6.0) * d(0) * d(1) - d(3));
    let rate = g.rate(t);
    let drift = c1 + rate * x;
    if drift != T::zero() {
        r = r + drift * d(1);
    }
    if rate != T::zero() {
        r = r + c::<T>(2.0) * rate * d(0);
    }
    Ok(r)
}

/// Counterdiabatic term `s·(γ̇/γ)(x p + p x) + v p + ε`; the exact one has
/// `s = ½` and `v = ẋ₀ − (γ̇/γ)x₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationCd<T> {
    pub dilation_scale: T,
    /// `None` uses the schedule's velocity.
    pub velocity: Option<T>,
    pub epsilon: T,
}

impl<T: Real> Default for DilationCd<T> {
    fn default() -> Self {
        Self { dilation_scale: c(0.5), velocity: None, epsilon: T::zero() }
    }
}

/// Gaussian packets `e^{−(x−x_j)²/(2w²) + i k_j x}` centred in the middle half
/// of the grid, alternating momenta `0` and `1/w`.
pub fn probe_packets<T: Real>(grid: &Grid1D<T>, count: usize, width: T) -> Vec<Vec<Complex<T>>> {
    let mid = (grid.x_min() + grid.x_max()) * c(0.5);
    let span = grid.length() * c(0.5);
    (0..count)
        .map(|j| {
            let frac = if count == 1 { c(0.5) } else { T::lit(j as f64 / (count - 1) as f64) };
            let xc = mid - span * c(0.5) + span * frac;
            let k = if j % 2 == 0 { T::zero() } else { T::one() / width };
            grid.points()
                .into_iter()
                .map(|x| {
                    let e = -(x - xc) * (x - xc) / (c::<T>(2.0) * width * width);
                    Complex::new(e, k * x).exp()
                })
                .collect()
        })
        .collect()
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Relative residual of `i ∂ₜF = [H_ad + H_cd, F]` with `F = γ² H_ad`,
/// `√(Σ_j ‖R φ_j‖²) / √(Σ_j ‖F φ_j‖²)` over localized probes `φ_j`.
///
/// `x` is not periodic, so the operators are applied to packets that vanish
/// well inside the box rather than to a band of plane waves.
pub fn scaled_invariant_residual<T: Real>(
    u: &dyn SpaceTimeField<T>,
    g: &GammaSchedule<T>,
    cd: &DilationCd<T>,
    grid: &Grid1D<T>,
    t: T,
    probes: &[Vec<Complex<T>>],
) -> Result<T> {
    let gam = g.gamma(t);
    if !(gam > T::zero()) {
        return Err(invalid(format!("γ({t}) = {gam} must be positive")));
    }
    if probes.is_empty() || probes.iter().any(|p| p.len() != grid.len()) {
        return Err(invalid("probe vectors must be non-empty and match the grid"));
    }
    let gd = g.gamma_dot(t);
    let us = u.sample(grid, t);
    let ut = u.sample_dt(grid, t);
    let xs = grid.points();
    let dil = cd.dilation_scale * gd / gam;
    let vel = cd.velocity.unwrap_or_else(|| g.velocity(t));
    let i = Complex::new(T::zero(), T::one());

    let h_ad = |v: &[Complex<T>]| apply_hamiltonian_raw(grid, v, &us);
    let f_op = |v: &[Complex<T>]| -> Vec<Complex<T>> {
        h_ad(v).into_iter().map(|z| z.scale(gam * gam)).collect()
    };
    let h_cd = |v: &[Complex<T>]| -> Vec<Complex<T>> {
        let pv = grid.momentum_power(v, 1);
        let xv: Vec<Complex<T>> = v.iter().zip(&xs).map(|(&z, &x)| z.scale(x)).collect();
        let pxv = grid.momentum_power(&xv, 1);
        (0..v.len())
            .map(|n| (pv[n].scale(xs[n]) + pxv[n]).scale(dil) + pv[n].scale(vel) + v[n].scale(cd.epsilon))
            .collect()
    };
    let (mut num, mut den) = (T::zero(), T::zero());
    for phi in probes {
        let hphi = h_ad(phi);
        let fphi: Vec<Complex<T>> = hphi.iter().map(|z| z.scale(gam * gam)).collect();
        // i ∂ₜF φ = i (2γγ̇ H_ad + γ² u_t) φ
        let lhs: Vec<Complex<T>> = (0..phi.len())
            .map(|n| i * (hphi[n].scale(c::<T>(2.0) * gam * gd) + phi[n].scale(gam * gam * ut[n])))
            .collect();
        let hcd_f = h_cd(&fphi);
        let f_hcd = f_op(&h_cd(phi));
        // [H, F] = [H_cd, F] since F ∝ H_ad.
        let r: Vec<Complex<T>> = (0..phi.len()).map(|n| lhs[n] - (hcd_f[n] - f_hcd[n])).collect();
        num = num + norm(&r).powi(2);
        den = den + norm(&fphi).powi(2);
    }
    Ok(num.sqrt() / den.sqrt())
}

/// Lowest `count` eigenvalues of `p² + u(·, t)` on the grid.
pub fn scaled_spectrum<T: Real>(
    u: &dyn SpaceTimeField<T>,
    grid: &Grid1D<T>,
    t: T,
    count: usize,
) -> Result<Vec<T>> {
    let h = hamiltonian_matrix(&u.sample(grid, t), grid)?;
    let n = h.dim();
    let real = h
        .real_entries()
        .ok_or_else(|| crate::Error::Numeric("Hamiltonian matrix is not real".into()))?;
    Ok(eigen::symmetric_lowest(real, n, count)?.values)
}

/// Eigenvalues of `F = γ² H_ad` at each time and their largest deviation
/// from the values at `times[0]`.
pub fn invariant_spectrum_drift<T: Real>(
    u: &dyn SpaceTimeField<T>,
    g: &GammaSchedule<T>,
    grid: &Grid1D<T>,
    times: &[T],
    count: usize,
) -> Result<(Vec<Vec<T>>, T)> {
    let mut all = Vec::with_capacity(times.len());
    for &t in times {
        let g2 = g.gamma(t).powi(2);
        all.push(scaled_spectrum(u, grid, t, count)?.into_iter().map(|e| e * g2).collect::<Vec<T>>());
    }
    let drift = all
        .iter()
        .flat_map(|row| row.iter().zip(&all[0]).map(|(&a, &b)| (a - b).abs()))
        .fold(T::zero(), T::max);
    Ok((all, drift))
}

/// Least-squares fit of the second-order ansatz
/// `H_cd = a p² + (p b + b p) + ε` with `b, ε` in a real Fourier basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderFit<T> {
    /// Minimum-norm solution: `(a, b-coefficients, ε-coefficients)`.
    pub kinetic: T,
    pub drift: Vec<T>,
    pub potential: Vec<T>,
    /// Relative band residual of the minimum-norm solution.
    pub invariant_residual: T,
    /// Dimension of the homogeneous solution space (operators commuting with `H_ad`).
    pub null_dim: usize,
    /// Coordinates of the minimum-norm solution on `(H_ad, p, 1)`.
    pub projection: [T; 3],
    /// Largest relative remainder after projecting the minimum-norm solution
    /// and every homogeneous solution onto `span{H_ad, p, 1}`.
    pub decomposition_residual: T,
}

/// Fits the second-order ansatz to `i u_t = [H_cd, p² + u]` on the band
/// `|k| ≤ band_fraction·k_max`, with `b` and `ε` expanded in the
/// `2·modes + 1` lowest real Fourier functions of the box.
pub fn second_order_fit<T: Real>(
    grid: &Grid1D<T>,
    u: &[T],
    u_t: &[T],
    modes: usize,
    band_fraction: f64,
) -> Result<SecondOrderFit<T>> {
    if u.len() != grid.len() || u_t.len() != grid.len() {
        return Err(invalid("potential samples must match the grid"));
    }
    let band = BandBasis::fraction(grid, band_fraction)?;
    let funcs_basis = BandBasis::new(grid, modes)?;
    let funcs: Vec<Vec<T>> = (0..2 * modes + 1).map(|k| funcs_basis.real_function(k)).collect();
    let nf = funcs.len();
    let h_ad = |v: &[Complex<T>]| apply_hamiltonian_raw(grid, v, u);
    let mult = |f: &[T], v: &[Complex<T>]| -> Vec<Complex<T>> { f.iter().zip(v).map(|(&a, &z)| z.scale(a)).collect() };
    let sym_p = |f: &[T], v: &[Complex<T>]| -> Vec<Complex<T>> {
        let a = grid.momentum_power(&mult(f, v), 1);
        let b = mult(f, &grid.momentum_power(v, 1));
        a.into_iter().zip(b).map(|(x, y)| x + y).collect()
    };
    // Operator j of the ansatz applied to v.
    let op = |j: usize, v: &[Complex<T>]| -> Vec<Complex<T>> {
        if j == 0 {
            grid.momentum_power(v, 2)
        } else if j <= nf {
            sym_p(&funcs[j - 1], v)
        } else {
            mult(&funcs[j - 1 - nf], v)
        }
    };
    let n_op = 1 + 2 * nf;
    let comm = |j: usize| {
        band.plane_wave_matrix(|v: &[Complex<T>]| {
            let a = op(j, &h_ad(v));
            let b = h_ad(&op(j, v));
            a.into_iter().zip(b).map(|(x, y)| x - y).collect()
        })
    };
    let i = Complex::new(T::zero(), T::one());
    let target = band.plane_wave_matrix(|v: &[Complex<T>]| mult(u_t, v).into_iter().map(|z| i * z).collect());
    let cols: Vec<OperatorMatrix<T>> = (0..n_op).map(comm).collect();
    // Columns at round-off level (operators commuting with H_ad, such as a
    // constant ε) are exact null directions; normalizing them would turn
    // noise into a spurious unit column.
    let mut scales: Vec<T> = cols.iter().map(|m| m.frobenius_norm()).collect();
    let biggest = scales.iter().copied().fold(T::zero(), T::max);
    for s in scales.iter_mut() {
        if *s <= biggest * c(1e-12) {
            *s = T::zero();
        }
    }

    let dot = |a: &OperatorMatrix<T>, b: &OperatorMatrix<T>| -> T {
        a.entries().iter().zip(b.entries()).map(|(x, y)| (x.conj() * y).re).sum()
    };
    // Normal equations in column-normalized coordinates.
    let mut gram = vec![T::zero(); n_op * n_op];
    let mut rhs = vec![T::zero(); n_op];
    for p in 0..n_op {
        if scales[p] == T::zero() {
            continue;
        }
        rhs[p] = dot(&cols[p], &target) / scales[p];
        for q in 0..=p {
            if scales[q] == T::zero() {
                continue;
            }
            let v = dot(&cols[p], &cols[q]) / (scales[p] * scales[q]);
            gram[p * n_op + q] = v;
            gram[q * n_op + p] = v;
        }
    }
    let eig = eigen::symmetric_eigen(gram, n_op)?;
    let top = eig.values.iter().copied().fold(T::zero(), |m, v| m.max(v.abs()));
    let cut = top * c(1e-12);
    let mut theta = vec![T::zero(); n_op];
    let mut null = Vec::new();
    for k in 0..n_op {
        let v = eig.vector(k);
        if eig.values[k].abs() <= cut {
            null.push(v.to_vec());
            continue;
        }
        let w = v.iter().zip(&rhs).map(|(&a, &b)| a * b).sum::<T>() / eig.values[k];
        for (t, &a) in theta.iter_mut().zip(v) {
            *t = *t + w * a;
        }
    }
    let unscale = |th: &[T]| -> Vec<T> {
        th.iter().zip(&scales).map(|(&t, &s)| if s > T::zero() { t / s } else { t }).collect()
    };
    let theta = unscale(&theta);

    let mut fitted = OperatorMatrix::zeros(band.dim());
    for (col, &t) in cols.iter().zip(&theta) {
        fitted = fitted.add(&col.scale(Complex::new(t, T::zero())))?;
    }
    let invariant_residual = target.sub(&fitted)?.frobenius_norm() / target.frobenius_norm().max(T::min_positive_value());

    // Decomposition of the ansatz operators onto {H_ad, p, 1}.
    let op_matrix = |th: &[T]| {
        band.plane_wave_matrix(|v: &[Complex<T>]| {
            let mut acc = vec![Complex::new(T::zero(), T::zero()); v.len()];
            for (j, &t) in th.iter().enumerate() {
                if t != T::zero() {
                    for (a, b) in acc.iter_mut().zip(op(j, v)) {
                        *a = *a + b.scale(t);
                    }
                }
            }
            acc
        })
    };
    let basis = [
        band.plane_wave_matrix(h_ad),
        band.plane_wave_matrix(|v: &[Complex<T>]| grid.momentum_power(v, 1)),
        OperatorMatrix::identity(band.dim()),
    ];
    let project = |m: &OperatorMatrix<T>| -> Result<([T; 3], T)> {
        let mut g3 = [[T::zero(); 3]; 3];
        let mut r3 = [T::zero(); 3];
        for p in 0..3 {
            r3[p] = dot(&basis[p], m);
            for q in 0..3 {
                g3[p][q] = dot(&basis[p], &basis[q]);
            }
        }
        let coef = solve3(g3, r3)?;
        let mut rem = m.clone();
        for (b, &k) in basis.iter().zip(&coef) {
            rem = rem.sub(&b.scale(Complex::new(k, T::zero())))?;
        }
        let nm = m.frobenius_norm();
        Ok((coef, if nm > T::zero() { rem.frobenius_norm() / nm } else { T::zero() }))
    };
    let (projection, mut decomposition_residual) = project(&op_matrix(&theta))?;
    for v in &null {
        let (_, r) = project(&op_matrix(&unscale(v)))?;
        decomposition_residual = decomposition_residual.max(r);
    }
    Ok(SecondOrderFit {
        kinetic: theta[0],
        drift: theta[1..=nf].to_vec(),
        potential: theta[nf + 1..].to_vec(),
        invariant_residual,
        null_dim: null.len(),
        projection,
        decomposition_residual,
    })
}

fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Result<[T; 3]> {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite"))
            .expect("non-empty");
        if a[piv][col] == T::zero() {
            return Err(crate::Error::Numeric("singular projection basis".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for k in col..3 {
                a[r][k] = a[r][k] - f * a[col][k];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = [T::zero(); 3];
    for r in (0..3).rev() {
        let s = (r + 1..3).fold(b[r], |acc, k| acc - a[r][k] * x[k]);
        x[r] = s / a[r][r];
    }
    Ok(x)
}
