use num_complex::Complex;

use super::reference::AdiabaticReference;
use super::spec::{CdMode, DrivingSpec, Velocity};
use crate::error::{invalid, Error, Result};
use crate::field::{
    apply_hamiltonian_raw, cd3_raw, cd5_raw, symmetrized_p_raw, Grid1D, Wavefunction,
};
use crate::kdv::adiabatic_ground_state;
use crate::scalar::{c, from_usize, Real};

/// Largest `dt · ρ` accepted for the explicit integrator (RK4 is stable on
/// the imaginary axis up to 2√2).
const RK4_STABILITY: f64 = 2.5;
const NORM_FAILURE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct PropagationResult<T: Real> {
    pub times: Vec<T>,
    /// `|⟨ψ_ref(t)|ψ(t)⟩|`, empty when no reference was supplied.
    pub fidelity_series: Vec<T>,
    pub norm_series: Vec<T>,
    /// Lab-frame state at the final time.
    pub final_state: Wavefunction<T>,
    pub max_norm_drift: T,
    pub steps: usize,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Strang,
    Rk4,
}

/// `|⟨ψ|φ⟩|`.
pub fn fidelity<T: Real>(psi: &Wavefunction<T>, phi: &Wavefunction<T>) -> Result<T> {
    Ok(psi.inner(phi)?.norm())
}

/// Propagates with the default reference: the closed-form adiabatic ground
/// state for soliton bases, the band-resolved instantaneous ground state
/// otherwise. Samples about 200 times.
pub fn propagate<T: Real>(
    psi0: &Wavefunction<T>,
    spec: &DrivingSpec<T>,
    t0: T,
    t1: T,
    dt: T,
) -> Result<PropagationResult<T>> {
    let grid = psi0.grid().clone();
    let steps = step_count(t0, t1, dt)?;
    let every = (steps / 200).max(1);
    match spec.soliton_params().cloned() {
        Some(p) => {
            let mut reference = |t: T| adiabatic_ground_state(&p, &grid, t);
            propagate_with(psi0, spec, t0, t1, dt, every, Some(&mut reference))
        }
        None => {
            let mut tracker = AdiabaticReference::new(spec, &grid, 0)?;
            let mut reference = |t: T| tracker.state(t).map(|(_, s)| s);
            propagate_with(psi0, spec, t0, t1, dt, every, Some(&mut reference))
        }
    }
}

fn step_count<T: Real>(t0: T, t1: T, dt: T) -> Result<usize> {
    if !(t1 > t0) || !(dt > T::zero()) || !dt.is_finite() {
        return Err(invalid(format!("need t1 > t0 and dt > 0 (t0={t0}, t1={t1}, dt={dt})")));
    }
    let n = ((t1 - t0) / dt).round().to_f64_lossy().max(1.0);
    Ok(n as usize)
}

/// Solves `i∂ₜψ = H(t)ψ` from `t0` to `t1`, recording every `record_every`
/// steps. `psi0` and the returned state are lab-frame states; a gauge-frame
/// spec converts internally. The step is adjusted to divide the window.
pub fn propagate_with<T: Real>(
    psi0: &Wavefunction<T>,
    spec: &DrivingSpec<T>,
    t0: T,
    t1: T,
    dt: T,
    record_every: usize,
    mut reference: Option<&mut dyn FnMut(T) -> Result<Wavefunction<T>>>,
) -> Result<PropagationResult<T>> {
    psi0.check_finite()?;
    let steps = step_count(t0, t1, dt)?;
    let dt = (t1 - t0) / from_usize::<T>(steps);
    let grid = psi0.grid().clone();
    let gauge = spec.gauge();
    let mut state = match &gauge {
        Some(g) => g.to_gauge_frame(psi0, t0),
        None => psi0.clone(),
    };
    let n0 = state.norm_sq();
    let scheme = if spec.is_split_step() { Scheme::Strang } else { Scheme::Rk4 };
    let mut stepper: Box<dyn Stepper<T>> = match scheme {
        Scheme::Strang => Box::new(Strang::new(spec, &grid, dt)),
        Scheme::Rk4 => Box::new(Rk4::new(spec, &grid, dt, t0, t1)?),
    };
    let every = record_every.max(1);
    let mut out = PropagationResult {
        times: Vec::new(),
        fidelity_series: Vec::new(),
        norm_series: Vec::new(),
        final_state: psi0.clone(),
        max_norm_drift: T::zero(),
        steps,
        scheme,
    };
    let mut record = |out: &mut PropagationResult<T>, t: T, s: &Wavefunction<T>| -> Result<()> {
        let norm = s.norm_sq() / n0;
        let drift = (norm.sqrt() - T::one()).abs();
        out.max_norm_drift = out.max_norm_drift.max(drift);
        if !(drift < c(NORM_FAILURE)) {
            return Err(Error::StepSize(format!(
                "norm drifted by {:.3e} at t = {t} (dt = {dt}, scheme {scheme:?}); reduce dt",
                drift.to_f64_lossy()
            )));
        }
        out.times.push(t);
        out.norm_series.push(norm.sqrt());
        if let Some(r) = reference.as_deref_mut() {
            let lab = match &gauge {
                Some(g) => g.to_lab_frame(s, t),
                None => s.clone(),
            };
            out.fidelity_series.push(fidelity(&r(t)?, &lab)? / n0.sqrt());
        }
        Ok(())
    };
    record(&mut out, t0, &state)?;
    for step in 0..steps {
        let t = t0 + from_usize::<T>(step) * dt;
        stepper.step(state.values_mut(), t);
        if (step + 1) % every == 0 || step + 1 == steps {
            record(&mut out, t + dt, &state)?;
        }
    }
    out.final_state = match &gauge {
        Some(g) => g.to_lab_frame(&state, t1),
        None => state,
    };
    Ok(out)
}

trait Stepper<T: Real> {
    fn step(&mut self, psi: &mut [Complex<T>], t: T);
}

/// `e^{−iV(t+dt)dt/2} e^{−iK dt} e^{−iV(t)dt/2}`.
struct Strang<'a, T: Real> {
    spec: &'a DrivingSpec<T>,
    grid: Grid1D<T>,
    dt: T,
    kinetic: Vec<Complex<T>>,
    cached: Option<(T, Vec<T>)>,
}

impl<'a, T: Real> Strang<'a, T> {
    fn new(spec: &'a DrivingSpec<T>, grid: &Grid1D<T>, dt: T) -> Self {
        let v = match spec.cd() {
            CdMode::LinearP(Velocity::Constant(v)) => *v,
            _ => T::zero(),
        };
        let nyq = grid.nyquist_index();
        let kinetic = grid
            .wavenumbers()
            .into_iter()
            .enumerate()
            .map(|(j, k)| {
                let lin = if Some(j) == nyq { T::zero() } else { v * k };
                Complex::new(T::zero(), -(k * k + lin) * dt).exp()
            })
            .collect();
        Self {
            spec,
            grid: grid.clone(),
            dt,
            kinetic,
            cached: None,
        }
    }

    fn potential(&mut self, t: T) -> Vec<T> {
        if let Some((tc, v)) = self.cached.take() {
            if (tc - t).abs() <= self.dt * c(1e-9) {
                return v;
            }
        }
        self.spec.scalar_potential().sample(&self.grid, t)
    }

    fn half_kick(psi: &mut [Complex<T>], v: &[T], dt: T) {
        let h = dt * c(0.5);
        for (z, &vi) in psi.iter_mut().zip(v) {
            *z = *z * Complex::new(T::zero(), -vi * h).exp();
        }
    }
}

impl<T: Real> Stepper<T> for Strang<'_, T> {
    fn step(&mut self, psi: &mut [Complex<T>], t: T) {
        let v0 = self.potential(t);
        Self::half_kick(psi, &v0, self.dt);
        self.grid.forward(psi);
        for (z, &m) in psi.iter_mut().zip(&self.kinetic) {
            *z = *z * m;
        }
        self.grid.inverse(psi);
        let t1 = t + self.dt;
        let v1 = self.spec.scalar_potential().sample(&self.grid, t1);
        Self::half_kick(psi, &v1, self.dt);
        self.cached = Some((t1, v1));
    }
}

/// Classic RK4 on the spectrally applied Hamiltonian.
struct Rk4<'a, T: Real> {
    spec: &'a DrivingSpec<T>,
    grid: Grid1D<T>,
    dt: T,
    /// End-of-step frame, reused as the next step's start.
    carry: Option<(T, Frame<T>)>,
}

struct Frame<T> {
    u: Vec<T>,
    aux: Vec<T>,
}

impl<'a, T: Real> Rk4<'a, T> {
    fn new(spec: &'a DrivingSpec<T>, grid: &Grid1D<T>, dt: T, t0: T, t1: T) -> Result<Self> {
        let me = Self {
            spec,
            grid: grid.clone(),
            dt,
            carry: None,
        };
        // Spectral-radius bound from the extreme coefficients at a few times.
        let km = grid.k_max();
        let mut rho = T::zero();
        for i in 0..=4 {
            let t = t0 + (t1 - t0) * from_usize::<T>(i) / c(4.0);
            let f = me.frame(t);
            let umax = f.u.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
            let amax = f.aux.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
            let cd = match spec.cd() {
                CdMode::OperatorCd3 { a, c1 } => {
                    a.abs() * (km.powi(3) + c::<T>(1.5) * umax * km) + c1.abs() * km
                }
                CdMode::OperatorCd5 => {
                    c::<T>(16.0) * km.powi(5)
                        + c::<T>(40.0) * umax * km.powi(3)
                        + c::<T>(30.0) * umax * umax * km
                        + c::<T>(10.0) * amax * km
                }
                CdMode::LinearP(_) => amax * km,
                _ => T::zero(),
            };
            rho = rho.max(km * km + umax + cd);
        }
        if dt * rho > c(RK4_STABILITY) {
            return Err(Error::StepSize(format!(
                "dt = {dt} exceeds the explicit stability limit {:.3e} (spectral radius ≈ {:.3e})",
                RK4_STABILITY / rho.to_f64_lossy(),
                rho.to_f64_lossy()
            )));
        }
        Ok(me)
    }

    fn frame(&self, t: T) -> Frame<T> {
        let u = self.spec.scalar_potential().sample(&self.grid, t);
        let aux = match self.spec.cd() {
            CdMode::OperatorCd5 => self.grid.derivative_real(&u, 2).unwrap_or_else(|_| vec![T::zero(); u.len()]),
            CdMode::LinearP(Velocity::Field(v)) => v.sample(&self.grid, t),
            CdMode::LinearP(Velocity::Constant(v)) => vec![*v; u.len()],
            _ => Vec::new(),
        };
        Frame { u, aux }
    }

    /// `−i H ψ`.
    fn rhs(&self, f: &Frame<T>, psi: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut h = apply_hamiltonian_raw(&self.grid, psi, &f.u);
        let extra = match self.spec.cd() {
            CdMode::OperatorCd3 { a, c1 } => Some(cd3_raw(&self.grid, psi, &f.u, *a, *c1)),
            CdMode::OperatorCd5 => Some(cd5_raw(&self.grid, psi, &f.u, &f.aux)),
            CdMode::LinearP(_) => Some(
                symmetrized_p_raw(&self.grid, psi, &f.aux)
                    .into_iter()
                    .map(|z| z.scale(c(0.5)))
                    .collect(),
            ),
            _ => None,
        };
        if let Some(e) = extra {
            for (a, b) in h.iter_mut().zip(e) {
                *a = *a + b;
            }
        }
        let mi = Complex::new(T::zero(), -T::one());
        h.into_iter().map(|z| z * mi).collect()
    }
}

impl<T: Real> Stepper<T> for Rk4<'_, T> {
    fn step(&mut self, psi: &mut [Complex<T>], t: T) {
        let dt = self.dt;
        let half = dt * c(0.5);
        let f0 = match self.carry.take() {
            Some((tc, f)) if (tc - t).abs() <= dt * c(1e-9) => f,
            _ => self.frame(t),
        };
        let fh = self.frame(t + half);
        let f1 = self.frame(t + dt);
        let axpy = |s: T, k: &[Complex<T>]| -> Vec<Complex<T>> {
            psi.iter().zip(k).map(|(&p, &k)| p + k.scale(s)).collect()
        };
        let k1 = self.rhs(&f0, psi);
        let k2 = self.rhs(&fh, &axpy(half, &k1));
        let k3 = self.rhs(&fh, &axpy(half, &k2));
        let k4 = self.rhs(&f1, &axpy(dt, &k3));
        let w = dt / c(6.0);
        for i in 0..psi.len() {
            psi[i] = psi[i] + (k1[i] + (k2[i] + k3[i]).scale(c(2.0)) + k4[i]).scale(w);
        }
        self.carry = Some((t + dt, f1));
    }
}
