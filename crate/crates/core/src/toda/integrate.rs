//! Fixed-step RK4 for the Toda flow, and coupling schedules built on it.

use super::state::{toda_rhs, TodaRate, TodaState};
use crate::error::{invalid, Error, Result};
use crate::scalar::{c, from_usize, Real};

/// Magnitude at which a trajectory is declared divergent.
const BLOW_UP: f64 = 1e6;
/// Largest `dt · ρ(L)` accepted.
const MAX_STEP: f64 = 0.5;

/// One classic RK4 step.
pub fn rk4_step<T: Real>(s: &TodaState<T>, dt: T) -> TodaState<T> {
    let half = dt * c(0.5);
    let k1 = toda_rhs(s);
    let k2 = toda_rhs(&s.axpy(half, &k1));
    let k3 = toda_rhs(&s.axpy(half, &k2));
    let k4 = toda_rhs(&s.axpy(dt, &k3));
    let sixth = dt / c(6.0);
    let two: T = c(2.0);
    let combine = |a: &[T], b: &[T], cc: &[T], d: &[T]| -> Vec<T> {
        (0..a.len()).map(|i| a[i] + two * (b[i] + cc[i]) + d[i]).collect()
    };
    s.axpy(
        sixth,
        &TodaRate {
            dj: combine(&k1.dj, &k2.dj, &k3.dj, &k4.dj),
            dh: combine(&k1.dh, &k2.dh, &k3.dh, &k4.dh),
        },
    )
}

#[derive(Debug, Clone)]
pub struct TodaTrajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<TodaState<T>>,
    /// Largest deviation of `Σ h_n` from its initial value.
    pub trace_drift: T,
    /// Largest deviation of `tr L²` from its initial value.
    pub trace_sq_drift: T,
}

impl<T: Real> TodaTrajectory<T> {
    pub fn last(&self) -> &TodaState<T> {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Integrates from `t0` to `t1` (either direction) with steps of at most
/// `dt`, recording every `record_every`-th state plus both endpoints.
pub fn integrate_toda<T: Real>(
    s0: &TodaState<T>,
    t0: T,
    t1: T,
    dt: T,
    record_every: usize,
) -> Result<TodaTrajectory<T>> {
    if !(dt > T::zero()) || !t0.is_finite() || !t1.is_finite() {
        return Err(invalid("need finite times and dt > 0"));
    }
    let steps = ((t1 - t0).abs() / dt).ceil().to_f64_lossy().max(1.0) as usize;
    let h = (t1 - t0) / from_usize(steps);
    check_step(s0, h)?;
    let every = record_every.max(1);
    let (tr0, sq0) = (s0.trace(), s0.trace_sq());
    let mut out = TodaTrajectory {
        times: vec![t0],
        states: vec![s0.clone()],
        trace_drift: T::zero(),
        trace_sq_drift: T::zero(),
    };
    let mut s = s0.clone();
    for k in 1..=steps {
        s = rk4_step(&s, h);
        let t = t0 + h * from_usize(k);
        if !(s.max_abs() < c(BLOW_UP)) {
            return Err(Error::Divergence(format!("|J| or |h| exceeded 1e6 at t = {t}")));
        }
        out.trace_drift = out.trace_drift.max((s.trace() - tr0).abs());
        out.trace_sq_drift = out.trace_sq_drift.max((s.trace_sq() - sq0).abs());
        if k % every == 0 || k == steps {
            out.times.push(t);
            out.states.push(s.clone());
        }
    }
    Ok(out)
}

fn check_step<T: Real>(s: &TodaState<T>, h: T) -> Result<()> {
    let rho = s.spectral_bound();
    if h.abs() * rho > c(MAX_STEP) {
        return Err(Error::StepSize(format!(
            "dt = {} too large for spectral bound {rho}",
            h.abs()
        )));
    }
    Ok(())
}

/// Time-dependent couplings `t ↦ (J(t), h(t))`.
pub trait CouplingSchedule<T: Real> {
    fn state_at(&mut self, t: T) -> Result<TodaState<T>>;
}

impl<T: Real, F: FnMut(T) -> Result<TodaState<T>>> CouplingSchedule<T> for F {
    fn state_at(&mut self, t: T) -> Result<TodaState<T>> {
        self(t)
    }
}

/// Schedule obtained by integrating the flow on demand. Queries that move
/// forward in time continue from the last one; going backwards restarts
/// from the initial data.
#[derive(Debug, Clone)]
pub struct TodaFlow<T> {
    t0: T,
    s0: TodaState<T>,
    max_dt: T,
    t: T,
    s: TodaState<T>,
}

impl<T: Real> TodaFlow<T> {
    pub fn new(s0: TodaState<T>, t0: T, max_dt: T) -> Result<Self> {
        if !(max_dt > T::zero()) {
            return Err(invalid("max_dt must be positive"));
        }
        check_step(&s0, max_dt)?;
        Ok(Self { t0, s: s0.clone(), s0, max_dt, t: t0 })
    }
}

impl<T: Real> CouplingSchedule<T> for TodaFlow<T> {
    fn state_at(&mut self, t: T) -> Result<TodaState<T>> {
        if (t - self.t0) * (self.t - self.t0) < T::zero()
            || (t - self.t0).abs() < (self.t - self.t0).abs()
        {
            self.t = self.t0;
            self.s = self.s0.clone();
        }
        let span = t - self.t;
        if span != T::zero() {
            let steps = (span.abs() / self.max_dt).ceil().to_f64_lossy().max(1.0) as usize;
            let h = span / from_usize(steps);
            for _ in 0..steps {
                self.s = rk4_step(&self.s, h);
            }
            if !(self.s.max_abs() < c(BLOW_UP)) {
                return Err(Error::Divergence(format!("|J| or |h| exceeded 1e6 at t = {t}")));
            }
            self.t = t;
        }
        Ok(self.s.clone())
    }
}
