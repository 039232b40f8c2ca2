//! Closed-form Toda solutions and the long-time (sorting) limit.

use super::integrate::integrate_toda;
use super::state::{lax_spectrum, Boundary, TodaState};
use crate::error::{invalid, Result};
use crate::scalar::{c, from_usize, Real};

/// Three-site open chain started from `J(0) = (v1, v2)`, `h(0) = 0`.
///
/// As `t → ∞` the couplings vanish and `h → (v, 0, −v)` with
/// `v = √(v1² + v2²)`. Written in terms of `q = e^{−2v|t|}` so no
/// hyperbolic function overflows.
pub fn n3_closed_form<T: Real>(v1: T, v2: T, t: T) -> Result<TodaState<T>> {
    if !(v1 > T::zero() && v2 > T::zero()) || !t.is_finite() {
        return Err(invalid(format!("need v1, v2 > 0 and finite t, got ({v1}, {v2}, {t})")));
    }
    if t == T::zero() {
        return TodaState::open(vec![v1, v2], vec![T::zero(); 3]);
    }
    let v = v1.hypot(v2);
    let q = (c::<T>(-2.0) * v * t.abs()).exp();
    let sign = if t < T::zero() { -T::one() } else { T::one() };
    let two: T = c(2.0);
    // cosh(2vt) and sinh(2vt), both divided by e^{2v|t|}/2
    let (ch, sh) = (T::one() + q * q, sign * (T::one() - q * q));
    let coupling = |a: T, b: T| {
        let den = a * a * ch + two * b * b * q;
        v * a * (two * q).sqrt() * (two * a * a * q + b * b * ch).sqrt() / den
    };
    let field = |a: T, b: T| v * a * a * sh / (a * a * ch + two * b * b * q);
    let h1 = field(v1, v2);
    let h3 = -field(v2, v1);
    TodaState::open(vec![coupling(v1, v2), coupling(v2, v1)], vec![h1, -h1 - h3, h3])
}

/// Single soliton of the infinite chain seen through sites `1..=N`.
///
/// With `z = e^{−κ}`, `c(t) = c0 e^{t sinh κ}` and
/// `τ_m = 1 + c² z^{2m} / (1 − z²)`:
/// `J_n = ½ √(τ_n τ_{n+2} / τ_{n+1}²)`, `h_n = sinh κ (g_{n+1} − g_n)` where
/// `g_m = 1 − 1/τ_m`. Everything is evaluated from `ln(τ_m − 1)`, so large
/// `t` cannot overflow.
///
/// The profile peaks near `κ n ≈ t sinh κ + ln c0`. Check
/// [`TodaState::edge_defect`] to see whether the window is wide enough.
pub fn toda_single_soliton<T: Real>(sites: usize, t: T, kappa: T, c0: T) -> Result<TodaState<T>> {
    let (j, h) = soliton_profile(sites, t, kappa, c0)?;
    TodaState::new(j, h, Boundary::InfiniteTruncated)
}

fn soliton_profile<T: Real>(sites: usize, t: T, kappa: T, c0: T) -> Result<(Vec<T>, Vec<T>)> {
    if sites < 2 {
        return Err(invalid("need at least 2 sites"));
    }
    if !(kappa > T::zero()) || !(c0 > T::zero()) || !t.is_finite() {
        return Err(invalid(format!("need κ > 0, c0 > 0, finite t; got ({kappa}, {c0}, {t})")));
    }
    let two: T = c(2.0);
    let z2 = (-two * kappa).exp();
    let shift = two * c0.ln() + two * t * kappa.sinh() - (T::one() - z2).ln();
    // exponent of τ_m − 1, sites m = 1..=N+2
    let expo = |m: usize| shift - two * kappa * from_usize::<T>(m);
    let ln_tau = |m: usize| softplus(expo(m));
    let g = |m: usize| sigmoid(expo(m));
    let half: T = c(0.5);
    let j = (1..sites)
        .map(|n| half * (half * (ln_tau(n) + ln_tau(n + 2) - two * ln_tau(n + 1))).exp())
        .collect();
    let h = (1..=sites).map(|n| kappa.sinh() * (g(n + 1) - g(n))).collect();
    Ok((j, h))
}

/// Approximate multi-soliton initial data: couplings multiply (relative to
/// the far-field `1/2`), fields add. Exact only when the solitons are far
/// apart; integrate with [`integrate_toda`] to watch them interact.
pub fn superposed_solitons<T: Real>(sites: usize, t: T, solitons: &[(T, T)]) -> Result<TodaState<T>> {
    if solitons.is_empty() {
        return Err(invalid("no solitons given"));
    }
    let two: T = c(2.0);
    let mut j = vec![c::<T>(0.5); sites.saturating_sub(1)];
    let mut h = vec![T::zero(); sites];
    for &(kappa, c0) in solitons {
        let (jk, hk) = soliton_profile(sites, t, kappa, c0)?;
        j.iter_mut().zip(jk).for_each(|(a, b)| *a = *a * two * b);
        h.iter_mut().zip(hk).for_each(|(a, b)| *a = *a + b);
    }
    TodaState::new(j, h, Boundary::InfiniteTruncated)
}

fn softplus<T: Real>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Long-time limit of an open chain.
#[derive(Debug, Clone)]
pub struct MoserEndpoint<T> {
    pub final_time: T,
    pub state: TodaState<T>,
    /// Eigenvalues of `L(0)` in descending order — the limit of `h`.
    pub target: Vec<T>,
    /// `max(max_n J_n, max_n |h_n − target_n|)`.
    pub error: T,
}

/// Integrates to `t = horizon / gap`, where `gap` is the smallest spacing of
/// the spectrum of `L(0)`, and compares with the sorted eigenvalues.
pub fn moser_endpoint<T: Real>(s0: &TodaState<T>, horizon: T, dt: T) -> Result<MoserEndpoint<T>> {
    if s0.boundary() != Boundary::Open {
        return Err(invalid("the sorting limit needs an open chain"));
    }
    let mut target = lax_spectrum(s0)?;
    let gap = target
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(T::infinity(), T::min);
    if !(gap > T::zero()) {
        return Err(crate::Error::DegenerateSpectrum("L(0) has a repeated eigenvalue".into()));
    }
    target.reverse();
    let final_time = horizon / gap;
    let traj = integrate_toda(s0, T::zero(), final_time, dt, usize::MAX)?;
    let state = traj.last().clone();
    let error = state
        .couplings()
        .iter()
        .map(|j| j.abs())
        .chain(state.fields().iter().zip(&target).map(|(&h, &e)| (h - e).abs()))
        .fold(T::zero(), T::max);
    Ok(MoserEndpoint { final_time, state, target, error })
}
