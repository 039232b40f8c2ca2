use super::field::{LogTau, SpaceTimeField, TauField};
use super::jet::Jet;
use crate::error::{invalid, Error, Result};
use crate::scalar::{c, Real};

/// Decay rates and amplitudes of a one- or two-soliton KdV solution.
///
/// Two-soliton parameters are stored with `κ1 > κ2`, so `κ1` always labels
/// the deeper level `E₀ = −κ1²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonParams<T> {
    kappas: Vec<T>,
    amps: Vec<T>,
}

impl<T: Real> SolitonParams<T> {
    pub fn new(kappas: Vec<T>, amps: Vec<T>) -> Result<Self> {
        if kappas.is_empty() || kappas.len() > 2 || kappas.len() != amps.len() {
            return Err(invalid(format!(
                "expected one or two (κ, A) pairs, got {} κ and {} A",
                kappas.len(),
                amps.len()
            )));
        }
        for &k in &kappas {
            if !(k > T::zero() && k.is_finite()) {
                return Err(invalid(format!("κ must be positive and finite, got {k}")));
            }
        }
        for &a in &amps {
            if !(a > T::zero() && a.is_finite()) {
                return Err(invalid(format!("amplitude must be positive and finite, got {a}")));
            }
        }
        let (mut kappas, mut amps) = (kappas, amps);
        if kappas.len() == 2 {
            if kappas[0] == kappas[1] {
                return Err(Error::DegenerateSoliton(format!(
                    "κ1 = κ2 = {} leaves the two-soliton tau function singular",
                    kappas[0]
                )));
            }
            if kappas[0] < kappas[1] {
                kappas.swap(0, 1);
                amps.swap(0, 1);
            }
        }
        Ok(Self { kappas, amps })
    }

    pub fn single(kappa: T) -> Result<Self> {
        Self::new(vec![kappa], vec![T::one()])
    }

    pub fn double(k1: T, a1: T, k2: T, a2: T) -> Result<Self> {
        Self::new(vec![k1, k2], vec![a1, a2])
    }

    pub fn kappas(&self) -> &[T] {
        &self.kappas
    }

    pub fn amps(&self) -> &[T] {
        &self.amps
    }

    pub fn is_double(&self) -> bool {
        self.kappas.len() == 2
    }

    pub fn kappa1(&self) -> T {
        self.kappas[0]
    }

    /// `κ2`, or zero for a single soliton.
    pub fn kappa2(&self) -> T {
        self.kappas.get(1).copied().unwrap_or_else(T::zero)
    }

    /// Ground-state energy `−κ1²`.
    pub fn ground_energy(&self) -> T {
        -self.kappa1() * self.kappa1()
    }

    /// Bound-state energies `−κ_i²`, deepest first.
    pub fn bound_energies(&self) -> Vec<T> {
        self.kappas.iter().map(|&k| -k * k).collect()
    }

    /// Interaction factor `B = (κ1 − κ2)/(κ1 + κ2)`.
    pub(crate) fn interaction(&self) -> T {
        let (k1, k2) = (self.kappa1(), self.kappa2());
        (k1 - k2) / (k1 + k2)
    }

    /// `ln τ` with `τ = 1 + A1 e^{2η1} [+ A2 e^{2η2} + B² A1 A2 e^{2(η1+η2)}]`,
    /// `η_i = κ_i x − 4 κ_i³ t`.
    pub(crate) fn log_tau(&self) -> LogTau<T> {
        let rate = |k: T| (c::<T>(2.0) * k, c::<T>(-8.0) * k * k * k);
        let mut terms = vec![(T::zero(), T::zero(), T::zero())];
        let (l1, m1) = rate(self.kappa1());
        terms.push((self.amps[0].ln(), l1, m1));
        if self.is_double() {
            let (l2, m2) = rate(self.kappa2());
            let b = self.interaction();
            terms.push((self.amps[1].ln(), l2, m2));
            terms.push((
                c::<T>(2.0) * b.ln() + self.amps[0].ln() + self.amps[1].ln(),
                l1 + l2,
                m1 + m2,
            ));
        }
        LogTau::new(terms)
    }

    /// `ln σ` with `σ = 1 + B A2 e^{2η2}` (`σ ≡ 1` for one soliton).
    pub(crate) fn log_sigma(&self) -> LogTau<T> {
        let mut terms = vec![(T::zero(), T::zero(), T::zero())];
        if self.is_double() {
            let k2 = self.kappa2();
            terms.push((
                (self.interaction() * self.amps[1]).ln(),
                c::<T>(2.0) * k2,
                c::<T>(-8.0) * k2 * k2 * k2,
            ));
        }
        LogTau::new(terms)
    }
}

/// KdV soliton potential `u = −2 ∂ₓ² ln τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct KdvSoliton<T> {
    params: SolitonParams<T>,
    field: TauField<T>,
}

impl<T: Real> KdvSoliton<T> {
    pub fn new(params: SolitonParams<T>) -> Self {
        let field = TauField::new(params.log_tau());
        Self { params, field }
    }

    pub fn params(&self) -> &SolitonParams<T> {
        &self.params
    }
}

impl<T: Real> SpaceTimeField<T> for KdvSoliton<T> {
    fn jet(&self, x: T, t: T) -> Jet<T> {
        self.field.jet(x, t)
    }

    fn value(&self, x: T, t: T) -> T {
        self.field.value(x, t)
    }

    fn dt(&self, x: T, t: T) -> T {
        self.field.dt(x, t)
    }

    fn max_x_order(&self) -> usize {
        self.field.max_x_order()
    }
}

/// `u = −2κ² sech²(κx − 4κ³t)`.
pub fn single_soliton<T: Real>(kappa: T) -> Result<KdvSoliton<T>> {
    Ok(KdvSoliton::new(SolitonParams::single(kappa)?))
}

/// Two-soliton potential; `κ1 = κ2` is rejected as degenerate.
pub fn double_soliton<T: Real>(params: SolitonParams<T>) -> Result<KdvSoliton<T>> {
    if !params.is_double() {
        return Err(invalid("double_soliton needs two (κ, A) pairs"));
    }
    Ok(KdvSoliton::new(params))
}

/// `u = −2κ² sech²(κ(x − c t))`, a sech² well moving at an arbitrary speed.
pub fn traveling_soliton<T: Real>(kappa: T, speed: T) -> Result<TauField<T>> {
    if !(kappa > T::zero()) {
        return Err(invalid(format!("κ must be positive, got {kappa}")));
    }
    let l = c::<T>(2.0) * kappa;
    Ok(TauField::new(LogTau::new(vec![
        (T::zero(), T::zero(), T::zero()),
        (T::zero(), l, -l * speed),
    ])))
}
