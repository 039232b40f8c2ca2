//! Supersymmetric factorization of soliton potentials, the gauge-transformed
//! counterdiabatic potential, and the closed-form adiabatic ground state.

use std::sync::Arc;

use num_complex::Complex;

use super::field::{LogTau, SharedField, SpaceTimeField, TauField};
use super::jet::Jet;
use super::soliton::SolitonParams;
use crate::error::{Error, Result};
use crate::field::{Grid1D, Wavefunction};
use crate::scalar::{c, Real};

/// `W = −κ1 + ∂ₓ ln τ − ∂ₓ ln σ`, so that `u = W² − W_x + E₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superpotential<T> {
    kappa1: T,
    tau: LogTau<T>,
    sigma: LogTau<T>,
}

impl<T: Real> Superpotential<T> {
    pub fn ground_energy(&self) -> T {
        -self.kappa1 * self.kappa1
    }
}

impl<T: Real> SpaceTimeField<T> for Superpotential<T> {
    fn jet(&self, x: T, t: T) -> Jet<T> {
        (self.tau.jet(x, t) - self.sigma.jet(x, t))
            .diff_x()
            .add_const(-self.kappa1)
    }

    fn max_x_order(&self) -> usize {
        super::jet::MAX_ORDER - 1
    }
}

pub fn superpotential<T: Real>(params: &SolitonParams<T>) -> Superpotential<T> {
    Superpotential {
        kappa1: params.kappa1(),
        tau: params.log_tau(),
        sigma: params.log_sigma(),
    }
}

/// `ũ = W² + W_x + E₀`.
pub struct PartnerPotential<T> {
    w: SharedField<T>,
    e0: T,
}

impl<T: Real> SpaceTimeField<T> for PartnerPotential<T> {
    fn jet(&self, x: T, t: T) -> Jet<T> {
        let w = self.w.jet(x, t);
        (w.square() + w.diff_x()).add_const(self.e0)
    }

    fn max_x_order(&self) -> usize {
        self.w.max_x_order().saturating_sub(1)
    }
}

pub fn partner_potential<T: Real>(w: SharedField<T>, e0: T) -> PartnerPotential<T> {
    PartnerPotential { w, e0 }
}

/// Closed form of the partner of a soliton potential: zero for one soliton,
/// `−2κ2² sech²(η2 + δ2)` for two.
pub fn partner_closed_form<T: Real>(params: &SolitonParams<T>) -> TauField<T> {
    TauField::new(params.log_sigma())
}

/// Phase shift `δ2 = ½ ln[A2 (κ1 − κ2)/(κ1 + κ2)]` of the partner soliton.
pub fn partner_phase<T: Real>(params: &SolitonParams<T>) -> Option<T> {
    params
        .is_double()
        .then(|| (params.interaction() * params.amps()[1]).ln() * c(0.5))
}

/// Normalized adiabatic ground state `ψ ∝ e^{κ1 x} σ/τ` sampled on `grid`.
///
/// Solves the zero-mode condition `∂ₓψ = −Wψ`. Fails with
/// [`Error::BoxTooSmall`] when more than `1e-8` of the norm would lie
/// outside the box.
pub fn adiabatic_ground_state<T: Real>(
    params: &SolitonParams<T>,
    grid: &Grid1D<T>,
    t: T,
) -> Result<Wavefunction<T>> {
    let (tau, sigma) = (params.log_tau(), params.log_sigma());
    let k1 = params.kappa1();
    let logs: Vec<T> = grid
        .points()
        .into_iter()
        .map(|x| k1 * x + sigma.value(x, t) - tau.value(x, t))
        .collect();
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let values = logs
        .iter()
        .map(|&l| Complex::new((l - top).exp(), T::zero()))
        .collect();
    let psi = Wavefunction::new(grid, values)?.normalized()?;
    // Both tails decay as e^{−κ1|x|}; the mass beyond an edge is |ψ|²/(2κ1).
    let v = psi.values();
    let tail = (v[0].norm_sqr() + v[v.len() - 1].norm_sqr()) / (c::<T>(2.0) * k1);
    if tail > c(1e-8) {
        return Err(Error::BoxTooSmall(format!(
            "ground state leaks {:.3e} of its norm past [{}, {}] at t = {t}",
            tail.to_f64_lossy(),
            grid.x_min(),
            grid.x_max()
        )));
    }
    Ok(psi)
}

/// Offset convention for the partner potential inside `V_cd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VcdConvention {
    /// Partner `ũ` vanishing at infinity:
    /// `V_cd = −ũ² + 4(κ1² − κ2²) ũ − 4κ1⁴`.
    #[default]
    Vanishing,
    /// Partner shifted to `ũ + κ1²` before inserting it into
    /// `−(ũ − 2κ1²)² − 4κ2² ũ`. Kept for comparison; it does not preserve the
    /// adiabatic state.
    Offset,
}

/// Scalar counterdiabatic potential in the gauge frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CdPotential<T> {
    partner: TauField<T>,
    kappa1: T,
    kappa2: T,
    convention: VcdConvention,
    drop_constants: bool,
}

impl<T: Real> CdPotential<T> {
    /// Value far from the partner well, where `ũ → 0`.
    pub fn asymptote(&self) -> T {
        let (k1, k2) = (self.kappa1 * self.kappa1, self.kappa2 * self.kappa2);
        match self.convention {
            VcdConvention::Vanishing => c::<T>(-4.0) * k1 * k1,
            VcdConvention::Offset => -k1 * k1 - c::<T>(4.0) * k2 * k1,
        }
    }
}

impl<T: Real> CdPotential<T> {
    fn apply(&self, u: T) -> T {
        let (k1, k2) = (self.kappa1 * self.kappa1, self.kappa2 * self.kappa2);
        let u = match self.convention {
            VcdConvention::Vanishing => u,
            VcdConvention::Offset => u + k1,
        };
        let s = u - c::<T>(2.0) * k1;
        let v = -s * s - c::<T>(4.0) * k2 * u;
        if self.drop_constants {
            v - self.asymptote()
        } else {
            v
        }
    }
}

impl<T: Real> SpaceTimeField<T> for CdPotential<T> {
    fn value(&self, x: T, t: T) -> T {
        self.apply(self.partner.value(x, t))
    }

    fn jet(&self, x: T, t: T) -> Jet<T> {
        let (k1, k2) = (self.kappa1 * self.kappa1, self.kappa2 * self.kappa2);
        let mut u = self.partner.jet(x, t);
        if self.convention == VcdConvention::Offset {
            u = u.add_const(k1);
        }
        let v = -u.add_const(c::<T>(-2.0) * k1).square() - u.scale(c::<T>(4.0) * k2);
        if self.drop_constants {
            v.add_const(-self.asymptote())
        } else {
            v
        }
    }

    fn max_x_order(&self) -> usize {
        self.partner.max_x_order()
    }
}

/// `V_cd` for soliton parameters. A single soliton yields the constant
/// `−4κ1⁴` (nothing to drive beyond translation).
pub fn cd_potential_vcd<T: Real>(
    params: &SolitonParams<T>,
    convention: VcdConvention,
    drop_constants: bool,
) -> CdPotential<T> {
    CdPotential {
        partner: partner_closed_form(params),
        kappa1: params.kappa1(),
        kappa2: params.kappa2(),
        convention,
        drop_constants,
    }
}

/// Gauge transformation `U = e^{−iΦ}`, `Φ_x = a = ũ − 2κ1²`, relating the
/// momentum-linear counterdiabatic term `−(p a + a p)` to `V_cd`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gauge<T> {
    kappa1: T,
    kappa2: T,
    partner: TauField<T>,
    delta2: T,
}

impl<T: Real> Gauge<T> {
    pub fn new(params: &SolitonParams<T>) -> Self {
        Self {
            kappa1: params.kappa1(),
            kappa2: params.kappa2(),
            partner: partner_closed_form(params),
            delta2: partner_phase(params).unwrap_or_else(T::zero),
        }
    }

    /// `Φ(x, t) = −2κ2 (tanh(η2 + δ2) + 1) − 2κ1² x`.
    pub fn phase(&self, x: T, t: T) -> T {
        let k2 = self.kappa2;
        let eta = k2 * x - c::<T>(4.0) * k2 * k2 * k2 * t + self.delta2;
        c::<T>(-2.0) * k2 * (eta.tanh() + T::one()) - c::<T>(2.0) * self.kappa1 * self.kappa1 * x
    }

    /// `a(x, t) = ũ − 2κ1²`.
    pub fn coefficient(&self, x: T, t: T) -> T {
        self.partner.value(x, t) - c::<T>(2.0) * self.kappa1 * self.kappa1
    }

    /// Lab-frame state → gauge frame: `ψ̃ = e^{−iΦ} ψ`.
    pub fn to_gauge_frame(&self, psi: &Wavefunction<T>, t: T) -> Wavefunction<T> {
        self.rotate(psi, t, -T::one())
    }

    /// Gauge frame → lab frame: `ψ = e^{+iΦ} ψ̃`.
    pub fn to_lab_frame(&self, psi: &Wavefunction<T>, t: T) -> Wavefunction<T> {
        self.rotate(psi, t, T::one())
    }

    fn rotate(&self, psi: &Wavefunction<T>, t: T, sign: T) -> Wavefunction<T> {
        let values = psi
            .grid()
            .points()
            .into_iter()
            .zip(psi.values())
            .map(|(x, &z)| z * Complex::new(T::zero(), sign * self.phase(x, t)).exp())
            .collect();
        Wavefunction::new(psi.grid(), values).expect("same grid")
    }
}

/// Counterdiabatic velocity `v = −2a = 4κ1² − 2ũ`, so that
/// `½(p v + v p) = −(p a + a p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeVelocity<T> {
    partner: TauField<T>,
    kappa1: T,
}

impl<T: Real> GaugeVelocity<T> {
    pub fn new(params: &SolitonParams<T>) -> Self {
        Self {
            partner: partner_closed_form(params),
            kappa1: params.kappa1(),
        }
    }
}

impl<T: Real> SpaceTimeField<T> for GaugeVelocity<T> {
    fn jet(&self, x: T, t: T) -> Jet<T> {
        self.partner
            .jet(x, t)
            .scale(c(-2.0))
            .add_const(c::<T>(4.0) * self.kappa1 * self.kappa1)
    }

    fn value(&self, x: T, t: T) -> T {
        c::<T>(4.0) * self.kappa1 * self.kappa1 - c::<T>(2.0) * self.partner.value(x, t)
    }

    fn max_x_order(&self) -> usize {
        self.partner.max_x_order()
    }
}

pub(crate) fn gauge_velocity_field<T: Real>(params: &SolitonParams<T>) -> SharedField<T> {
    Arc::new(GaugeVelocity::new(params))
}
