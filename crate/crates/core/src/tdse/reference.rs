use num_complex::Complex;

use super::spec::DrivingSpec;
use crate::error::{invalid, Result};
use crate::field::{apply_hamiltonian_raw, BandBasis, Grid1D, Wavefunction};
use crate::kdv::SharedField;
use crate::scalar::Real;

/// Largest band used for Rayleigh–Ritz reference states.
const MAX_BAND_MODES: usize = 200;

/// Instantaneous eigenstates of `H_ad(t) = p² + u(x, t)` for one level, with
/// phase continuity between calls (each new state maximizes
/// `Re⟨ψ_prev|ψ⟩`).
///
/// States come from a Rayleigh–Ritz solve in the lowest Fourier modes of the
/// grid; for smooth bound states this reproduces the eigenvectors of the full
/// grid Hamiltonian to round-off at a fraction of the cost.
pub struct AdiabaticReference<T: Real> {
    base: SharedField<T>,
    band: BandBasis<T>,
    level: usize,
    prev: Option<Wavefunction<T>>,
}

impl<T: Real> AdiabaticReference<T> {
    pub fn new(spec: &DrivingSpec<T>, grid: &Grid1D<T>, level: usize) -> Result<Self> {
        let m = ((grid.len() / 2) * 3 / 10).clamp(1, MAX_BAND_MODES);
        Ok(Self {
            base: spec.base().clone(),
            band: BandBasis::new(grid, m)?,
            level,
            prev: None,
        })
    }

    /// Energy and state of the tracked level at time `t`.
    pub fn state(&mut self, t: T) -> Result<(T, Wavefunction<T>)> {
        let grid = self.band.grid().clone();
        let u = self.base.sample(&grid, t);
        let (vals, states) = self
            .band
            .lowest_states(|v| apply_hamiltonian_raw(&grid, v, &u), self.level + 1)?;
        // Continuum threshold: potential at the box edge.
        let threshold = u[0].min(u[u.len() - 1]);
        let bound = vals.iter().filter(|&&e| e < threshold).count();
        if self.level >= bound {
            return Err(invalid(format!(
                "level {} requested but only {bound} bound state(s) below {threshold}",
                self.level
            )));
        }
        let values: Vec<Complex<T>> = states[self.level]
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        let mut psi = Wavefunction::new(&grid, values)?.normalized()?;
        let align = match &self.prev {
            Some(p) => p.inner(&psi)?,
            // First call: make the largest component real and positive.
            None => psi
                .values()
                .iter()
                .copied()
                .fold(Complex::new(T::zero(), T::zero()), |m, z| if z.norm() > m.norm() { z } else { m }),
        };
        if align.norm() > T::zero() {
            let phase = align.conj().scale(T::one() / align.norm());
            for z in psi.values_mut() {
                *z = *z * phase;
            }
        }
        self.prev = Some(psi.clone());
        Ok((vals[self.level], psi))
    }
}

/// Single-shot instantaneous eigenstate (no phase history).
pub fn reference_adiabatic_state<T: Real>(
    spec: &DrivingSpec<T>,
    grid: &Grid1D<T>,
    t: T,
    level: usize,
) -> Result<Wavefunction<T>> {
    AdiabaticReference::new(spec, grid, level)?.state(t).map(|(_, s)| s)
}

/// Energies of the lowest `count` band-resolved levels at time `t`.
pub fn instantaneous_levels<T: Real>(
    base: &SharedField<T>,
    grid: &Grid1D<T>,
    t: T,
    count: usize,
) -> Result<Vec<T>> {
    let m = ((grid.len() / 2) * 3 / 10).clamp(1, MAX_BAND_MODES);
    let band = BandBasis::new(grid, m)?;
    let u = base.sample(grid, t);
    band.lowest_states(|v| apply_hamiltonian_raw(grid, v, &u), count)
        .map(|(v, _)| v)
}
