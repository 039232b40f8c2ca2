//! Periodic grids, wavefunctions, spectral operators and invariant residuals.

mod band;
mod grid;
mod ops;
mod residual;
mod wave;

pub use band::BandBasis;
pub use grid::Grid1D;
pub use ops::{
    apply_hamiltonian, apply_symmetrized_p, derivative, hamiltonian_matrix, momentum_power,
    operator_apply_cd3, operator_apply_cd5, operator_apply_cd5_with, operator_matrix_from_action,
};
#[allow(unused_imports)]
pub(crate) use ops::{apply_hamiltonian_raw, cd3_raw, cd5_raw, symmetrized_p_raw};
pub use residual::{band_invariant_residual, invariant_residual, invariant_residual_exact};
pub use wave::Wavefunction;
