//! Isotropic XY chain driven by Toda couplings, in its one- and two-flip
//! sectors.

mod evolve;
mod oracle;
mod sector;
mod spectrum;

pub use evolve::{evolve_sector, sector_eigenstate, EvolveOptions, SectorEvolution, TrackedLevel};
pub use oracle::{
    eigenbasis_offdiagonal_distance, inverse_engineering_pair, invariant_residual_sector,
    spectral_cd_oracle, theta_gauge, DEGENERACY_TOL,
};
pub use sector::{
    adiabatic_one_body, build_sector, counterdiabatic_one_body, one_body_matrix, pair_index,
    rate_one_body, sector_operator, two_particle_lift, BasisLabel, Sector, SectorMatrixSet,
};
pub use spectrum::{
    band_structure, pair_eigenvector, pair_levels, sector_spectrum, single_flip_eigen,
    spectrum_flow, Band, SpectrumFlow,
};
