//! Inverse engineering of the XY chain and nonisospectral (dilation) driving.

mod scaling;
mod xy;

pub use scaling::{
    generalized_kdv_residual, invariant_spectrum_drift, probe_packets, scaled_invariant_residual,
    scaled_spectrum, second_order_fit, DilationCd, GammaSchedule, ScaledField, SecondOrderFit, TimeMap,
};
pub use xy::{
    alpha_extension_check, alpha_relations, schedule_rate, toda_reduced_coeffs, xy_equations,
    xy_invariant_residual, AlphaFixture, AlphaReport, XYInvariantCoeffs, XYResidual, XYSchedule,
};
