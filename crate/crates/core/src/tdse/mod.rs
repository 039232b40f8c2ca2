//! Time-dependent Schrödinger propagation with counterdiabatic terms.

mod propagate;
mod reference;
mod spec;

pub use propagate::{fidelity, propagate, propagate_with, PropagationResult, Scheme};
pub use reference::{instantaneous_levels, reference_adiabatic_state, AdiabaticReference};
pub use spec::{CdMode, DrivingSpec, Velocity};
