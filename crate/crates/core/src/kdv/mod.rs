//! KdV soliton potentials, their supersymmetric partners, and the
//! counterdiabatic operators of the KdV hierarchy.

mod field;
mod hierarchy;
pub mod jet;
mod soliton;
mod susy;

pub use field::{AnalyticField, LogTau, SharedField, SpaceTimeField, SumField, TauField};
pub use hierarchy::{
    hierarchy_speed, kdv5_residual, kdv_invariant_residual, kdv_residual, CdOrder, TimeDerivative,
};
pub use jet::Jet;
pub use soliton::{double_soliton, single_soliton, traveling_soliton, KdvSoliton, SolitonParams};
pub(crate) use susy::gauge_velocity_field;
pub use susy::{
    adiabatic_ground_state, cd_potential_vcd, partner_closed_form, partner_phase, partner_potential,
    superpotential, CdPotential, Gauge, GaugeVelocity, PartnerPotential, Superpotential, VcdConvention,
};
