//! Toda lattice: flow of the couplings `(J_n, h_n)`, closed-form
//! solutions, RK4 integration and Lax matrices.

mod integrate;
mod solutions;
mod state;

pub use integrate::{integrate_toda, rk4_step, CouplingSchedule, TodaFlow, TodaTrajectory};
pub use solutions::{
    moser_endpoint, n3_closed_form, superposed_solitons, toda_single_soliton, MoserEndpoint,
};
pub use state::{
    lax_matrices, lax_residual, lax_spectrum, lax_tridiagonal, toda_rhs, Boundary,
    LaxPairMatrices, TodaRate, TodaState,
};
