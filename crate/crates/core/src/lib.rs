//! Counterdiabatic driving from Lax pairs: KdV soliton potentials, Toda
//! lattice couplings on the XY chain, and their extensions.
//!
//! Every numerical type is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix `f64`.

pub mod error;
pub mod extensions;
pub mod field;
pub mod kdv;
pub mod linalg;
pub mod scalar;
pub mod spin;
pub mod tdse;
pub mod toda;

pub use error::{Error, Result};

pub type Grid = field::Grid1D<f64>;
pub type Wave = field::Wavefunction<f64>;
pub type Operator = linalg::OperatorMatrix<f64>;
pub type Soliton = kdv::KdvSoliton<f64>;
pub type Solitons = kdv::SolitonParams<f64>;
pub type Toda = toda::TodaState<f64>;
pub type XYCoeffs = extensions::XYInvariantCoeffs<f64>;
pub type Gamma = extensions::GammaSchedule<f64>;
