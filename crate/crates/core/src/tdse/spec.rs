use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::kdv::{
    cd_potential_vcd, gauge_velocity_field, Gauge, KdvSoliton, SharedField, SolitonParams,
    SpaceTimeField, VcdConvention,
};
use crate::scalar::Real;

/// Coefficient of a momentum-linear counterdiabatic term `½(p v + v p)`.
#[derive(Clone)]
pub enum Velocity<T> {
    Constant(T),
    Field(SharedField<T>),
}

/// Counterdiabatic term added to `p² + u`.
#[derive(Clone)]
pub enum CdMode<T> {
    None,
    /// Scalar `V_cd` in the gauge frame; needs two-soliton parameters.
    ScalarVcd {
        convention: VcdConvention,
        drop_constants: bool,
    },
    /// `a [p³ + ¾(p u + u p)] + c1 p`.
    OperatorCd3 { a: T, c1: T },
    /// Fifth-order hierarchy operator.
    OperatorCd5,
    /// `½(p v + v p)`.
    LinearP(Velocity<T>),
}

impl<T> CdMode<T> {
    pub fn name(&self) -> &'static str {
        match self {
            CdMode::None => "none",
            CdMode::ScalarVcd { .. } => "scalar_vcd",
            CdMode::OperatorCd3 { .. } => "operator_cd3",
            CdMode::OperatorCd5 => "operator_cd5",
            CdMode::LinearP(_) => "linear_p",
        }
    }
}

/// What drives the Schrödinger evolution: a base potential and a CD mode.
#[derive(Clone)]
pub struct DrivingSpec<T: Real> {
    base: SharedField<T>,
    soliton: Option<SolitonParams<T>>,
    cd: CdMode<T>,
    /// Scalar part of the Hamiltonian on top of `p²`.
    scalar: Option<SharedField<T>>,
}

impl<T: Real> DrivingSpec<T> {
    /// Arbitrary base potential. `ScalarVcd` is rejected: it needs soliton data.
    pub fn new(base: SharedField<T>, cd: CdMode<T>) -> Result<Self> {
        if matches!(cd, CdMode::ScalarVcd { .. }) {
            return Err(invalid("scalar_vcd needs a two-soliton base (use DrivingSpec::soliton)"));
        }
        Self::checked(base, None, cd)
    }

    /// KdV soliton base.
    pub fn soliton(params: SolitonParams<T>, cd: CdMode<T>) -> Result<Self> {
        if matches!(cd, CdMode::ScalarVcd { .. }) && !params.is_double() {
            return Err(invalid("scalar_vcd requires a two-soliton base"));
        }
        let base: SharedField<T> = Arc::new(KdvSoliton::new(params.clone()));
        Self::checked(base, Some(params), cd)
    }

    /// Two-soliton base driven in the operator frame by `−(p a + a p)`, the
    /// pre-gauge form of `V_cd`. One soliton gives the constant `4κ² p`.
    pub fn soliton_operator_frame(params: SolitonParams<T>) -> Result<Self> {
        let v = if params.is_double() {
            Velocity::Field(gauge_velocity_field(&params))
        } else {
            let k = params.kappa1();
            Velocity::Constant(T::lit(4.0) * k * k)
        };
        Self::soliton(params, CdMode::LinearP(v))
    }

    fn checked(base: SharedField<T>, soliton: Option<SolitonParams<T>>, cd: CdMode<T>) -> Result<Self> {
        let need = match &cd {
            CdMode::OperatorCd3 { .. } => 0,
            CdMode::OperatorCd5 => 2,
            _ => 0,
        };
        if base.max_x_order() < need {
            return Err(invalid(format!(
                "{} needs ∂ₓ^{need} of the base potential; it provides {}",
                cd.name(),
                base.max_x_order()
            )));
        }
        let scalar = match (&cd, &soliton) {
            (CdMode::ScalarVcd { convention, drop_constants }, Some(p)) => {
                let vcd: SharedField<T> = Arc::new(cd_potential_vcd(p, *convention, *drop_constants));
                Some(Arc::new(crate::kdv::SumField::new(vec![base.clone(), vcd])) as SharedField<T>)
            }
            _ => None,
        };
        Ok(Self {
            base,
            soliton,
            cd,
            scalar,
        })
    }

    pub fn base(&self) -> &SharedField<T> {
        &self.base
    }

    pub fn cd(&self) -> &CdMode<T> {
        &self.cd
    }

    pub fn soliton_params(&self) -> Option<&SolitonParams<T>> {
        self.soliton.as_ref()
    }

    /// States propagate in the gauge frame when the CD term is `V_cd`.
    pub fn gauge_frame(&self) -> bool {
        matches!(self.cd, CdMode::ScalarVcd { .. })
    }

    pub fn gauge(&self) -> Option<Gauge<T>> {
        self.gauge_frame()
            .then(|| Gauge::new(self.soliton.as_ref().expect("checked at construction")))
    }

    /// Everything multiplying ψ pointwise: `u` or `u + V_cd`.
    pub(crate) fn scalar_potential(&self) -> &dyn SpaceTimeField<T> {
        self.scalar.as_deref().unwrap_or(self.base.as_ref())
    }

    /// True when split-step (Strang) integration applies.
    pub(crate) fn is_split_step(&self) -> bool {
        matches!(
            self.cd,
            CdMode::None | CdMode::ScalarVcd { .. } | CdMode::LinearP(Velocity::Constant(_))
        )
    }
}
