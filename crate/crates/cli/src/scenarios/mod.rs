//! One module per physics area; each scenario turns validated parameters
//! into tables and checks.

mod extensions;
mod kdv;
mod spin;
mod toda;
mod verify;

use crate::config::{Params, ScenarioConfig, ScenarioKind};
use crate::report::{Checker, Outcome, Profile};

/// Check names a config may override under `params.tolerances`.
pub fn check_names(kind: ScenarioKind) -> Vec<String> {
    let fixed: &[&str] = match kind {
        ScenarioKind::KdvTransport => kdv::TRANSPORT_CHECKS,
        ScenarioKind::KdvCertify => kdv::CERTIFY_CHECKS,
        ScenarioKind::TodaN3 => toda::N3_CHECKS,
        ScenarioKind::TodaSoliton => toda::SOLITON_CHECKS,
        ScenarioKind::SpinSpectrum => spin::SPECTRUM_CHECKS,
        ScenarioKind::SpinTransfer => spin::TRANSFER_CHECKS,
        ScenarioKind::InverseEngineering => extensions::INVERSE_CHECKS,
        ScenarioKind::Nonisospectral => extensions::NONISO_CHECKS,
        ScenarioKind::VerifyAll => return verify::check_names(),
    };
    fixed.iter().map(|s| s.to_string()).collect()
}

pub fn run(config: &ScenarioConfig, profile: Profile) -> lax_shortcuts::Result<Outcome> {
    let name = config.scenario.name();
    let ck = Checker::new(name, config.params.tolerances(), profile);
    match &config.params {
        Params::KdvTransport(p) => kdv::transport(p, ck),
        Params::KdvCertify(p) => kdv::certify(p, ck),
        Params::TodaN3(p) => toda::n3(p, ck),
        Params::TodaSoliton(p) => toda::soliton(p, ck),
        Params::SpinSpectrum(p) => spin::spectrum(p, ck),
        Params::SpinTransfer(p) => spin::transfer(p, ck),
        Params::InverseEngineering(p) => extensions::inverse(p, ck),
        Params::Nonisospectral(p) => extensions::nonisospectral(p, ck),
        Params::VerifyAll(p) => verify::verify_all(p, profile),
    }
}
