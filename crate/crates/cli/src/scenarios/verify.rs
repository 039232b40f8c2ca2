//! All suites with default parameters, plus two checks that have no
//! scenario of their own: the level positions of the double soliton and the
//! spectral counterdiabatic oracle.

use std::sync::Arc;
use std::time::Instant;

use lax_shortcuts::field::Grid1D;
use lax_shortcuts::kdv::{KdvSoliton, SharedField, SolitonParams};
use lax_shortcuts::spin::{counterdiabatic_one_body, eigenbasis_offdiagonal_distance, spectral_cd_oracle};
use lax_shortcuts::tdse::instantaneous_levels;
use lax_shortcuts::toda::{integrate_toda, n3_closed_form, toda_rhs, TodaRate, TodaState};
use lax_shortcuts::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Tolerances, VerifyAllParams};
use crate::report::{Check, Checker, Outcome, Profile, Table};

pub const LEVEL_CHECKS: &[&str] = &["ground_level", "first_level", "level_drift"];
pub const ORACLE_CHECKS: &[&str] = &["embedded_n3", "random_trajectory"];

/// Suites in report order.
pub const SUITES: &[&str] = &[
    "bound_levels",
    "kdv_certify",
    "kdv_transport",
    "toda_n3",
    "toda_soliton",
    "spin_spectrum",
    "spin_transfer",
    "cd_oracle",
    "inverse_engineering",
    "nonisospectral",
];

pub fn suite_checks(suite: &str) -> &'static [&'static str] {
    match suite {
        "bound_levels" => LEVEL_CHECKS,
        "cd_oracle" => ORACLE_CHECKS,
        "kdv_transport" => super::kdv::TRANSPORT_CHECKS,
        "kdv_certify" => super::kdv::CERTIFY_CHECKS,
        "toda_n3" => super::toda::N3_CHECKS,
        "toda_soliton" => super::toda::SOLITON_CHECKS,
        "spin_spectrum" => super::spin::SPECTRUM_CHECKS,
        "spin_transfer" => super::spin::TRANSFER_CHECKS,
        "inverse_engineering" => super::extensions::INVERSE_CHECKS,
        _ => super::extensions::NONISO_CHECKS,
    }
}

fn bound_levels(mut ck: Checker) -> Result<Outcome> {
    let grid = Grid1D::new(-40.0, 40.0, 1024)?;
    let params = SolitonParams::double(1.2, 3.0, 1.0, 3.0)?;
    let base: SharedField<f64> = Arc::new(KdvSoliton::new(params));
    let mut levels = Table::new("levels", &["t", "E0", "E1"]);
    let (mut first, mut e0_dev, mut e1_dev, mut drift) = (None, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..=6 {
        let t = -3.0 + k as f64;
        let e = instantaneous_levels(&base, &grid, t, 2)?;
        let (e0, e1) = *first.get_or_insert((e[0], e[1]));
        drift = drift.max((e[0] - e0).abs()).max((e[1] - e1).abs());
        e0_dev = e0_dev.max((e[0] + 1.44).abs());
        e1_dev = e1_dev.max((e[1] + 1.0).abs());
        levels.push_nums(&[t, e[0], e[1]]);
    }
    ck.at_most("ground_level", e0_dev, 1e-3);
    ck.at_most("first_level", e1_dev, 1e-3);
    ck.at_most("level_drift", drift, 1e-3);
    Ok(Outcome { tables: vec![levels], checks: ck.checks, summary: json!({}) })
}

/// Three-site closed form plus two decoupled sites, so the chain has five.
fn n3_embedded(t: f64) -> Result<TodaState<f64>> {
    let core = n3_closed_form(1.0, 2.0, t)?;
    let mut j = core.couplings().to_vec();
    j.extend([0.0, 0.0]);
    let mut h = core.fields().to_vec();
    h.extend([3.1, -2.7]);
    TodaState::open(j, h)
}

fn cd_oracle(mut ck: Checker) -> Result<Outcome> {
    let eps = 1e-5;
    let mut worst = 0.0f64;
    for t in [-0.8, 0.0, 0.3, 1.5] {
        let s = n3_embedded(t)?;
        let rate = TodaRate::centered(&n3_embedded(t + eps)?, &n3_embedded(t - eps)?, eps)?;
        let oracle = spectral_cd_oracle(&s, &rate)?;
        worst = worst.max(eigenbasis_offdiagonal_distance(&counterdiabatic_one_body(&s), &oracle, &s)?);
    }
    ck.at_most("embedded_n3", worst, 1e-7);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let s0 = TodaState::open(
        (0..4).map(|_| rng.gen_range(0.3..1.3)).collect(),
        (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )?;
    let traj = integrate_toda(&s0, 0.0, 2.0, 1e-3, 400)?;
    let mut worst_traj = 0.0f64;
    for s in &traj.states {
        let oracle = spectral_cd_oracle(s, &toda_rhs(s))?;
        worst_traj = worst_traj.max(eigenbasis_offdiagonal_distance(&counterdiabatic_one_body(s), &oracle, s)?);
    }
    ck.at_most("random_trajectory", worst_traj, 1e-7);
    Ok(Outcome { tables: vec![], checks: ck.checks, summary: json!({}) })
}

fn run_suite(name: &str, tol: &Tolerances, profile: Profile, skip_operator_frame: bool) -> Result<Outcome> {
    use crate::config::*;
    let ck = Checker::new(name, tol, profile);
    match name {
        "bound_levels" => bound_levels(ck),
        "cd_oracle" => cd_oracle(ck),
        "kdv_transport" => {
            let p = KdvTransportParams { operator_frame: !skip_operator_frame, ..Default::default() };
            super::kdv::transport(&p, ck)
        }
        "kdv_certify" => super::kdv::certify(&KdvCertifyParams::default(), ck),
        "toda_n3" => super::toda::n3(&TodaN3Params::default(), ck),
        "toda_soliton" => super::toda::soliton(&TodaSolitonParams::default(), ck),
        "spin_spectrum" => super::spin::spectrum(&SpinSpectrumParams::default(), ck),
        "spin_transfer" => super::spin::transfer(&SpinTransferParams::default(), ck),
        "inverse_engineering" => super::extensions::inverse(&InverseEngineeringParams::default(), ck),
        _ => super::extensions::nonisospectral(&NonisospectralParams::default(), ck),
    }
}

/// Per-suite overrides from `suite.check` keys.
fn suite_tolerances(all: &Tolerances, suite: &str) -> Tolerances {
    all.iter()
        .filter_map(|(k, &v)| k.strip_prefix(suite).and_then(|r| r.strip_prefix('.')).map(|c| (c.to_string(), v)))
        .collect()
}

pub fn verify_all(p: &VerifyAllParams, profile: Profile) -> Result<Outcome> {
    let results: Vec<(&str, Result<Outcome>, f64)> = SUITES
        .par_iter()
        .map(|&name| {
            let start = Instant::now();
            let tol = suite_tolerances(&p.tolerances, name);
            let r = run_suite(name, &tol, profile, p.skip_operator_frame);
            (name, r, start.elapsed().as_secs_f64())
        })
        .collect();

    let mut checks: Vec<Check> = Vec::new();
    let mut suites = Table::new("suites", &["suite", "checks", "failed", "passed"]);
    let mut summary = serde_json::Map::new();
    for (name, result, seconds) in results {
        let (suite_checks, detail) = match result {
            Ok(o) => (o.checks, json!({ "seconds": seconds, "summary": o.summary })),
            Err(e) => {
                // A suite that cannot complete is a failed suite, not a crash.
                let none = Tolerances::new();
                let mut ck = Checker::new(name, &none, profile);
                ck.holds("completed", false);
                (ck.checks, json!({ "seconds": seconds, "error": e.to_string() }))
            }
        };
        let failed = suite_checks.iter().filter(|c| !c.passed).count();
        suites.push(vec![
            name.into(),
            suite_checks.len().into(),
            failed.into(),
            if failed == 0 { "true" } else { "false" }.into(),
        ]);
        summary.insert(name.into(), detail);
        checks.extend(suite_checks);
    }
    Ok(Outcome { tables: vec![suites], checks, summary: serde_json::Value::Object(summary) })
}

/// Override keys accepted by `verify_all`: `suite.check`.
pub fn check_names() -> Vec<String> {
    SUITES
        .iter()
        .flat_map(|s| suite_checks(s).iter().map(move |c| format!("{s}.{c}")))
        .collect()
}
