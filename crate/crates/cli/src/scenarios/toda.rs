use lax_shortcuts::toda::{
    integrate_toda, lax_residual, lax_spectrum, moser_endpoint, n3_closed_form, superposed_solitons,
    toda_single_soliton, TodaRate, TodaState,
};
use lax_shortcuts::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{TodaN3Params, TodaSolitonParams};
use crate::report::{Checker, Outcome, Table};

pub const N3_CHECKS: &[&str] = &[
    "rk4_vs_closed_form",
    "initial_state_exact",
    "asymptotic_fields",
    "lax_residual",
    "eigenvalue_drift",
    "moser_endpoint",
];

pub const SOLITON_CHECKS: &[&str] = &["closed_form_match", "edge_defect", "trace_drift", "trace_sq_drift", "positive_couplings"];

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn state_diff(a: &TodaState<f64>, b: &TodaState<f64>) -> f64 {
    max_diff(a.couplings(), b.couplings()).max(max_diff(a.fields(), b.fields()))
}

pub fn n3(p: &TodaN3Params, mut ck: Checker) -> Result<Outcome> {
    let (v1, v2) = (p.v1, p.v2);
    let v = v1.hypot(v2);
    let t_end = p.t_end.unwrap_or(20.0 / v);
    let s0 = n3_closed_form(v1, v2, 0.0)?;
    let traj = integrate_toda(&s0, 0.0, t_end, p.dt, p.record_every)?;

    let one = integrate_toda(&s0, 0.0, 1.0, p.dt, usize::MAX)?;
    ck.at_most("rk4_vs_closed_form", state_diff(one.last(), &n3_closed_form(v1, v2, 1.0)?), 1e-8);
    ck.holds("initial_state_exact", s0.couplings() == [v1, v2] && s0.fields() == [0.0, 0.0, 0.0]);
    let far = n3_closed_form(v1, v2, 20.0 / v)?;
    ck.at_most("asymptotic_fields", max_diff(far.fields(), &[v, 0.0, -v]), 1e-6);

    let eps = 1e-5;
    let ev0 = lax_spectrum(&s0)?;
    let mut trace = Table::new("trace", &["t", "J1", "J2", "h1", "h2", "h3", "E1", "E2", "E3", "lax_residual"]);
    let (mut worst_lax, mut drift) = (0.0f64, 0.0f64);
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        let exact = n3_closed_form(v1, v2, t)?;
        let rate = TodaRate::centered(&n3_closed_form(v1, v2, t + eps)?, &n3_closed_form(v1, v2, t - eps)?, eps)?;
        let lax = lax_residual(&exact, &rate)?;
        worst_lax = worst_lax.max(lax);
        let ev = lax_spectrum(s)?;
        drift = drift.max(max_diff(&ev, &ev0));
        let (j, h) = (s.couplings(), s.fields());
        trace.push_nums(&[t, j[0], j[1], h[0], h[1], h[2], ev[0], ev[1], ev[2], lax]);
    }
    ck.at_most("lax_residual", worst_lax, 1e-7);
    ck.at_most("eigenvalue_drift", drift, 1e-8);

    let mut rng = ChaCha8Rng::seed_from_u64(p.moser_seed);
    let mut moser = Table::new("moser", &["instance", "sites", "final_time", "error"]);
    let mut worst_moser = 0.0f64;
    for k in 0..p.moser_instances {
        let n = rng.gen_range(2..=8);
        let s = TodaState::open((0..n - 1).map(|_| rng.gen_range(0.2..1.5)).collect(), vec![0.0; n])?;
        let end = moser_endpoint(&s, 50.0, 5e-3)?;
        worst_moser = worst_moser.max(end.error);
        moser.push(vec![k.into(), n.into(), end.final_time.into(), end.error.into()]);
    }
    if p.moser_instances > 0 {
        ck.at_most("moser_endpoint", worst_moser, 1e-4);
    }
    Ok(Outcome {
        tables: vec![trace, moser],
        checks: ck.checks,
        summary: json!({ "v": v, "t_end": t_end, "eigenvalues": ev0, "trace_drift": traj.trace_drift }),
    })
}

pub fn soliton(p: &TodaSolitonParams, mut ck: Checker) -> Result<Outcome> {
    let pairs: Vec<(f64, f64)> = p.solitons.iter().map(|s| (s.kappa, s.log_c0.exp())).collect();
    let exact = |t: f64| match pairs.as_slice() {
        [(k, c0)] => toda_single_soliton(p.sites, t, *k, *c0),
        many => superposed_solitons(p.sites, t, many),
    };
    let s0 = exact(0.0)?;
    let traj = integrate_toda(&s0, 0.0, p.t_end, p.dt, p.record_every)?;
    let end = traj.last();
    if pairs.len() == 1 {
        ck.at_most("closed_form_match", state_diff(end, &exact(p.t_end)?), 1e-8);
    }
    ck.at_most("edge_defect", s0.edge_defect().max(end.edge_defect()), 1e-6);
    ck.at_most("trace_drift", traj.trace_drift, 1e-10);
    ck.at_most("trace_sq_drift", traj.trace_sq_drift, 1e-8);
    ck.holds("positive_couplings", traj.states.iter().all(|s| s.couplings().iter().all(|&j| j > 0.0)));

    let mut peaks = Table::new("peak", &["t", "peak_site", "peak_field"]);
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        let h = s.fields();
        let k = (0..h.len()).max_by(|&a, &b| h[a].abs().total_cmp(&h[b].abs())).unwrap_or(0);
        peaks.push(vec![t.into(), (k + 1).into(), h[k].into()]);
    }
    let mut profile = Table::new("profile", &["site", "J_start", "h_start", "J_end", "h_end"]);
    for n in 0..p.sites {
        let j = |s: &TodaState<f64>| s.couplings().get(n).copied().unwrap_or(0.0);
        profile.push(vec![(n + 1).into(), j(&s0).into(), s0.fields()[n].into(), j(end).into(), end.fields()[n].into()]);
    }
    let speeds: Vec<f64> = p.solitons.iter().map(|s| s.kappa.sinh() / s.kappa).collect();
    Ok(Outcome {
        tables: vec![peaks, profile],
        checks: ck.checks,
        summary: json!({ "sites_per_time": speeds, "trace_drift": traj.trace_drift }),
    })
}
