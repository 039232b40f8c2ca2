use std::sync::Arc;

use lax_shortcuts::extensions::{
    alpha_extension_check, generalized_kdv_residual, invariant_spectrum_drift, probe_packets,
    scaled_invariant_residual, scaled_spectrum, second_order_fit, toda_reduced_coeffs, xy_invariant_residual,
    AlphaFixture, DilationCd, GammaSchedule, ScaledField, TimeMap,
};
use lax_shortcuts::field::Grid1D;
use lax_shortcuts::kdv::{kdv_residual, AnalyticField, KdvSoliton, SharedField, SolitonParams};
use lax_shortcuts::spin::{adiabatic_one_body, counterdiabatic_one_body, inverse_engineering_pair, theta_gauge};
use lax_shortcuts::toda::n3_closed_form;
use lax_shortcuts::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{gamma_at, GammaParams, InverseEngineeringParams, NonisospectralParams};
use crate::report::{Checker, Outcome, Table};

pub const INVERSE_CHECKS: &[&str] = &[
    "xy_residual",
    "theta_gauge",
    "alpha_relations",
    "alpha_xy",
    "alpha_violations",
    "alpha_final_da",
    "alpha_final_dc",
    "alpha_final_commutator",
];

pub const NONISO_CHECKS: &[&str] = &[
    "spectrum_scaling",
    "invariant_drift",
    "dilation_residual",
    "dilation_control",
    "gkdv_residual",
    "gamma_one_mismatches",
    "second_order_decomposition",
    "second_order_null_dim",
];

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

pub fn inverse(p: &InverseEngineeringParams, mut ck: Checker) -> Result<Outcome> {
    let (v1, v2) = (p.v1, p.v2);
    let mut sched = |t: f64| Ok(toda_reduced_coeffs(&n3_closed_form(v1, v2, t)?));
    let u = theta_gauge::<f64>(3);
    let mut xy = Table::new("xy_residual", &["t", "eq1", "eq2", "eq3", "eq4", "eq5", "max", "theta_gauge"]);
    let (mut worst_xy, mut worst_gauge) = (0.0f64, 0.0f64);
    for t in linspace(p.t_start, p.t_end, p.samples) {
        let r = xy_invariant_residual(&mut sched, t, 4e-5)?;
        let s = n3_closed_form(v1, v2, t)?;
        let (h, f) = inverse_engineering_pair(&s);
        let h_ad = adiabatic_one_body(&s);
        let total = h_ad.add(&counterdiabatic_one_body(&s))?;
        let gauge = h.conjugate_by(&u)?.sub(&total)?.max_abs().max(f.conjugate_by(&u)?.sub(&h_ad)?.max_abs());
        worst_xy = worst_xy.max(r.max());
        worst_gauge = worst_gauge.max(gauge);
        let e = r.equations;
        xy.push_nums(&[t, e[0], e[1], e[2], e[3], e[4], r.max(), gauge]);
    }
    ck.at_most("xy_residual", worst_xy, 1e-7);
    ck.at_most("theta_gauge", worst_gauge, 1e-12);

    let fp = &p.alpha_fixture;
    let mut fx = AlphaFixture::new(fp.a0.clone(), fp.c0.clone(), fp.g0, fp.tau, fp.steps)?;
    let samples = linspace(0.0, fp.tau, fp.samples);
    let rep = alpha_extension_check(&mut fx, fp.tau, &samples, 2e-5, 1e-6)?;
    ck.at_most("alpha_relations", rep.relations.iter().copied().fold(0.0, f64::max), 1e-6);
    ck.at_most("alpha_xy", rep.xy, 1e-6);
    ck.holds("alpha_violations", rep.violations.is_empty());
    ck.at_most("alpha_final_da", rep.final_da, 1e-8);
    ck.at_most("alpha_final_dc", rep.final_dc, 1e-8);
    ck.at_most("alpha_final_commutator", rep.final_commutator, 1e-8);

    let n = fp.c0.len();
    let mut header = vec!["t".to_string(), "alpha".into(), "alpha_dot".into(), "commutator".into()];
    header.extend((1..n).map(|k| format!("a{k}")));
    header.extend((1..=n).map(|k| format!("c{k}")));
    header.extend((1..=n).map(|k| format!("h{k}")));
    let mut fixture = Table::with_header("alpha_fixture", header);
    for &t in &samples {
        let c = fx.coeffs(t)?;
        let (alpha, alpha_dot) = fx.alpha(t);
        let comm = c.hamiltonian()?.commutator(&c.invariant()?)?.frobenius_norm();
        let mut row = vec![t, alpha, alpha_dot, comm];
        row.extend(&c.a);
        row.extend(&c.c);
        row.extend(&c.h);
        fixture.push_nums(&row);
    }
    Ok(Outcome {
        tables: vec![xy, fixture],
        checks: ck.checks,
        summary: json!({
            "xy_residual": worst_xy,
            "theta_gauge": worst_gauge,
            "alpha_final_commutator": rep.final_commutator,
        }),
    })
}

fn schedule(g: &GammaParams) -> GammaSchedule<f64> {
    match g.profile.as_str() {
        "linear" => GammaSchedule::linear(g.g0, g.rate),
        "exponential" => GammaSchedule::exponential(g.g0, g.rate),
        _ => GammaSchedule::constant(g.g0),
    }
}

pub fn nonisospectral(p: &NonisospectralParams, mut ck: Checker) -> Result<Outcome> {
    let (t_lo, t_hi) = p.times.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    let g = schedule(&p.gamma);
    g.validate(t_lo, t_hi, 11)?;
    let grid = Grid1D::new(p.grid.x_min, p.grid.x_max, p.grid.n_points)?;
    let well: SharedField<f64> = Arc::new(AnalyticField::harmonic(p.omega));
    let u = ScaledField::new(well, g.clone(), TimeMap::Frozen(p.times[0]));

    let e0 = scaled_spectrum(&u, &grid, p.times[0], p.levels)?;
    let (invariant, drift) = invariant_spectrum_drift(&u, &g, &grid, &p.times, p.levels)?;
    let mut header = vec!["t".to_string(), "gamma".into()];
    header.extend((0..p.levels).map(|k| format!("E_{k}")));
    header.extend((0..p.levels).map(|k| format!("F_{k}")));
    let mut spectrum = Table::with_header("spectrum", header);
    let (mut scaling, mut residual, mut control) = (0.0f64, 0.0f64, f64::INFINITY);
    let probes = probe_packets(&grid, 6, 1.0);
    let cd = DilationCd { epsilon: p.epsilon, ..DilationCd::default() };
    let wrong = DilationCd { dilation_scale: 1.0, ..cd.clone() };
    for (i, &t) in p.times.iter().enumerate() {
        let e = scaled_spectrum(&u, &grid, t, p.levels)?;
        let ratio = (g.gamma(p.times[0]) / g.gamma(t)).powi(2);
        for (a, b) in e.iter().zip(&e0) {
            scaling = scaling.max((a - ratio * b).abs());
        }
        residual = residual.max(scaled_invariant_residual(&u, &g, &cd, &grid, t, &probes)?);
        if g.rate(t) != 0.0 {
            control = control.min(scaled_invariant_residual(&u, &g, &wrong, &grid, t, &probes)?);
        }
        let mut row = vec![t, g.gamma(t)];
        row.extend(&e);
        row.extend(&invariant[i]);
        spectrum.push_nums(&row);
    }
    ck.at_most("spectrum_scaling", scaling, 1e-4);
    ck.at_most("invariant_drift", drift, 1e-5);
    ck.at_most("dilation_residual", residual, 1e-7);
    if control.is_finite() {
        ck.at_least("dilation_control", control, 1e-3);
    }

    // γ-dressed KdV on the κ → κ/γ soliton.
    let params = SolitonParams::new(p.soliton_kappas.clone(), p.soliton_amps.clone())?;
    let base = KdvSoliton::new(params);
    let gs = schedule(&p.soliton_gamma);
    let dressed = ScaledField::new(Arc::new(base.clone()), gs.clone(), TimeMap::Kdv);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (mut gkdv, mut mismatches) = (0.0f64, 0usize);
    let one = GammaSchedule::constant(1.0);
    for _ in 0..p.samples {
        let (x, t) = (rng.gen_range(-10.0..10.0), rng.gen_range(t_lo..=t_hi));
        if gamma_at(&p.soliton_gamma, t) > 0.0 {
            let r = generalized_kdv_residual(&dressed, &gs, gs.kdv_coefficient(t), 0.0, x, t)?;
            gkdv = gkdv.max(r.abs());
        }
        let a = generalized_kdv_residual(&base, &one, -4.0, 0.0, x, t)?;
        let b = kdv_residual(&base, x, t)?;
        mismatches += usize::from(a.to_bits() != b.to_bits());
    }
    ck.at_most("gkdv_residual", gkdv, 1e-6);
    ck.at_most("gamma_one_mismatches", mismatches as f64, 0.0);

    // Second-order ansatz on a travelling periodic profile.
    let fit_grid = Grid1D::new(-10.0, 10.0, 128)?;
    let k = std::f64::consts::PI / 10.0;
    let (v, t) = (0.7, 0.4);
    let xs = fit_grid.points();
    let phase = |x: f64| k * (x - v * t);
    let uu: Vec<f64> = xs.iter().map(|&x| -1.5 * phase(x).cos() - 0.5 * (2.0 * phase(x)).cos()).collect();
    let ut: Vec<f64> = xs
        .iter()
        .map(|&x| -1.5 * k * v * phase(x).sin() - k * v * (2.0 * phase(x)).sin())
        .collect();
    let fit = second_order_fit(&fit_grid, &uu, &ut, 3, 0.25)?;
    ck.at_most("second_order_decomposition", fit.decomposition_residual.max(fit.invariant_residual), 1e-8);
    ck.holds("second_order_null_dim", fit.null_dim == 2);

    Ok(Outcome {
        tables: vec![spectrum],
        checks: ck.checks,
        summary: json!({
            "levels_at_start": e0,
            "invariant_drift": drift,
            "gkdv_residual": gkdv,
            "second_order_projection": fit.projection,
        }),
    })
}
