use std::sync::Arc;

use lax_shortcuts::field::{derivative, Grid1D, Wavefunction};
use lax_shortcuts::kdv::{
    adiabatic_ground_state, cd_potential_vcd, hierarchy_speed, kdv_invariant_residual, kdv_residual,
    partner_closed_form, partner_potential, single_soliton, superpotential, traveling_soliton, AnalyticField,
    CdOrder, KdvSoliton, SharedField, SolitonParams, SpaceTimeField, SumField, TimeDerivative, VcdConvention,
};
use lax_shortcuts::tdse::{propagate_with, CdMode, DrivingSpec, PropagationResult};
use lax_shortcuts::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{GridParams, KdvCertifyParams, KdvTransportParams};
use crate::report::{Checker, Outcome, Table};

pub const TRANSPORT_CHECKS: &[&str] = &["min_fidelity_with_cd", "fidelity_gap", "norm_drift", "frame_density_diff"];

pub const CERTIFY_CHECKS: &[&str] = &[
    "residual_single",
    "residual_configured",
    "perturbed_control",
    "cd3_residual",
    "cd3_control",
    "hierarchy_speed",
    "cd5_residual",
    "susy_identities",
    "zero_mode",
];

fn grid(g: &GridParams) -> Result<Grid1D<f64>> {
    Grid1D::new(g.x_min, g.x_max, g.n_points)
}

fn convention(name: &str) -> VcdConvention {
    match name {
        "offset" => VcdConvention::Offset,
        _ => VcdConvention::Vanishing,
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Propagates through consecutive snapshot windows, returning the state at
/// every snapshot and the concatenated series.
fn chained(
    psi0: &Wavefunction<f64>,
    spec: &DrivingSpec<f64>,
    params: &SolitonParams<f64>,
    marks: &[f64],
    dt: f64,
) -> Result<(Vec<Wavefunction<f64>>, PropagationResult<f64>)> {
    let grid = psi0.grid().clone();
    let total = ((marks[marks.len() - 1] - marks[0]) / dt).round().max(1.0) as usize;
    let every = (total / 200).max(1);
    let mut states = vec![psi0.clone()];
    let mut series: Option<PropagationResult<f64>> = None;
    for w in marks.windows(2) {
        let mut reference = |t: f64| adiabatic_ground_state(params, &grid, t);
        let seg = propagate_with(states.last().expect("seeded"), spec, w[0], w[1], dt, every, Some(&mut reference))?;
        states.push(seg.final_state.clone());
        series = Some(match series.take() {
            None => seg,
            Some(mut acc) => {
                acc.times.extend_from_slice(&seg.times[1..]);
                acc.fidelity_series.extend_from_slice(&seg.fidelity_series[1..]);
                acc.norm_series.extend_from_slice(&seg.norm_series[1..]);
                acc.max_norm_drift = acc.max_norm_drift.max(seg.max_norm_drift);
                acc.steps += seg.steps;
                acc.final_state = seg.final_state;
                acc
            }
        });
    }
    Ok((states, series.expect("at least one window")))
}

pub fn transport(p: &KdvTransportParams, mut ck: Checker) -> Result<Outcome> {
    let params = SolitonParams::new(p.kappas.clone(), p.amps.clone())?;
    let grid = grid(&p.grid)?;
    let psi0 = adiabatic_ground_state(&params, &grid, p.t_start)?;
    let marks = linspace(p.t_start, p.t_end, p.snapshots);
    let conv = convention(&p.convention);
    let vcd_mode = CdMode::ScalarVcd { convention: conv, drop_constants: p.drop_constants };
    let with_spec = DrivingSpec::soliton(params.clone(), vcd_mode)?;
    let without_spec = DrivingSpec::soliton(params.clone(), CdMode::None)?;
    let (with_states, with) = chained(&psi0, &with_spec, &params, &marks, p.dt)?;
    let (without_states, without) = chained(&psi0, &without_spec, &params, &marks, p.dt)?;

    let mut tables = Vec::new();
    let mut fid = Table::new("fidelity", &["t", "fidelity_with_cd", "fidelity_without_cd", "norm"]);
    for i in 0..with.times.len() {
        fid.push_nums(&[with.times[i], with.fidelity_series[i], without.fidelity_series[i], with.norm_series[i]]);
    }
    tables.push(fid);

    let u = KdvSoliton::new(params.clone());
    let vcd = cd_potential_vcd(&params, conv, p.drop_constants);
    let xs = grid.points();
    for (k, &t) in marks.iter().enumerate() {
        let (uu, vv) = (u.sample(&grid, t), vcd.sample(&grid, t));
        let (d_with, d_without) = (with_states[k].density(), without_states[k].density());
        let mut snap = Table::new(format!("snapshot_{k}"), &["x", "u", "u_plus_vcd", "density", "density_no_cd"]);
        for i in 0..xs.len() {
            snap.push_nums(&[xs[i], uu[i], uu[i] + vv[i], d_with[i], d_without[i]]);
        }
        tables.push(snap);
    }

    let min_fid = with.fidelity_series.iter().copied().fold(f64::INFINITY, f64::min);
    let gap = with.fidelity_series.last().copied().unwrap_or(0.0) - without.fidelity_series.last().copied().unwrap_or(0.0);
    ck.at_least("min_fidelity_with_cd", min_fid, 0.999);
    ck.at_least("fidelity_gap", gap, 0.05);
    ck.at_most("norm_drift", with.max_norm_drift.max(without.max_norm_drift), 1e-6);

    let mut frame_diff = None;
    if p.operator_frame {
        let op = DrivingSpec::soliton_operator_frame(params)?;
        let r = propagate_with(&psi0, &op, p.t_start, p.t_end, p.operator_dt, usize::MAX, None)?;
        let diff = with
            .final_state
            .density()
            .iter()
            .zip(r.final_state.density())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        ck.at_most("frame_density_diff", diff, 1e-4);
        frame_diff = Some(diff);
    }

    Ok(Outcome {
        tables,
        checks: ck.checks,
        summary: json!({
            "min_fidelity_with_cd": min_fid,
            "final_fidelity_with_cd": with.fidelity_series.last(),
            "final_fidelity_without_cd": without.fidelity_series.last(),
            "frame_density_diff": frame_diff,
            "snapshot_times": marks,
        }),
    })
}

fn max_abs_over(points: &[(f64, f64)], f: impl Fn(f64, f64) -> Result<f64>) -> Result<f64> {
    points.iter().try_fold(0.0f64, |m, &(x, t)| Ok(m.max(f(x, t)?.abs())))
}

pub fn certify(p: &KdvCertifyParams, mut ck: Checker) -> Result<Outcome> {
    let params = SolitonParams::new(p.kappas.clone(), p.amps.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let points: Vec<(f64, f64)> = (0..p.samples)
        .map(|_| (rng.gen_range(p.x_range[0]..p.x_range[1]), rng.gen_range(p.t_range[0]..p.t_range[1])))
        .collect();

    let k_low = p.kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let single = single_soliton(k_low)?;
    let configured = KdvSoliton::new(params.clone());
    ck.at_most("residual_single", max_abs_over(&points, |x, t| kdv_residual(&single, x, t))?, 1e-8);
    ck.at_most("residual_configured", max_abs_over(&points, |x, t| kdv_residual(&configured, x, t))?, 1e-8);
    let perturbed = SumField::new(vec![
        Arc::new(configured.clone()) as SharedField<f64>,
        Arc::new(AnalyticField::gaussian(0.01, 0.0, 1.0)),
    ]);
    ck.at_least("perturbed_control", max_abs_over(&points, |x, t| kdv_residual(&perturbed, x, t))?, 1e-4);

    let grid = grid(&p.grid)?;
    let third = |a| CdOrder::Third { a, c1: 0.0 };
    let good = kdv_invariant_residual(&single, &grid, p.t_certify, third(-4.0), 0.25, TimeDerivative::Centered(1e-5))?;
    let bad = kdv_invariant_residual(&single, &grid, p.t_certify, third(-2.0), 0.25, TimeDerivative::Analytic)?;
    ck.at_most("cd3_residual", good, 1e-6);
    ck.at_least("cd3_control", bad, 1e-2);

    let mut speed_err = 0.0f64;
    for &k in &p.fifth_kappas {
        let exact = 16.0 * k.powi(4);
        speed_err = speed_err.max((hierarchy_speed(k)? - exact).abs() / exact.max(1.0));
    }
    ck.at_most("hierarchy_speed", speed_err, 1e-6);
    let u5 = traveling_soliton(k_low, hierarchy_speed(k_low)?)?;
    let r5 = kdv_invariant_residual(&u5, &grid, p.t_certify, CdOrder::Fifth, 0.25, TimeDerivative::Analytic)?;
    ck.at_most("cd5_residual", r5, 1e-5);

    // SUSY factorisation, pointwise.
    let w = superpotential(&params);
    let e0 = w.ground_energy();
    let partner = partner_potential(Arc::new(w.clone()), e0);
    let closed = partner_closed_form(&params);
    let flat = partner_closed_form(&SolitonParams::single(k_low)?);
    let susy = max_abs_over(&points, |x, t| {
        let (wv, wx) = (w.value(x, t), w.dx(x, t, 1)?);
        let a = configured.value(x, t) - (wv * wv - wx + e0);
        let b = partner.value(x, t) - (wv * wv + wx + e0);
        let c = partner.value(x, t) - closed.value(x, t);
        Ok(a.abs().max(b.abs()).max(c.abs()).max(flat.value(x, t).abs()))
    })?;
    ck.at_most("susy_identities", susy, 1e-10);

    let export = Grid1D::new(p.export_grid.x_min, p.export_grid.x_max, p.export_grid.n_points)?;
    let zero_mode = {
        let big = Grid1D::new(-40.0, 40.0, 1024)?;
        let psi = adiabatic_ground_state(&params, &big, p.export_t)?;
        let ws = w.sample(&big, p.export_t);
        let d = derivative(&psi, 1)?;
        d.values().iter().zip(psi.values()).zip(&ws).map(|((d, z), &wi)| (d + z * wi).norm()).fold(0.0, f64::max)
    };
    ck.at_most("zero_mode", zero_mode, 1e-8);

    let vcd = cd_potential_vcd(&params, VcdConvention::Vanishing, false);
    let mut fields = Table::new("fields", &["x", "t", "u", "W", "u_partner", "V_cd"]);
    let t = p.export_t;
    for x in export.points() {
        fields.push_nums(&[x, t, configured.value(x, t), w.value(x, t), partner.value(x, t), vcd.value(x, t)]);
    }
    Ok(Outcome {
        tables: vec![fields],
        checks: ck.checks,
        summary: json!({ "ground_energy": e0, "bound_energies": params.bound_energies(), "samples": p.samples }),
    })
}
