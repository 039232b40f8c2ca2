use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex;
use lax_shortcuts::field::{Grid1D, Wavefunction};
use lax_shortcuts::kdv::{adiabatic_ground_state, AnalyticField, SharedField, SolitonParams, VcdConvention};
use lax_shortcuts::tdse::*;
use lax_shortcuts::Error;

fn fig1() -> SolitonParams<f64> {
    SolitonParams::double(1.2, 3.0, 1.0, 3.0).unwrap()
}

fn gaussian(grid: &Grid1D<f64>, x0: f64, s0: f64, k0: f64) -> Wavefunction<f64> {
    Wavefunction::from_fn(grid, |x| {
        Complex::new(-(x - x0).powi(2) / (4.0 * s0 * s0), k0 * x).exp()
    })
    .normalized()
    .unwrap()
}

fn moments(psi: &Wavefunction<f64>) -> (f64, f64) {
    let g = psi.grid();
    let dx = g.spacing();
    let m1: f64 = psi.values().iter().enumerate().map(|(i, z)| g.x(i) * z.norm_sqr() * dx).sum();
    let m2: f64 = psi.values().iter().enumerate().map(|(i, z)| g.x(i).powi(2) * z.norm_sqr() * dx).sum();
    (m1, m2)
}

#[test]
fn free_packet_spreads_analytically() {
    let grid = Grid1D::new(-40.0, 40.0, 1024).unwrap();
    let (x0, s0, k0) = (-3.0, 1.0, 0.8);
    let psi0 = gaussian(&grid, x0, s0, k0);
    let zero: SharedField<f64> = Arc::new(AnalyticField::zero());
    let spec = DrivingSpec::new(zero, CdMode::None).unwrap();
    let t = 2.0;
    let r = propagate_with(&psi0, &spec, 0.0, t, 1e-2, 100, None).unwrap();
    let (m1, m2) = moments(&r.final_state);
    // H = p² (mass ½): ⟨x⟩ = x0 + 2k0 t, σ² = s0² + t²/s0².
    let mean = x0 + 2.0 * k0 * t;
    let var = s0 * s0 + t * t / (s0 * s0);
    assert!((m1 - mean).abs() < 1e-6, "{m1} vs {mean}");
    assert!((m2 - (var + mean * mean)).abs() < 1e-6);
    assert!(r.max_norm_drift < 1e-6);
    assert_eq!(r.scheme, Scheme::Strang);
}

#[test]
fn fidelity_basics() {
    let grid = Grid1D::new(-20.0, 20.0, 256).unwrap();
    let a = gaussian(&grid, 0.0, 1.0, 0.0);
    assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    let other = Grid1D::new(-20.0, 20.0, 128).unwrap();
    assert!(fidelity(&a, &gaussian(&other, 0.0, 1.0, 0.0)).is_err());
    // Ground vs first excited instantaneous states.
    let spec = DrivingSpec::soliton(fig1(), CdMode::None).unwrap();
    let grid = Grid1D::new(-40.0, 40.0, 1024).unwrap();
    let g = reference_adiabatic_state(&spec, &grid, 0.0, 0).unwrap();
    let e = reference_adiabatic_state(&spec, &grid, 0.0, 1).unwrap();
    assert!(fidelity(&g, &e).unwrap() < 1e-6);
}

#[test]
fn reference_states_match_closed_form_and_levels() {
    let grid = Grid1D::new(-40.0, 40.0, 1024).unwrap();
    let spec = DrivingSpec::soliton(fig1(), CdMode::None).unwrap();
    let mut tracker = AdiabaticReference::new(&spec, &grid, 0).unwrap();
    let (e0, g) = tracker.state(0.0).unwrap();
    let closed = adiabatic_ground_state(&fig1(), &grid, 0.0).unwrap();
    assert!(fidelity(&g, &closed).unwrap() > 1.0 - 1e-8);
    assert!((e0 + 1.44).abs() < 1e-3);
    let mut first = AdiabaticReference::new(&spec, &grid, 1).unwrap();
    assert!((first.state(0.0).unwrap().0 + 1.0).abs() < 1e-3);
    assert!(matches!(
        AdiabaticReference::new(&spec, &grid, 2).unwrap().state(0.0),
        Err(Error::InvalidArgument(_))
    ));
    // Continuity: consecutive states overlap with positive real part.
    let (_, g2) = tracker.state(0.01).unwrap();
    assert!(g.inner(&g2).unwrap().re > 0.99);
}

#[test]
fn static_potential_reference_is_time_independent() {
    let grid = Grid1D::new(-20.0, 20.0, 256).unwrap();
    let well: SharedField<f64> = Arc::new(AnalyticField::gaussian(-2.0, 0.0, 1.5));
    let spec = DrivingSpec::new(well, CdMode::None).unwrap();
    let mut r = AdiabaticReference::new(&spec, &grid, 0).unwrap();
    let (_, a) = r.state(0.0).unwrap();
    let (_, b) = r.state(5.0).unwrap();
    assert!(fidelity(&a, &b).unwrap() > 1.0 - 1e-12);
}

#[test]
fn single_soliton_linear_cd_transports_ground_state() {
    let grid = Grid1D::new(-30.0, 30.0, 512).unwrap();
    let p = SolitonParams::single(1.0).unwrap();
    let spec = DrivingSpec::soliton(p.clone(), CdMode::LinearP(Velocity::Constant(4.0))).unwrap();
    let psi0 = adiabatic_ground_state(&p, &grid, 0.0).unwrap();
    let r = propagate(&psi0, &spec, 0.0, 2.0, 1e-3).unwrap();
    let worst = r.fidelity_series.iter().cloned().fold(1.0, f64::min);
    assert!(worst >= 0.9999, "{worst}");
    // The operator frame gives the same constant 4κ² p.
    let op = DrivingSpec::soliton_operator_frame(p).unwrap();
    assert!(matches!(op.cd(), CdMode::LinearP(Velocity::Constant(v)) if (*v - 4.0f64).abs() < 1e-15));
}

#[test]
fn fig1_transport_gauge_and_operator_frames() {
    let start = Instant::now();
    let grid = Grid1D::new(-40.0, 40.0, 1024).unwrap();
    let p = fig1();
    let (t0, t1) = (-2.0, 2.0);
    let psi0 = adiabatic_ground_state(&p, &grid, t0).unwrap();
    let vcd = CdMode::ScalarVcd {
        convention: VcdConvention::Vanishing,
        drop_constants: false,
    };
    let with = propagate(&psi0, &DrivingSpec::soliton(p.clone(), vcd).unwrap(), t0, t1, 1e-3).unwrap();
    let without = propagate(&psi0, &DrivingSpec::soliton(p.clone(), CdMode::None).unwrap(), t0, t1, 1e-3).unwrap();
    let worst = with.fidelity_series.iter().cloned().fold(1.0, f64::min);
    assert!(worst >= 0.999, "with CD: {worst}");
    let (fw, fo) = (*with.fidelity_series.last().unwrap(), *without.fidelity_series.last().unwrap());
    assert!(fw - fo > 0.05, "{fw} vs {fo}");
    assert!(with.max_norm_drift < 1e-6);

    let op = propagate(&psi0, &DrivingSpec::soliton_operator_frame(p).unwrap(), t0, t1, 5e-4).unwrap();
    assert_eq!(op.scheme, Scheme::Rk4);
    let diff = with
        .final_state
        .density()
        .iter()
        .zip(op.final_state.density())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff < 1e-4, "{diff}");
    assert!(op.max_norm_drift < 1e-6, "{}", op.max_norm_drift);
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn offset_convention_is_worse() {
    let grid = Grid1D::new(-40.0, 40.0, 1024).unwrap();
    let p = fig1();
    let psi0 = adiabatic_ground_state(&p, &grid, -2.0).unwrap();
    let off = CdMode::ScalarVcd {
        convention: VcdConvention::Offset,
        drop_constants: false,
    };
    let r = propagate(&psi0, &DrivingSpec::soliton(p, off).unwrap(), -2.0, 2.0, 2e-3).unwrap();
    assert!(*r.fidelity_series.last().unwrap() < 0.9);
}

#[test]
fn strang_and_rk4_convergence_orders() {
    let grid = Grid1D::new(-20.0, 20.0, 256).unwrap();
    let p = SolitonParams::single(1.0).unwrap();
    let psi0 = adiabatic_ground_state(&p, &grid, 0.0).unwrap();
    let err = |spec: &DrivingSpec<f64>, dt: f64, reference: &Wavefunction<f64>| -> f64 {
        let r = propagate_with(&psi0, spec, 0.0, 0.5, dt, 1_000_000, None).unwrap();
        r.final_state
            .values()
            .iter()
            .zip(reference.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    // Strang, no CD: the state is not stationary, so errors are visible.
    let spec = DrivingSpec::soliton(p.clone(), CdMode::None).unwrap();
    let dt = 0.01;
    let reference = propagate_with(&psi0, &spec, 0.0, 0.5, dt / 4.0, 1_000_000, None).unwrap().final_state;
    let ratio = err(&spec, dt, &reference) / err(&spec, dt / 2.0, &reference);
    assert!(ratio >= 3.5, "Strang ratio {ratio}");
    // RK4 with the third-order operator on a coarser grid (p³ is stiff).
    let grid = Grid1D::new(-20.0, 20.0, 128).unwrap();
    let psi0 = adiabatic_ground_state(&p, &grid, 0.0).unwrap();
    let err = |spec: &DrivingSpec<f64>, dt: f64, reference: &Wavefunction<f64>| -> f64 {
        let r = propagate_with(&psi0, spec, 0.0, 0.2, dt, 1_000_000, None).unwrap();
        r.final_state
            .values()
            .iter()
            .zip(reference.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let spec = DrivingSpec::soliton(p, CdMode::OperatorCd3 { a: -4.0, c1: 0.0 }).unwrap();
    // dt·ρ ≈ 0.4 keeps every mode in the asymptotic regime.
    let dt = 1e-4;
    let reference = propagate_with(&psi0, &spec, 0.0, 0.2, dt / 4.0, 1_000_000, None).unwrap().final_state;
    let ratio = err(&spec, dt, &reference) / err(&spec, dt / 2.0, &reference);
    assert!(ratio >= 12.0, "RK4 ratio {ratio}");
}

#[test]
fn unstable_step_and_bad_modes_are_rejected() {
    let grid = Grid1D::new(-20.0, 20.0, 256).unwrap();
    let p = SolitonParams::single(1.0).unwrap();
    let psi0 = adiabatic_ground_state(&p, &grid, 0.0).unwrap();
    let spec = DrivingSpec::soliton(p.clone(), CdMode::OperatorCd3 { a: -4.0, c1: 0.0 }).unwrap();
    assert!(matches!(propagate(&psi0, &spec, 0.0, 1.0, 0.01), Err(Error::StepSize(_))));
    let vcd = CdMode::ScalarVcd {
        convention: VcdConvention::Vanishing,
        drop_constants: true,
    };
    assert!(matches!(DrivingSpec::soliton(p, vcd.clone()), Err(Error::InvalidArgument(_))));
    let zero: SharedField<f64> = Arc::new(AnalyticField::zero());
    assert!(DrivingSpec::new(zero, vcd).is_err());
}
