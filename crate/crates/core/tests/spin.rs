use std::f64::consts::SQRT_2;

use lax_shortcuts::linalg::OperatorMatrix;
use lax_shortcuts::spin::*;
use lax_shortcuts::toda::*;
use lax_shortcuts::Error;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn random_open(n: usize, seed: u64) -> TodaState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TodaState::open(
        (0..n - 1).map(|_| rng.gen_range(0.3..1.3)).collect(),
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
    .unwrap()
}

/// Full 2^N spin Hamiltonian built from Pauli actions on basis states
/// (bit n set = spin n up).
fn fock_hamiltonian(j: &[f64], h: &[f64], with_cd: bool) -> Vec<Vec<C>> {
    let n = h.len();
    let dim = 1usize << n;
    let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
    // σ^a|b⟩ = phase |b'⟩ with a ∈ {x, y, z}
    let pauli = |a: char, bit: bool| -> (C, bool) {
        match (a, bit) {
            ('x', b) => (C::new(1.0, 0.0), !b),
            ('y', true) => (C::new(0.0, 1.0), false),
            ('y', false) => (C::new(0.0, -1.0), true),
            ('z', true) => (C::new(1.0, 0.0), true),
            ('z', false) => (C::new(-1.0, 0.0), false),
            _ => unreachable!(),
        }
    };
    let mut two_site = |coef: f64, a: char, b: char, p: usize, q: usize| {
        for col in 0..dim {
            let (ph1, bq) = pauli(b, col >> q & 1 == 1);
            let s1 = if bq { col | 1 << q } else { col & !(1 << q) };
            let (ph2, bp) = pauli(a, s1 >> p & 1 == 1);
            let row = if bp { s1 | 1 << p } else { s1 & !(1 << p) };
            m[row][col] += ph1 * ph2 * coef;
        }
    };
    for (k, &jk) in j.iter().enumerate() {
        two_site(jk / 2.0, 'x', 'x', k, k + 1);
        two_site(jk / 2.0, 'y', 'y', k, k + 1);
        if with_cd {
            two_site(jk / 2.0, 'x', 'y', k, k + 1);
            two_site(-jk / 2.0, 'y', 'x', k, k + 1);
        }
    }
    for col in 0..dim {
        for (k, &hk) in h.iter().enumerate() {
            m[col][col] += if col >> k & 1 == 1 { hk / 2.0 } else { -hk / 2.0 };
        }
    }
    m
}

fn fock_sector(full: &[Vec<C>], states: &[usize], shift: f64) -> OperatorMatrix<f64> {
    OperatorMatrix::from_fn(states.len(), |r, c| {
        full[states[r]][states[c]] + if r == c { C::new(shift, 0.0) } else { C::new(0.0, 0.0) }
    })
}

fn dense_close(a: &OperatorMatrix<f64>, b: &OperatorMatrix<f64>) -> f64 {
    a.sub(b).unwrap().max_abs()
}

#[test]
fn sectors_match_fock_space() {
    for &n in &[4usize, 6, 8] {
        let s = random_open(n, n as u64);
        let shift: f64 = s.fields().iter().sum::<f64>() / 2.0;
        let ad = fock_hamiltonian(s.couplings(), s.fields(), false);
        let tot = fock_hamiltonian(s.couplings(), s.fields(), true);
        let single: Vec<usize> = (0..n).map(|k| 1 << k).collect();
        let double: Vec<usize> = (0..n).flat_map(|a| (a + 1..n).map(move |b| 1 << a | 1 << b)).collect();
        for (sector, states) in [(Sector::SingleFlip, &single), (Sector::DoubleFlip, &double)] {
            let set = build_sector(&s, sector).unwrap();
            assert_eq!(set.basis_labels.len(), sector.dim(n));
            let h_ad = set.h_ad.to_dense();
            let total = h_ad.add(&set.h_cd.to_dense()).unwrap();
            assert!(dense_close(&h_ad, &fock_sector(&ad, states, shift)) < 1e-14);
            assert!(dense_close(&total, &fock_sector(&tot, states, shift)) < 1e-14);
        }
    }
}

#[test]
fn n3_single_flip_example() {
    let s = n3_closed_form(1.0f64, 1.0, 0.0).unwrap();
    let set = build_sector(&s, Sector::SingleFlip).unwrap();
    let expect = OperatorMatrix::from_real(3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
    assert_eq!(dense_close(&set.h_ad.to_dense(), &expect), 0.0);
    let ev = set.h_ad.to_dense().assert_hermitian().unwrap().eigh().unwrap().values;
    for (a, b) in ev.iter().zip([-SQRT_2, 0.0, SQRT_2]) {
        assert!((a - b).abs() < 1e-12);
    }
    let k = set.h_cd.to_dense();
    assert_eq!(k[(0, 1)], C::new(0.0, 1.0));
    assert_eq!(k[(1, 0)], C::new(0.0, -1.0));
}

#[test]
fn free_fermion_lift_spectrum() {
    for &n in &[6usize, 10] {
        let s = random_open(n, 40 + n as u64);
        let single = sector_spectrum(&s, Sector::SingleFlip).unwrap();
        let dense = build_sector(&s, Sector::DoubleFlip).unwrap().h_ad.to_dense().assert_hermitian().unwrap().eigh().unwrap().values;
        let pairs = sector_spectrum(&s, Sector::DoubleFlip).unwrap();
        assert_eq!(pairs.len(), n * (n - 1) / 2);
        let err = dense.iter().zip(&pairs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "N = {n}: {err}");
        // eigenvectors of the lift are Slater states
        let eig = single_flip_eigen(&s).unwrap();
        let lift = build_sector(&s, Sector::DoubleFlip).unwrap().h_ad;
        let v: Vec<C> = pair_eigenvector(&eig, 1, 4).into_iter().map(|x| C::new(x, 0.0)).collect();
        let hv = lift.apply(&v).unwrap();
        let e = single[1] + single[4];
        assert!(hv.iter().zip(&v).all(|(a, b)| (a - b * e).norm() < 1e-10));
    }
}

#[test]
fn uniform_chain_band() {
    let s = TodaState::uniform(200, 0.5f64, 0.0, Boundary::Open).unwrap();
    let ev = sector_spectrum(&s, Sector::SingleFlip).unwrap();
    assert!(ev[0] >= -1.0 && ev[199] <= 1.0);
    assert!(ev[199] - ev[0] > 1.99);
    let bands = band_structure(&ev, 0.1);
    assert_eq!(bands.len(), 1);
}

#[test]
fn soliton_double_flip_bands() {
    let kappa: f64 = 2.0;
    let c0 = (kappa * 45.0).exp();
    let times: Vec<f64> = (0..6).map(|k| k as f64).collect();
    let states: Vec<_> = times.iter().map(|&t| toda_single_soliton(100, t, kappa, c0).unwrap()).collect();
    let flow = spectrum_flow(&times, &states, Sector::DoubleFlip, 0.1).unwrap();
    for bands in &flow.bands {
        assert_eq!(bands.len(), 2, "{bands:?}");
        let mut widths: Vec<f64> = bands.iter().map(|b| b.width()).collect();
        widths.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((widths[0] - 4.0).abs() < 0.1, "{widths:?}");
        assert!((widths[1] - 2.0).abs() < 0.1, "{widths:?}");
    }
    assert!(flow.max_drift < 1e-6, "{}", flow.max_drift);
    assert_eq!(flow.eigenvalues[0].len(), 4950);

    let single = spectrum_flow(&times, &states, Sector::SingleFlip, 0.1).unwrap();
    assert!(single.max_drift < 1e-6);
}

#[test]
fn n3_spectrum_flow() {
    let v = f64::hypot(1.0, 2.0);
    let times: Vec<f64> = (0..8).map(|k| -2.0 + 0.7 * k as f64).collect();
    let states: Vec<_> = times.iter().map(|&t| n3_closed_form(1.0, 2.0, t).unwrap()).collect();
    let flow = spectrum_flow(&times, &states, Sector::SingleFlip, 0.1).unwrap();
    for ev in &flow.eigenvalues {
        for (a, b) in ev.iter().zip([-v, 0.0, v]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    assert!(spectrum_flow(&times[..1], &states[..1], Sector::SingleFlip, 0.1).is_err());
}

#[test]
fn eq3_residual_along_toda_flow() {
    let s0 = random_open(6, 11);
    let traj = integrate_toda(&s0, 0.0, 3.0, 1e-3, 500).unwrap();
    for s in &traj.states {
        let rate = toda_rhs(s);
        for sector in [Sector::SingleFlip, Sector::DoubleFlip] {
            assert!(invariant_residual_sector(s, &rate, sector).unwrap() < 1e-12);
        }
    }
    // closed form, rate by centred differences
    let eps = 1e-5;
    let rate = TodaRate::centered(
        &n3_closed_form(1.0, 2.0, 0.4 + eps).unwrap(),
        &n3_closed_form(1.0, 2.0, 0.4 - eps).unwrap(),
        eps,
    )
    .unwrap();
    let s = n3_closed_form(1.0, 2.0, 0.4).unwrap();
    assert!(invariant_residual_sector(&s, &rate, Sector::SingleFlip).unwrap() < 1e-6);
    assert!(invariant_residual_sector(&s, &rate, Sector::DoubleFlip).unwrap() < 1e-6);
}

fn n3_embedded(t: f64) -> TodaState<f64> {
    let core = n3_closed_form(1.0, 2.0, t).unwrap();
    let mut j = core.couplings().to_vec();
    j.extend([0.0, 0.0]);
    let mut h = core.fields().to_vec();
    h.extend([3.1, -2.7]);
    TodaState::open(j, h).unwrap()
}

#[test]
fn spectral_oracle_agrees_off_diagonal() {
    let eps = 1e-5;
    for &t in &[-0.8, 0.0, 0.3, 1.5] {
        let s = n3_embedded(t);
        let rate = TodaRate::centered(&n3_embedded(t + eps), &n3_embedded(t - eps), eps).unwrap();
        let oracle = spectral_cd_oracle(&s, &rate).unwrap();
        let toda = counterdiabatic_one_body(&s);
        assert!(eigenbasis_offdiagonal_distance(&toda, &oracle, &s).unwrap() < 1e-7);
    }
    let s0 = random_open(5, 99);
    let traj = integrate_toda(&s0, 0.0, 2.0, 1e-3, 400).unwrap();
    for s in &traj.states {
        let rate = toda_rhs(s);
        let oracle = spectral_cd_oracle(s, &rate).unwrap();
        let toda = counterdiabatic_one_body(s);
        assert!(eigenbasis_offdiagonal_distance(&toda, &oracle, s).unwrap() < 1e-7);
        // the oracle satisfies the invariant equation by construction
        let h = adiabatic_one_body(s);
        let dh = rate_one_body(&rate).unwrap();
        let r = dh.scale(C::new(0.0, 1.0)).sub(&oracle.commutator(&h).unwrap()).unwrap();
        assert!(r.frobenius_norm() < 1e-8);
    }
}

#[test]
fn spectral_oracle_edge_cases() {
    let s = random_open(5, 3);
    let zero = TodaRate { dj: vec![0.0; 4], dh: vec![0.0; 5] };
    assert_eq!(spectral_cd_oracle(&s, &zero).unwrap().max_abs(), 0.0);

    let deg = TodaState::open(vec![0.0], vec![1.0, 1.0]).unwrap();
    let coupled = TodaRate { dj: vec![0.5], dh: vec![0.0, 0.0] };
    assert!(matches!(spectral_cd_oracle(&deg, &coupled), Err(Error::DegenerateSpectrum(_))));
    let uncoupled = TodaRate { dj: vec![0.0], dh: vec![0.0, 0.0] };
    assert!(spectral_cd_oracle(&deg, &uncoupled).is_ok());
}

#[test]
fn theta_gauge_identity() {
    let s = random_open(7, 5);
    let u = theta_gauge::<f64>(7);
    let (h, f) = inverse_engineering_pair(&s);
    let total = adiabatic_one_body(&s).add(&counterdiabatic_one_body(&s)).unwrap();
    assert!(dense_close(&h.conjugate_by(&u).unwrap(), &total) < 1e-12);
    assert!(dense_close(&f.conjugate_by(&u).unwrap(), &adiabatic_one_body(&s)) < 1e-12);
}

fn bound_level(s: &TodaState<f64>) -> usize {
    let ev = sector_spectrum(s, Sector::SingleFlip).unwrap();
    let idx: Vec<usize> = (0..ev.len()).filter(|&k| ev[k].abs() > 1.0 + 1e-3).collect();
    assert_eq!(idx.len(), 1, "{:?}", idx.iter().map(|&k| ev[k]).collect::<Vec<_>>());
    idx[0]
}

#[test]
fn transport_with_and_without_cd() {
    let (n, kappa) = (60usize, 1.0f64);
    let c0 = (kappa * 15.0).exp();
    let mut sched = |t: f64| toda_single_soliton(n, t, kappa, c0);
    let s0 = sched(0.0).unwrap();
    let level = TrackedLevel::Single(bound_level(&s0));
    let psi0 = sector_eigenstate(&s0, level).unwrap();
    let opts = EvolveOptions { with_cd: true, speedup: 1.0, record_every: 10 };
    let with = evolve_sector(&psi0, Sector::SingleFlip, &mut sched, level, opts, 0.0, 20.0, 0.02).unwrap();
    assert!(with.min_occupation() >= 0.999, "{}", with.min_occupation());
    assert!(with.max_norm_drift < 1e-8);

    let fast = EvolveOptions { with_cd: false, speedup: 10.0, record_every: 10 };
    let without = evolve_sector(&psi0, Sector::SingleFlip, &mut sched, level, fast, 0.0, 2.0, 0.002).unwrap();
    assert!(without.final_occupation() < with.final_occupation());
    eprintln!("occupation: with CD {:.6}, compressed without CD {:.6}", with.final_occupation(), without.final_occupation());
}

#[test]
fn static_schedule_keeps_occupations() {
    let s = random_open(8, 21);
    let mut sched = |_t: f64| Ok(s.clone());
    let level = TrackedLevel::Pair(2, 5);
    let psi0 = sector_eigenstate(&s, level).unwrap();
    let opts = EvolveOptions { with_cd: false, speedup: 1.0, record_every: 1 };
    let out = evolve_sector(&psi0, Sector::DoubleFlip, &mut sched, level, opts, 0.0, 3.0, 0.05).unwrap();
    assert!(out.occupations.iter().all(|&o| (o - 1.0).abs() < 1e-10));
}

#[test]
fn double_flip_transport_by_two_solitons() {
    let n = 60;
    let s0 = superposed_solitons(n, 0.0, &[(1.2, (1.2f64 * 15.0).exp()), (0.7, (0.7f64 * 32.0).exp())]).unwrap();
    let ev = sector_spectrum(&s0, Sector::SingleFlip).unwrap();
    let bound: Vec<usize> = (0..n).filter(|&k| ev[k].abs() > 1.0 + 1e-3).collect();
    assert_eq!(bound.len(), 2);
    let level = TrackedLevel::Pair(bound[0], bound[1]);
    let psi0 = sector_eigenstate(&s0, level).unwrap();
    let mut flow = TodaFlow::new(s0, 0.0, 1e-2).unwrap();
    let opts = EvolveOptions { with_cd: true, speedup: 1.0, record_every: 25 };
    let out = evolve_sector(&psi0, Sector::DoubleFlip, &mut flow, level, opts, 0.0, 15.0, 0.02).unwrap();
    assert!(out.min_occupation() >= 0.999, "{}", out.min_occupation());
    assert!(out.max_norm_drift < 1e-8);
}

#[test]
fn double_flip_evolution_matches_direct_integration() {
    // Oracle: RK4 with tiny steps on the explicit lifted matrix.
    let s0 = random_open(5, 8);
    let mut flow = TodaFlow::new(s0.clone(), 0.0, 1e-3).unwrap();
    let level = TrackedLevel::Pair(0, 3);
    let psi0 = sector_eigenstate(&s0, level).unwrap();
    let opts = EvolveOptions { with_cd: true, speedup: 1.0, record_every: 1000 };
    let out = evolve_sector(&psi0, Sector::DoubleFlip, &mut flow, level, opts, 0.0, 1.0, 0.01).unwrap();

    let mut flow = TodaFlow::new(s0, 0.0, 1e-4).unwrap();
    let ham = |flow: &mut TodaFlow<f64>, t: f64| {
        let s = flow.state_at(t).unwrap();
        let set = build_sector(&s, Sector::DoubleFlip).unwrap();
        set.h_ad.to_dense().add(&set.h_cd.to_dense()).unwrap()
    };
    let rhs = |h: &OperatorMatrix<f64>, v: &[C]| -> Vec<C> {
        h.apply(v).unwrap().into_iter().map(|z| z * C::new(0.0, -1.0)).collect()
    };
    let axpy = |a: &[C], s: f64, b: &[C]| -> Vec<C> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };
    let (steps, dt) = (4000, 1.0 / 4000.0);
    let mut v = psi0.clone();
    for k in 0..steps {
        let t = k as f64 * dt;
        let h0 = ham(&mut flow, t);
        let hm = ham(&mut flow, t + dt / 2.0);
        let h1 = ham(&mut flow, t + dt);
        let k1 = rhs(&h0, &v);
        let k2 = rhs(&hm, &axpy(&v, dt / 2.0, &k1));
        let k3 = rhs(&hm, &axpy(&v, dt / 2.0, &k2));
        let k4 = rhs(&h1, &axpy(&v, dt, &k3));
        v = (0..v.len()).map(|i| v[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0)).collect();
    }
    let err = v.iter().zip(&out.final_state).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
}

#[test]
fn magnus_step_is_fourth_order() {
    let s0 = n3_closed_form(1.0f64, 2.0, -1.0).unwrap();
    let level = TrackedLevel::Single(0);
    let psi0 = sector_eigenstate(&s0, level).unwrap();
    let run = |dt: f64| {
        let mut sched = |t: f64| n3_closed_form(1.0, 2.0, t);
        let opts = EvolveOptions { with_cd: false, speedup: 1.0, record_every: 1000 };
        evolve_sector(&psi0, Sector::SingleFlip, &mut sched, level, opts, -1.0, 1.0, dt).unwrap().final_state
    };
    let reference = run(1e-4);
    let err = |dt: f64| run(dt).iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let (e1, e2) = (err(0.1), err(0.05));
    let order = (e1 / e2).log2();
    assert!(order > 3.7, "observed order {order}");
}

#[test]
fn evolve_rejects_bad_input() {
    let s = random_open(4, 1);
    let mut sched = |_t: f64| Ok(s.clone());
    let psi = vec![C::new(1.0, 0.0); 4];
    let opts = EvolveOptions::default();
    let r = evolve_sector(&psi, Sector::SingleFlip, &mut sched, TrackedLevel::Single(0), opts, 0.0, 1.0, 0.1);
    assert!(matches!(r, Err(Error::InvalidArgument(_))));
    let psi = sector_eigenstate(&s, TrackedLevel::Single(0)).unwrap();
    let r = evolve_sector(&psi, Sector::SingleFlip, &mut sched, TrackedLevel::Pair(0, 1), opts, 0.0, 1.0, 0.1);
    assert!(r.is_err());
    let r = evolve_sector(&psi, Sector::SingleFlip, &mut sched, TrackedLevel::Single(0), opts, 0.0, 10.0, 5.0);
    assert!(matches!(r, Err(Error::StepSize(_))));
}
