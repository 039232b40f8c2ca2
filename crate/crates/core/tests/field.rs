use std::f64::consts::PI;
use std::time::Instant;

use lax_shortcuts::field::*;
use lax_shortcuts::kdv::{double_soliton, single_soliton, SolitonParams, SpaceTimeField};
use lax_shortcuts::linalg::{eigen, OperatorMatrix};
use num_complex::Complex;
use proptest::prelude::*;

fn lowest(h: &OperatorMatrix<f64>, count: usize) -> Vec<f64> {
    eigen::symmetric_lowest(h.real_entries().unwrap(), h.dim(), count)
        .unwrap()
        .values
}

#[test]
fn derivative_examples() {
    let g = Grid1D::new(-PI, PI, 64).unwrap();
    let one = Wavefunction::from_real(&g, |_| 1.0);
    assert!(derivative(&one, 1).unwrap().values().iter().all(|z| z.norm() < 1e-14));
    let k = 2.0 * PI / g.length();
    let s = Wavefunction::from_real(&g, |x| (k * x).sin());
    let d = derivative(&s, 1).unwrap();
    for (i, z) in d.values().iter().enumerate() {
        assert!((z.re - k * (k * g.x(i)).cos()).abs() < 1e-10);
    }
    // Gaussian second derivative against a refined finite-difference oracle
    // (fixed small step, truncation error ~h⁴).
    let g = Grid1D::new(-10.0, 10.0, 256).unwrap();
    let f = |x: f64| (-x * x).exp();
    let psi = Wavefunction::from_real(&g, f);
    let d2 = derivative(&psi, 2).unwrap();
    let h = 1e-3;
    for (i, z) in d2.values().iter().enumerate() {
        let x = g.x(i);
        let fd = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
            / (12.0 * h * h);
        assert!((z.re - fd).abs() < 1e-6);
    }
}

#[test]
fn free_particle_spectrum() {
    let g = Grid1D::new(0.0, 2.0 * PI, 16).unwrap();
    let h = hamiltonian_matrix(&[0.0; 16], &g).unwrap();
    let eig = h.eigh().unwrap();
    let mut expect: Vec<f64> = g.wavenumbers().iter().map(|k| k * k).collect();
    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (a, b) in eig.values.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-10);
    }
    // ±k degeneracy
    assert!((eig.values[1] - eig.values[2]).abs() < 1e-10);
}

#[test]
fn soliton_bound_states() {
    let g = Grid1D::new(-20.0, 20.0, 512).unwrap();
    let u = single_soliton(1.0).unwrap().sample(&g, 0.0);
    let h = hamiltonian_matrix(&u, &g).unwrap();
    assert!((lowest(&h, 1)[0] + 1.0).abs() < 1e-4);

    let start = Instant::now();
    let g = Grid1D::new(-40.0, 40.0, 1024).unwrap();
    let p = SolitonParams::double(1.2, 3.0, 1.0, 3.0).unwrap();
    let u = double_soliton(p).unwrap().sample(&g, 0.0);
    let levels = lowest(&hamiltonian_matrix(&u, &g).unwrap(), 2);
    assert!((levels[0] + 1.44).abs() < 1e-3);
    assert!((levels[1] + 1.00).abs() < 1e-3);
    eprintln!("1024-point lowest levels in {:?}", start.elapsed());
}

#[test]
fn cd3_matches_dense_matrix_oracle() {
    let g = Grid1D::new(-12.0, 12.0, 128).unwrap();
    let u = single_soliton(1.0).unwrap().sample(&g, 0.0);
    let psi = Wavefunction::from_real(&g, |x: f64| 1.0 / x.cosh()).normalized().unwrap();
    let out = operator_apply_cd3(&psi, &u, -4.0, 0.0).unwrap();
    // Dense oracle: P = F⁻¹ diag(k) F built column by column, then
    // a [P³ + ¾(P U + U P)].
    let n = g.len();
    let p = operator_matrix_from_action(&g, |v| momentum_power(&Wavefunction::new(&g, v.to_vec()).unwrap(), 1).into_values());
    let umat = OperatorMatrix::diagonal(&u.iter().map(|&x| Complex::new(x, 0.0)).collect::<Vec<_>>());
    let p3 = p.matmul(&p).unwrap().matmul(&p).unwrap();
    let sym = p.matmul(&umat).unwrap().add(&umat.matmul(&p).unwrap()).unwrap();
    let op = p3.add(&sym.scale(Complex::new(0.75, 0.0))).unwrap().scale(Complex::new(-4.0, 0.0));
    let dense = op.apply(psi.values()).unwrap();
    let err = out.values().iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
    assert_eq!(dense.len(), n);
    // a = 0 leaves the first-order (scale-invariant) term v·p.
    let lin = operator_apply_cd3(&psi, &u, 0.0, 0.7).unwrap();
    let pp = momentum_power(&psi, 1);
    for (a, b) in lin.values().iter().zip(pp.values()) {
        assert!((a - b * 0.7).norm() < 1e-12);
    }
}

#[test]
fn static_residual_and_identity_gauge() {
    let g = Grid1D::new(-10.0, 10.0, 64).unwrap();
    let u: Vec<f64> = g.points().iter().map(|&x: &f64| -(-x * x).exp()).collect();
    let h = hamiltonian_matrix(&u, &g).unwrap();
    let z = OperatorMatrix::zeros(64);
    assert_eq!(invariant_residual(&h, &h, 1e-5, &z, &h).unwrap(), 0.0);

    let sol = single_soliton(1.0).unwrap();
    let (t, eps) = (0.2, 1e-5);
    let hp = hamiltonian_matrix(&sol.sample(&g, t + eps), &g).unwrap();
    let hm = hamiltonian_matrix(&sol.sample(&g, t - eps), &g).unwrap();
    let h0 = hamiltonian_matrix(&sol.sample(&g, t), &g).unwrap();
    let us = sol.sample(&g, t);
    let cd = operator_matrix_from_action(&g, |v| {
        operator_apply_cd3(&Wavefunction::new(&g, v.to_vec()).unwrap(), &us, -4.0, 0.0)
            .unwrap()
            .into_values()
    });
    let r1: f64 = invariant_residual(&hp, &hm, eps, &cd, &h0).unwrap();
    let shifted = cd.add(&OperatorMatrix::identity(64).scale(Complex::new(3.5, 0.0))).unwrap();
    let r2 = invariant_residual(&hp, &hm, eps, &shifted, &h0).unwrap();
    assert!((r1 - r2).abs() < 1e-12);
}

proptest! {
    #[test]
    fn parseval_for_first_derivative(coeffs in prop::collection::vec(-1.0f64..1.0, 6)) {
        let g = Grid1D::new(-5.0, 5.0, 64).unwrap();
        let l = g.length();
        let psi = Wavefunction::from_real(&g, |x| {
            coeffs.iter().enumerate().map(|(m, c)| c * (2.0 * PI * (m as f64 + 1.0) * x / l).sin()).sum()
        });
        let d = derivative(&psi, 1).unwrap();
        let x_norm: f64 = d.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * g.spacing();
        let mut buf = psi.values().to_vec();
        // Fourier side: Σ k² |ψ̂|² · L / n²
        use rustfft::FftPlanner;
        FftPlanner::new().plan_fft_forward(64).process(&mut buf);
        let k_norm: f64 = buf.iter().zip(g.wavenumbers()).map(|(z, k)| k * k * z.norm_sqr()).sum::<f64>()
            * l / (64.0 * 64.0);
        prop_assert!((x_norm - k_norm).abs() < 1e-10 * (1.0 + k_norm));
    }

    #[test]
    fn hamiltonian_is_hermitian(vals in prop::collection::vec(-3.0f64..3.0, 16)) {
        let g = Grid1D::new(0.0, 4.0, 16).unwrap();
        let h = hamiltonian_matrix(&vals, &g).unwrap();
        prop_assert!(h.is_hermitian());
        prop_assert!(h.hermitian_defect() == 0.0);
    }

    #[test]
    fn normalize_gives_unit_norm(scale in 1e-3f64..1e3, shift in -2.0f64..2.0) {
        let g = Grid1D::new(-10.0, 10.0, 128).unwrap();
        let psi = Wavefunction::from_real(&g, |x| scale * (-(x - shift).powi(2)).exp()).normalized().unwrap();
        prop_assert!((psi.norm_sq() - 1.0).abs() < 1e-12);
    }
}
