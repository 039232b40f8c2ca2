use lax_shortcuts::spin::{
    build_sector, evolve_sector, sector_eigenstate, sector_spectrum, single_flip_eigen, spectrum_flow, Band,
    EvolveOptions, Sector, TrackedLevel,
};
use lax_shortcuts::toda::{toda_single_soliton, TodaState};
use lax_shortcuts::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{SpinSpectrumParams, SpinTransferParams};
use crate::report::{Checker, Outcome, Table};

pub const SPECTRUM_CHECKS: &[&str] = &["band_count", "continuum_width", "bound_width", "spectral_drift", "pairwise_sums"];

pub const TRANSFER_CHECKS: &[&str] = &["min_occupation_with_cd", "control_ends_lower", "norm_drift"];

/// Splits two bands into (continuum, bound): the continuum holds more levels.
fn classify(bands: &[Band<f64>]) -> Option<(Band<f64>, Band<f64>)> {
    match bands {
        [a, b] if a.count >= b.count => Some((*a, *b)),
        [a, b] => Some((*b, *a)),
        _ => None,
    }
}

pub fn spectrum(p: &SpinSpectrumParams, mut ck: Checker) -> Result<Outcome> {
    let c0 = p.log_c0.exp();
    let states: Vec<TodaState<f64>> =
        p.times.iter().map(|&t| toda_single_soliton(p.sites, t, p.kappa, c0)).collect::<Result<_>>()?;
    let double = spectrum_flow(&p.times, &states, Sector::DoubleFlip, p.band_gap)?;
    let single = spectrum_flow(&p.times, &states, Sector::SingleFlip, p.band_gap)?;

    let mut eigen = Table::new("eigenvalues", &["t", "sector", "index", "energy"]);
    for (flow, name) in [(&single, "single_flip"), (&double, "double_flip")] {
        for (&t, ev) in p.times.iter().zip(&flow.eigenvalues) {
            for (k, &e) in ev.iter().enumerate() {
                eigen.push(vec![t.into(), name.into(), k.into(), e.into()]);
            }
        }
    }
    let mut bands = Table::new("bands", &["t", "band", "lo", "hi", "count", "width", "label"]);
    let (mut two_bands, mut cont_dev, mut bound_dev) = (true, 0.0f64, 0.0f64);
    let mut widths = None;
    for (&t, bs) in p.times.iter().zip(&double.bands) {
        let split = classify(bs);
        for (k, b) in bs.iter().enumerate() {
            let label = match split {
                Some((c, _)) if c == *b => "continuum",
                Some(_) => "bound",
                None => "unclassified",
            };
            bands.push(vec![t.into(), k.into(), b.lo.into(), b.hi.into(), b.count.into(), b.width().into(), label.into()]);
        }
        match split {
            Some((c, b)) => {
                cont_dev = cont_dev.max((c.width() - 4.0).abs());
                bound_dev = bound_dev.max((b.width() - 2.0).abs());
                widths.get_or_insert((c.width(), b.width()));
            }
            None => two_bands = false,
        }
    }
    ck.holds("band_count", two_bands);
    if two_bands {
        ck.at_most("continuum_width", cont_dev, 0.1);
        ck.at_most("bound_width", bound_dev, 0.1);
    }
    ck.at_most("spectral_drift", double.max_drift.max(single.max_drift), 1e-6);

    // Double-flip levels against the dense lift on a small random chain.
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.pairwise_sites;
    let small = TodaState::open(
        (0..n - 1).map(|_| rng.gen_range(0.3..1.3)).collect(),
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )?;
    let dense: Vec<f64> = build_sector(&small, Sector::DoubleFlip)?.h_ad.to_dense().assert_hermitian()?.eigh()?.values;
    let pairs = sector_spectrum(&small, Sector::DoubleFlip)?;
    let err = dense.iter().zip(&pairs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ck.at_most("pairwise_sums", err, 1e-10);

    // Bound single-flip eigenvector at each time.
    let mut vectors = Table::new("bound_state", &["t", "site", "amplitude"]);
    for (&t, s) in p.times.iter().zip(&states) {
        let eig = single_flip_eigen(s)?;
        let k = (0..eig.values.len()).max_by(|&a, &b| eig.values[a].abs().total_cmp(&eig.values[b].abs())).unwrap_or(0);
        for (site, &a) in eig.vector(k).iter().enumerate() {
            vectors.push(vec![t.into(), (site + 1).into(), a.into()]);
        }
    }
    let (continuum, bound) = widths.unwrap_or((f64::NAN, f64::NAN));
    Ok(Outcome {
        tables: vec![eigen, bands, vectors],
        checks: ck.checks,
        summary: json!({ "continuum": continuum, "bound": bound, "max_drift": double.max_drift }),
    })
}

/// The single-flip level outside the free band `[-1, 1]`.
fn bound_level(s: &TodaState<f64>) -> Result<usize> {
    let ev = sector_spectrum(s, Sector::SingleFlip)?;
    let idx: Vec<usize> = (0..ev.len()).filter(|&k| ev[k].abs() > 1.0 + 1e-3).collect();
    match idx.as_slice() {
        [k] => Ok(*k),
        _ => Err(Error::Precondition(format!("expected one bound level, found {}", idx.len()))),
    }
}

pub fn transfer(p: &SpinTransferParams, mut ck: Checker) -> Result<Outcome> {
    let c0 = p.log_c0.exp();
    let (n, kappa) = (p.sites, p.kappa);
    let mut sched = |t: f64| toda_single_soliton(n, t, kappa, c0);
    let s0 = sched(0.0)?;
    let level = TrackedLevel::Single(bound_level(&s0)?);
    let psi0 = sector_eigenstate(&s0, level)?;
    let opts = EvolveOptions { with_cd: true, speedup: 1.0, record_every: p.record_every };
    let with = evolve_sector(&psi0, Sector::SingleFlip, &mut sched, level, opts, 0.0, p.t_end, p.dt)?;
    let fast = EvolveOptions { with_cd: false, speedup: p.compression, record_every: p.record_every };
    let (t_fast, dt_fast) = (p.t_end / p.compression, p.dt / p.compression);
    let without = evolve_sector(&psi0, Sector::SingleFlip, &mut sched, level, fast, 0.0, t_fast, dt_fast)?;

    ck.at_least("min_occupation_with_cd", with.min_occupation(), 0.999);
    ck.holds("control_ends_lower", without.final_occupation() < with.final_occupation());
    ck.at_most("norm_drift", with.max_norm_drift.max(without.max_norm_drift), 1e-8);

    let mut occ = Table::new("occupation", &["t", "occupation", "norm"]);
    for i in 0..with.times.len() {
        occ.push_nums(&[with.times[i], with.occupations[i], with.norms[i]]);
    }
    // Control times are reported on the schedule clock (λ t).
    let mut ctrl = Table::new("occupation_control", &["t_schedule", "occupation", "norm"]);
    for i in 0..without.times.len() {
        ctrl.push_nums(&[without.times[i] * p.compression, without.occupations[i], without.norms[i]]);
    }
    Ok(Outcome {
        tables: vec![occ, ctrl],
        checks: ck.checks,
        summary: json!({
            "min_occupation_with_cd": with.min_occupation(),
            "final_occupation_with_cd": with.final_occupation(),
            "final_occupation_control": without.final_occupation(),
        }),
    })
}
