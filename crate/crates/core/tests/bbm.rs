use approx::assert_relative_eq;
use evanescent_core::analysis::qm_dwell_time;
use evanescent_core::analytic::StepSolution;
use evanescent_core::bbm::{
    bbm_dwell_analytic, entry_probability, left_time_of_flight, run_ensemble, sample_turning_point, simulate_particle,
    BbmConfig, EnsembleAccumulator, ParticleStream,
};
use evanescent_core::PhysicalParams;
use proptest::prelude::*;
use std::f64::consts::PI;

fn step(e: f64, v0: f64) -> StepSolution {
    StepSolution::new(&PhysicalParams::natural(e, v0, 0.0).unwrap()).unwrap()
}

/// Composite Gauss–Legendre (5 nodes) on `n` panels.
fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            NODES
                .iter()
                .zip(WEIGHTS)
                .map(|(x, w)| w * f(mid + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

#[test]
fn time_of_flight_matches_quadrature() {
    let s = step(0.5, 1.0);
    let numeric = gauss_legendre(|x| s.left_density(x), -PI, 0.0, 200) / (2.0 * s.incident_flux());
    assert_relative_eq!(left_time_of_flight(&s, -PI, 0.0), numeric, epsilon = 1e-10);
    let s = step(0.13, 0.9);
    let numeric = gauss_legendre(|x| s.left_density(x), -4.1, -0.3, 400) / (2.0 * s.incident_flux());
    assert_relative_eq!(left_time_of_flight(&s, -4.1, -0.3), numeric, epsilon = 1e-10);
}

#[test]
fn turning_point_mean_over_a_million_draws() {
    let kappa = 1.3;
    let mut rng = ParticleStream::new(11, 0);
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n).map(|_| sample_turning_point(kappa, &mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - 1.0 / (2.0 * kappa)).abs() < 4.0 * se);
}

fn ks_statistic(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

#[test]
fn turning_point_ks_rejection_rate_matches_level() {
    // A 5% test on 20 independent streams rejects about once; five or more
    // rejections has probability below 0.3% for a correct sampler.
    let n = 50_000;
    let critical = 1.358 / (n as f64).sqrt();
    let rejections = (0..20)
        .filter(|&seed| {
            let mut rng = ParticleStream::new(seed, 0);
            let draws = (0..n).map(|_| sample_turning_point(0.8, &mut rng)).collect();
            ks_statistic(draws, |x| 1.0 - (-1.6 * x).exp()) > critical
        })
        .count();
    assert!(rejections <= 4, "{rejections} of 20 streams rejected");
}

#[test]
fn entered_fraction_is_binomial() {
    for &e in &[0.2, 0.8] {
        let mut cfg = BbmConfig::new(PhysicalParams::natural(e, 1.0, 0.0).unwrap()).unwrap();
        cfg.n_particles = 20_000;
        let est = run_ensemble(&cfg).unwrap();
        let a = entry_probability(&step(e, 1.0));
        let se = (a * (1.0 - a) / cfg.n_particles as f64).sqrt();
        assert!(
            (est.entered_fraction - a).abs() < 4.0 * se,
            "E = {e}: {} vs {a}",
            est.entered_fraction
        );
    }
}

#[test]
fn entering_particles_average_one_over_kappa_v() {
    let cfg = BbmConfig::new(PhysicalParams::natural(0.5, 1.0, 0.0).unwrap()).unwrap();
    let sol = cfg.validate().unwrap();
    let residences: Vec<f64> = (0..50_000)
        .map(|i| simulate_particle(&cfg, &sol, i, None))
        .filter(|o| o.entered)
        .map(|o| o.residence_right)
        .collect();
    let n = residences.len() as f64;
    let mean = residences.iter().sum::<f64>() / n;
    let sd = (residences.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let expected = 1.0 / (sol.kappa() * sol.right_speed());
    assert!((mean - expected).abs() < 3.0 * sd / n.sqrt());
}

#[test]
fn ensemble_does_not_depend_on_evaluation_order() {
    let mut cfg = BbmConfig::new(PhysicalParams::natural(0.35, 1.0, 0.0).unwrap()).unwrap();
    cfg.n_particles = 5_000;
    let sol = cfg.validate().unwrap();
    // compute outcomes back to front, fold in index order
    let mut outcomes: Vec<_> = (0..cfg.n_particles)
        .rev()
        .map(|i| (i, simulate_particle(&cfg, &sol, i, None)))
        .collect();
    outcomes.sort_by_key(|(i, _)| *i);
    let mut acc = EnsembleAccumulator::new(&cfg, &sol);
    for (_, o) in &outcomes {
        acc.push(o);
    }
    assert_eq!(acc.finish(), run_ensemble(&cfg).unwrap());
    assert_eq!(run_ensemble(&cfg).unwrap(), run_ensemble(&cfg).unwrap());
}

#[test]
fn dwell_time_vanishes_for_tall_steps() {
    let mut last = f64::INFINITY;
    for &v0 in &[1.0, 1e2, 1e4, 1e6, 1e8] {
        let tau = bbm_dwell_analytic(&step(0.5, v0));
        assert!(tau < last);
        last = tau;
    }
    assert!(last < 1e-7);
}

proptest! {
    #[test]
    fn entry_probability_is_a_probability(e in 1e-6f64..1.0, v0_extra in 1e-6f64..100.0) {
        let s = step(e, e + v0_extra);
        let a = entry_probability(&s);
        // 2kκ ≤ k² + κ² with equality only at k = κ
        let am_gm = 2.0 * s.k() * s.kappa() / (s.k().powi(2) + s.kappa().powi(2));
        prop_assert!(a > 0.0 && a <= 1.0 + 1e-15);
        prop_assert!((a - am_gm).abs() <= 1e-12 * am_gm);
    }

    #[test]
    fn dwell_identity(e in 1e-4f64..1.0, v0_extra in 1e-4f64..10.0, m in 0.1f64..10.0, hbar in 0.1f64..10.0) {
        let s = StepSolution::new(&PhysicalParams::new(m, hbar, e, e + v0_extra, 0.0).unwrap()).unwrap();
        let qm = qm_dwell_time(&s).closed_form;
        prop_assert!((qm - bbm_dwell_analytic(&s)).abs() <= 1e-12 * qm);
    }
}
