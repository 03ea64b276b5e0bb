use approx::assert_relative_eq;
use evanescent_core::analytic::{relative_population_asymptotic, Regime, WaveguideSolution};
use evanescent_core::{Complex64, PhysicalParams};
use proptest::prelude::*;

/// Max relative residual of the coupled stationary equations on a grid, with
/// ψ″ from a central second difference of step `h`.
fn coupled_residual(sol: &WaveguideSolution, h: f64) -> f64 {
    let p = sol.params();
    let (m, hbar, e, v0, j) = (p.m(), p.hbar(), p.e(), p.v0(), p.j());
    let kin = hbar * hbar / (2.0 * m);
    let mut worst: f64 = 0.0;
    for i in 1..40 {
        let x = 0.25 * i as f64;
        let (pm, pa) = sol.fields(x);
        let (pm_p, pa_p) = sol.fields(x + h);
        let (pm_m, pa_m) = sol.fields(x - h);
        let d2m = (pm_p - pm * 2.0 + pm_m) / (h * h);
        let d2a = (pa_p - pa * 2.0 + pa_m) / (h * h);
        let res_m = pm * e - (-d2m * kin + pm * v0 + (pa - pm) * (hbar * j));
        let res_a = pa * e - (-d2a * kin + pa * v0 + (pm - pa) * (hbar * j));
        let scale = e * (pm.norm() + pa.norm()) + 1e-300;
        worst = worst.max(res_m.norm() / scale).max(res_a.norm() / scale);
    }
    worst
}

#[test]
fn fields_solve_the_coupled_equations_at_second_order() {
    let cases = [
        (0.5, 0.0, 0.1),  // Δ > ħJ
        (0.5, 2.0, 0.1),  // Δ < −ħJ
        (0.5, 0.55, 0.1), // |Δ| < ħJ, fully complex k2
    ];
    for &(e, v0, j) in &cases {
        let sol = WaveguideSolution::new(&PhysicalParams::natural(e, v0, j).unwrap()).unwrap();
        let coarse = coupled_residual(&sol, 2e-3);
        let fine = coupled_residual(&sol, 1e-3);
        assert!(fine < 1e-6, "residual {fine} for {:?}", (e, v0, j));
        let order = (coarse / fine).log2();
        assert!(
            (order - 2.0).abs() < 0.15,
            "convergence order {order} for {:?}",
            (e, v0, j)
        );
    }
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let sol = WaveguideSolution::new(&PhysicalParams::natural(0.7, 1.1, 0.3).unwrap()).unwrap();
    let h = 1e-5;
    for i in 1..20 {
        let x = 0.3 * i as f64;
        let (dm, da) = sol.field_derivatives(x);
        let (pm_p, pa_p) = sol.fields(x + h);
        let (pm_m, pa_m) = sol.fields(x - h);
        assert!((dm - (pm_p - pm_m) / (2.0 * h)).norm() < 1e-8);
        assert!((da - (pa_p - pa_m) / (2.0 * h)).norm() < 1e-8);
    }
}

#[test]
fn evanescent_population_stays_below_half() {
    let sol = WaveguideSolution::new(&PhysicalParams::natural(0.5, 2.0, 0.1).unwrap()).unwrap();
    for i in 0..20_000 {
        let x = 0.01 * i as f64;
        let p = sol.relative_population(x).unwrap();
        assert!(p < 0.5, "p_a({x}) = {p}");
    }
    // beyond u ≈ 18 the gap 1/2 − p_a is below one ulp of 1/2
    for i in 0..5_000 {
        let u = 0.003 * i as f64;
        assert!(relative_population_asymptotic(1.0, 1.0, u, Regime::Evanescent) < 0.5);
    }
    assert!(relative_population_asymptotic(1.0, 1.0, 1e3, Regime::Evanescent) <= 0.5);
}

#[test]
fn exact_population_approaches_asymptotic_form() {
    // |Δ| = 100 ħJ on both sides of the step
    let j = 0.01;
    for &v0 in &[0.5 - 1.0 + j, 0.5 + 1.0 + j] {
        let params = PhysicalParams::natural(0.5, v0, j).unwrap();
        assert_relative_eq!(params.delta().abs(), 100.0 * j, max_relative = 1e-12);
        let sol = WaveguideSolution::new(&params).unwrap();
        let v = evanescent_core::analytic::characteristic_speed(&params);
        let regime = Regime::of(params.delta());
        for i in 1..200 {
            let x = 0.5 * i as f64;
            let exact = sol.relative_population(x).unwrap();
            let approx = relative_population_asymptotic(j, v, x, regime);
            let dev = (exact - approx).abs() / approx.max(1e-6);
            assert!(dev < 1e-3, "x = {x}: {exact} vs {approx}");
        }
    }
}

fn params_strategy() -> impl Strategy<Value = PhysicalParams> {
    (0.1f64..5.0, 0.01f64..10.0, 0.0f64..2.0, 0.5f64..2.0, 0.5f64..2.0)
        .prop_map(|(e, v0, j, m, hbar)| PhysicalParams::new(m, hbar, e, v0, j).unwrap())
        .prop_filter("away from the branch point", |p| {
            (p.delta() + p.hbar() * p.j()).abs() > 1e-6
        })
}

proptest! {
    #[test]
    fn wavenumber_product_identity(params in params_strategy()) {
        let sol = WaveguideSolution::new(&params).unwrap();
        let product = sol.k1() * sol.k2();
        let expected = params.m() * params.j() / params.hbar();
        prop_assert!((product - Complex64::new(expected, 0.0)).norm() <= 1e-12 * expected.max(1e-300) + 1e-300);
        prop_assert_eq!(sol.k0(), (2.0 * params.m() * params.e()).sqrt() / params.hbar());
        let hj = params.hbar() * params.j();
        if params.delta() >= hj {
            prop_assert!(sol.k2().im.abs() <= 1e-12 * sol.k2().norm());
        }
        if params.delta() <= -hj {
            prop_assert!(sol.k2().re.abs() <= 1e-12 * sol.k2().norm());
        }
    }

    #[test]
    fn population_is_a_probability(params in params_strategy(), x in 0.0f64..200.0) {
        let sol = WaveguideSolution::new(&params).unwrap();
        let p = sol.relative_population(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn asymptotic_population_depends_on_ratio_only(j in 0.001f64..1.0, v in 0.1f64..10.0, x in 0.0f64..50.0, s in 0.1f64..10.0) {
        for regime in [Regime::Propagating, Regime::Evanescent] {
            let a = relative_population_asymptotic(j, v, x, regime);
            let b = relative_population_asymptotic(j * s, v * s, x, regime);
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
