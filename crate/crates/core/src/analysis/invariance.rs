use crate::analytic::{
    characteristic_speed, dilation_transform, relative_population_asymptotic, DilationMode, Regime, WaveguideSolution,
};
use crate::{Error, PhysicalParams, Result};

/// Largest `|p_a − p_a′|` accepted as invariant.
pub const INVARIANCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvarianceReport {
    pub mode: DilationMode,
    pub alpha: f64,
    /// Over the sample points, using the asymptotic `p_a(Jx/v)`.
    pub max_abs_deviation: f64,
    /// Same comparison with the exact two-guide population, when the
    /// wavenumbers are defined.
    pub max_abs_deviation_exact: Option<f64>,
    /// `v′ / v`
    pub speed_ratio: f64,
    /// `α` for space, `1/α` for time.
    pub expected_speed_ratio: f64,
    pub pass: bool,
}

/// Compares `p_a` before and after a dilation at corresponding points
/// (`x′ = αx` for space, `x′ = x` for time) and checks how `v` transforms.
pub fn invariance_check(
    params: &PhysicalParams,
    alpha: f64,
    mode: DilationMode,
    sample_xs: &[f64],
) -> Result<InvarianceReport> {
    let dilated = dilation_transform(params, alpha, mode)?;
    let v = characteristic_speed(params);
    let v_dilated = characteristic_speed(&dilated);
    if v == 0.0 {
        return Err(Error::DegenerateParameter {
            magnitude: 0.0,
            epsilon: 0.0,
        });
    }
    let regime = Regime::of(params.delta());
    let map_x = |x: f64| match mode {
        DilationMode::Space => alpha * x,
        DilationMode::Time => x,
    };

    let mut max_dev: f64 = 0.0;
    for &x in sample_xs {
        let before = relative_population_asymptotic(params.j(), v, x, regime);
        let after = relative_population_asymptotic(dilated.j(), v_dilated, map_x(x), regime);
        max_dev = max_dev.max(libm::fabs(before - after));
    }

    let exact = match (WaveguideSolution::new(params), WaveguideSolution::new(&dilated)) {
        (Ok(a), Ok(b)) => {
            let mut dev: f64 = 0.0;
            for &x in sample_xs {
                dev = dev.max(libm::fabs(a.relative_population(x)? - b.relative_population(map_x(x))?));
            }
            Some(dev)
        }
        _ => None,
    };

    let expected_speed_ratio = match mode {
        DilationMode::Space => alpha,
        DilationMode::Time => 1.0 / alpha,
    };
    let speed_ratio = v_dilated / v;
    let speed_ok = libm::fabs(speed_ratio - expected_speed_ratio) <= 8.0 * f64::EPSILON * expected_speed_ratio;
    let exact_ok = exact.is_none_or(|d| d < INVARIANCE_TOLERANCE);
    Ok(InvarianceReport {
        mode,
        alpha,
        max_abs_deviation: max_dev,
        max_abs_deviation_exact: exact,
        speed_ratio,
        expected_speed_ratio,
        pass: max_dev < INVARIANCE_TOLERANCE && exact_ok && speed_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn xs() -> Vec<f64> {
        (0..100).map(|i| 0.37 * i as f64).collect()
    }

    #[test]
    fn unit_factor_has_zero_deviation() {
        let p = PhysicalParams::natural(2.0, 1.0, 0.01).unwrap();
        for mode in [DilationMode::Space, DilationMode::Time] {
            let report = invariance_check(&p, 1.0, mode, &xs()).unwrap();
            assert_eq!(report.max_abs_deviation, 0.0);
            assert!(report.pass);
        }
    }

    #[test]
    fn time_mode_factor_three() {
        let p = PhysicalParams::natural(2.0, 1.0, 0.01).unwrap();
        let report = invariance_check(&p, 3.0, DilationMode::Time, &xs()).unwrap();
        assert!(report.max_abs_deviation < 1e-12);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn space_mode_halves_speed_for_half_factor() {
        let p = PhysicalParams::natural(0.4, 1.5, 0.01).unwrap();
        let report = invariance_check(&p, 0.5, DilationMode::Space, &xs()).unwrap();
        assert!((report.speed_ratio - 0.5).abs() < 1e-15);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn sign_of_delta_does_not_matter_for_speed() {
        // Δ = ±0.75 with the same |Δ|
        let plus = PhysicalParams::natural(1.0, 0.25, 0.0).unwrap();
        let minus = PhysicalParams::natural(1.0, 1.75, 0.0).unwrap();
        assert_eq!(characteristic_speed(&plus), characteristic_speed(&minus));
        let a = invariance_check(&plus, 2.0, DilationMode::Space, &xs()).unwrap();
        let b = invariance_check(&minus, 2.0, DilationMode::Space, &xs()).unwrap();
        assert_eq!(a.speed_ratio, b.speed_ratio);
        assert!(a.pass && b.pass);
    }

    #[test]
    fn zero_speed_is_rejected() {
        let p = PhysicalParams::natural(1.0, 1.0, 0.0).unwrap();
        assert!(invariance_check(&p, 2.0, DilationMode::Time, &xs()).is_err());
    }
}
