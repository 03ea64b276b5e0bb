//! Closed-form stationary solutions.

mod dilation;
mod step;
mod waveguide;

pub use self::dilation::{dilation_transform, DilationMode};
pub use self::step::StepSolution;
pub use self::waveguide::{
    characteristic_speed, relative_population_asymptotic, Regime, WaveguideSolution, DEFAULT_DEGENERACY_EPSILON,
};

/// `|sin z|² / (|cos z|² + |sin z|²)` for `z = a + ib`.
///
/// Uses `|sin z|² = sin²a + sinh²b` and `|cos z|² = cos²a + sinh²b`, so the
/// denominator is `1 + 2 sinh²b`. For large `|b|` the ratio is rewritten in
/// terms of `w = e^{−2|b|}` to avoid overflowing `sinh`.
pub(crate) fn population_ratio(a: f64, b: f64) -> f64 {
    let sin_a = libm::sin(a);
    let sin2 = sin_a * sin_a;
    let b = libm::fabs(b);
    if b <= 1.0 {
        let sh = libm::sinh(b);
        let s = sh * sh;
        (sin2 + s) / (1.0 + 2.0 * s)
    } else {
        let w = libm::exp(-2.0 * b);
        let one_minus = 1.0 - w;
        let sq = one_minus * one_minus;
        (4.0 * w * sin2 + sq) / (4.0 * w + 2.0 * sq)
    }
}

#[cfg(test)]
mod tests {
    use super::population_ratio;

    #[test]
    fn ratio_branches_agree_at_switch() {
        for &a in &[0.0, 0.3, 1.2, 2.9] {
            let lo = population_ratio(a, 1.0 - 1e-12);
            let hi = population_ratio(a, 1.0 + 1e-12);
            assert!((lo - hi).abs() < 1e-11, "a = {a}: {lo} vs {hi}");
        }
    }

    #[test]
    fn ratio_saturates_for_huge_imaginary_part() {
        let p = population_ratio(0.7, 800.0);
        assert!(p.is_finite());
        assert!(p <= 0.5 && 0.5 - p < 1e-12);
    }
}
