use crate::analytic::StepSolution;
use crate::quad::adaptive_simpson;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DwellTime {
    /// `|t|² / (2κ j_in)`
    pub closed_form: f64,
    /// `∫₀^∞ ρ dx / j_in` by adaptive quadrature.
    pub quadrature: f64,
}

/// Standard dwell time of the evanescent region per unit incident flux.
pub fn qm_dwell_time(sol: &StepSolution) -> DwellTime {
    let j_in = sol.incident_flux();
    let closed_form = sol.transmission_weight() / (2.0 * sol.kappa() * j_in);
    // e^{−2κx} has dropped below 1e−40 well before 50/κ
    let upper = 50.0 / sol.kappa();
    let tol = 1e-14 * sol.transmission_weight() / sol.kappa();
    let integral = adaptive_simpson(&|x| sol.density(x), 0.0, upper, tol);
    DwellTime {
        closed_form,
        quadrature: integral / j_in,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{dilation_transform, DilationMode};
    use crate::PhysicalParams;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_case() {
        let sol = StepSolution::new(&PhysicalParams::natural(0.5, 1.0, 0.0).unwrap()).unwrap();
        let tau = qm_dwell_time(&sol);
        assert_relative_eq!(tau.closed_form, 1.0, epsilon = 1e-15);
        assert_relative_eq!(tau.quadrature, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn quadrature_agrees_over_parameters() {
        for &(e, v0) in &[(0.01, 1.0), (0.2, 1.0), (0.9, 1.0), (3.0, 40.0)] {
            let sol = StepSolution::new(&PhysicalParams::natural(e, v0, 0.0).unwrap()).unwrap();
            let tau = qm_dwell_time(&sol);
            assert_relative_eq!(tau.quadrature, tau.closed_form, max_relative = 1e-9);
        }
    }

    #[test]
    fn scales_with_time_dilation() {
        let p = PhysicalParams::natural(0.3, 1.0, 0.0).unwrap();
        let q = dilation_transform(&p, 3.0, DilationMode::Time).unwrap();
        let tau = qm_dwell_time(&StepSolution::new(&p).unwrap()).closed_form;
        let tau_q = qm_dwell_time(&StepSolution::new(&q).unwrap()).closed_form;
        assert_relative_eq!(tau_q, 3.0 * tau, max_relative = 1e-14);
    }
}
