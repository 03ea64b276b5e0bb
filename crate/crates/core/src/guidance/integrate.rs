use alloc::vec::Vec;

use super::VelocityField;
use crate::{Error, Result};

/// Step-size control for [`integrate_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_initial: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Speeds below this count as "at rest".
    pub stuck_epsilon: f64,
    /// Time a particle must stay at rest before the run ends as stuck.
    pub stuck_duration: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h_initial: 1e-3,
            h_min: 1e-12,
            h_max: 10.0,
            stuck_epsilon: 1e-12,
            stuck_duration: 1e3,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Termination {
    ReachedTEnd,
    HitBoundary,
    Stuck,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryRecord {
    /// `(t, x)` with strictly increasing `t`.
    pub samples: Vec<(f64, f64)>,
    pub terminated: Termination,
}

impl TrajectoryRecord {
    pub fn last(&self) -> (f64, f64) {
        *self.samples.last().expect("trajectory always holds its start point")
    }
}

fn rk4<F: VelocityField + ?Sized>(field: &F, x: f64, h: f64) -> Result<f64> {
    let k1 = field.velocity(x)?;
    let k2 = field.velocity(x + 0.5 * h * k1)?;
    let k3 = field.velocity(x + 0.5 * h * k2)?;
    let k4 = field.velocity(x + h * k3)?;
    Ok(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// One full step and two half steps; returns the extrapolated position and
/// the error estimate.
fn doubled_step<F: VelocityField + ?Sized>(field: &F, x: f64, h: f64) -> Result<(f64, f64)> {
    let coarse = rk4(field, x, h)?;
    let mid = rk4(field, x, 0.5 * h)?;
    let fine = rk4(field, mid, 0.5 * h)?;
    let diff = (fine - coarse) / 15.0;
    Ok((fine + diff, libm::fabs(diff)))
}

/// Integrates `dx/dt = v(x)` from `x0` with adaptive fourth-order Runge–Kutta
/// (step doubling).
///
/// Stops at `t_end`, when leaving the field's domain, or once the speed has
/// stayed below `stuck_epsilon` for `stuck_duration`. A step that keeps
/// failing (density node or tolerance) down to `h_min` yields
/// [`Error::SingularityEncountered`].
pub fn integrate_trajectory<F: VelocityField + ?Sized>(
    field: &F,
    x0: f64,
    t_end: f64,
    control: &StepControl,
) -> Result<TrajectoryRecord> {
    let domain = field.domain();
    if !domain.contains(x0) {
        return Err(Error::InvalidConfig("start position outside the field domain"));
    }
    if !(t_end > 0.0) {
        return Err(Error::InvalidConfig("t_end must be positive"));
    }
    let mut samples = Vec::new();
    samples.push((0.0, x0));
    let (mut t, mut x) = (0.0, x0);
    let mut h = control.h_initial.min(t_end).min(control.h_max);
    let mut at_rest = 0.0;

    for _ in 0..control.max_steps {
        let v_here = match field.velocity(x) {
            Ok(v) => v,
            Err(_) => return Err(Error::SingularityEncountered { t, x }),
        };
        let h_try = h.min(t_end - t);
        let attempt = doubled_step(field, x, h_try);
        let (x_new, err) = match attempt {
            Ok(pair) => pair,
            Err(_) => {
                h = 0.25 * h_try;
                if h < control.h_min {
                    return Err(Error::SingularityEncountered { t, x });
                }
                continue;
            }
        };
        let tol = control.atol + control.rtol * libm::fabs(x).max(libm::fabs(x_new));
        if err > tol {
            let shrink = 0.9 * libm::pow(tol / err, 0.2);
            h = h_try * shrink.clamp(0.1, 0.5);
            if h < control.h_min {
                return Err(Error::SingularityEncountered { t, x });
            }
            continue;
        }

        if !domain.contains(x_new) {
            let edge = if x_new > domain.hi { domain.hi } else { domain.lo };
            let t_edge = t + h_try * (edge - x) / (x_new - x);
            if t_edge > t {
                samples.push((t_edge, edge));
            }
            return Ok(TrajectoryRecord {
                samples,
                terminated: Termination::HitBoundary,
            });
        }

        t += h_try;
        x = x_new;
        samples.push((t, x));

        if libm::fabs(v_here) < control.stuck_epsilon {
            at_rest += h_try;
        } else {
            at_rest = 0.0;
        }
        if at_rest >= control.stuck_duration {
            return Ok(TrajectoryRecord {
                samples,
                terminated: Termination::Stuck,
            });
        }
        if t >= t_end {
            return Ok(TrajectoryRecord {
                samples,
                terminated: Termination::ReachedTEnd,
            });
        }

        let grow = if err == 0.0 {
            5.0
        } else {
            (0.9 * libm::pow(tol / err, 0.2)).clamp(1.0, 5.0)
        };
        h = (h_try * grow).min(control.h_max);
    }
    Err(Error::InvalidConfig(
        "step budget exhausted before the trajectory terminated",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::{ConstantField, Interval};
    use crate::Error;

    struct Linear;

    impl VelocityField for Linear {
        fn velocity(&self, x: f64) -> Result<f64> {
            Ok(x)
        }
        fn domain(&self) -> Interval {
            Interval::REAL_LINE
        }
    }

    struct Node;

    impl VelocityField for Node {
        fn velocity(&self, x: f64) -> Result<f64> {
            if x >= 1.0 {
                Err(Error::ZeroDensity { rho: 0.0 })
            } else {
                Ok(1.0 / (1.0 - x))
            }
        }
        fn domain(&self) -> Interval {
            Interval::REAL_LINE
        }
    }

    #[test]
    fn constant_field_is_a_straight_line() {
        let field = ConstantField {
            velocity: 0.7,
            domain: Interval::REAL_LINE,
        };
        let rec = integrate_trajectory(&field, -1.0, 5.0, &StepControl::default()).unwrap();
        assert_eq!(rec.terminated, Termination::ReachedTEnd);
        for &(t, x) in &rec.samples {
            assert!((x - (-1.0 + 0.7 * t)).abs() < 1e-9);
        }
        assert!(rec.samples.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn zero_field_gets_stuck() {
        let field = ConstantField {
            velocity: 0.0,
            domain: Interval::REAL_LINE,
        };
        let rec = integrate_trajectory(&field, 0.4, 1e5, &StepControl::default()).unwrap();
        assert_eq!(rec.terminated, Termination::Stuck);
        assert!(rec.samples.iter().all(|&(_, x)| x == 0.4));
    }

    #[test]
    fn exponential_growth_matches_closed_form() {
        let rec = integrate_trajectory(&Linear, 1.0, 3.0, &StepControl::default()).unwrap();
        let (t, x) = rec.last();
        assert_eq!(t, 3.0);
        assert!((x - libm::exp(3.0)).abs() / libm::exp(3.0) < 1e-8);
    }

    #[test]
    fn stops_at_domain_edge() {
        let field = ConstantField {
            velocity: -2.0,
            domain: Interval::new(0.0, 10.0),
        };
        let rec = integrate_trajectory(&field, 5.0, 100.0, &StepControl::default()).unwrap();
        assert_eq!(rec.terminated, Termination::HitBoundary);
        let (t, x) = rec.last();
        assert_eq!(x, 0.0);
        assert!((t - 2.5).abs() < 1e-9);
    }

    #[test]
    fn running_into_a_node_is_an_error() {
        let err = integrate_trajectory(&Node, 0.0, 10.0, &StepControl::default()).unwrap_err();
        assert!(matches!(err, Error::SingularityEncountered { .. }));
    }

    #[test]
    fn rejects_start_outside_domain() {
        let field = ConstantField {
            velocity: 1.0,
            domain: Interval::new(0.0, 1.0),
        };
        assert!(integrate_trajectory(&field, -0.5, 1.0, &StepControl::default()).is_err());
    }
}
