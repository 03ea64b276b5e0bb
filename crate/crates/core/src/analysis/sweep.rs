use alloc::vec::Vec;

use crate::analytic::StepSolution;
use crate::bbm::{bbm_dwell_analytic, entry_probability, run_ensemble, BbmConfig, BbmEstimates};
use crate::{Error, PhysicalParams, Result};

use super::qm_dwell_time;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum AxisScale {
    Linear,
    Log,
}

/// `count` points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: AxisScale,
}

impl Axis {
    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            stop: value,
            count: 1,
            scale: AxisScale::Linear,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => alloc::vec![self.start],
            n => (0..n)
                .map(|i| {
                    let f = i as f64 / (n - 1) as f64;
                    match self.scale {
                        AxisScale::Linear => self.start + f * (self.stop - self.start),
                        AxisScale::Log => {
                            let (a, b) = (libm::log(self.start), libm::log(self.stop));
                            libm::exp(a + f * (b - a))
                        }
                    }
                })
                .collect(),
        }
    }
}

/// Grid over step height `V0` (outer) and energy ratio `E/V0` (inner).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub m: f64,
    pub hbar: f64,
    pub v0: Axis,
    pub e_over_v0: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonteCarloOptions {
    pub n_particles: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepRow {
    pub v0: f64,
    pub e_over_v0: f64,
    pub tau_qm: f64,
    pub tau_bbm: f64,
    pub a: f64,
    pub v_r: f64,
    pub monte_carlo: Option<BbmEstimates>,
    pub error: Option<Error>,
}

impl SweepRow {
    fn failed(v0: f64, e_over_v0: f64, error: Error) -> Self {
        Self {
            v0,
            e_over_v0,
            tau_qm: f64::NAN,
            tau_bbm: f64::NAN,
            a: f64::NAN,
            v_r: f64::NAN,
            monte_carlo: None,
            error: Some(error),
        }
    }
}

fn evaluate(grid: &GridSpec, v0: f64, ratio: f64, mc: Option<&MonteCarloOptions>) -> Result<SweepRow> {
    let params = PhysicalParams::new(grid.m, grid.hbar, ratio * v0, v0, 0.0)?;
    let sol = StepSolution::new(&params)?;
    let monte_carlo = match mc {
        Some(opts) => {
            let mut cfg = BbmConfig::new(params)?;
            cfg.n_particles = opts.n_particles;
            cfg.seed = opts.seed;
            Some(run_ensemble(&cfg)?)
        }
        None => None,
    };
    Ok(SweepRow {
        v0,
        e_over_v0: ratio,
        tau_qm: qm_dwell_time(&sol).closed_form,
        tau_bbm: bbm_dwell_analytic(&sol),
        a: entry_probability(&sol),
        v_r: sol.right_speed(),
        monte_carlo,
        error: None,
    })
}

/// Evaluates every grid point in order. A failing point produces a row with
/// `error` set and the sweep carries on.
pub fn sweep(grid: &GridSpec, mc: Option<&MonteCarloOptions>) -> Vec<SweepRow> {
    let ratios = grid.e_over_v0.values();
    let mut rows = Vec::new();
    for v0 in grid.v0.values() {
        for &ratio in &ratios {
            rows.push(evaluate(grid, v0, ratio, mc).unwrap_or_else(|e| SweepRow::failed(v0, ratio, e)));
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(ratios: Axis) -> GridSpec {
        GridSpec {
            m: 1.0,
            hbar: 1.0,
            v0: Axis::single(1.0),
            e_over_v0: ratios,
        }
    }

    #[test]
    fn single_symmetric_point() {
        let rows = sweep(&grid(Axis::single(0.5)), None);
        assert_eq!(rows.len(), 1);
        assert_relative_eq!(rows[0].tau_qm, 1.0, epsilon = 1e-15);
        assert_relative_eq!(rows[0].tau_bbm, 1.0, epsilon = 1e-15);
        assert_relative_eq!(rows[0].a, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_holds_across_ratios() {
        let axis = Axis {
            start: 0.1,
            stop: 0.9,
            count: 9,
            scale: AxisScale::Linear,
        };
        for row in sweep(&grid(axis), None) {
            assert!(row.error.is_none());
            assert!((row.tau_qm - row.tau_bbm).abs() <= 1e-12 * row.tau_qm);
        }
    }

    #[test]
    fn empty_grid_gives_no_rows() {
        let axis = Axis {
            start: 0.1,
            stop: 0.9,
            count: 0,
            scale: AxisScale::Linear,
        };
        assert!(sweep(&grid(axis), None).is_empty());
    }

    #[test]
    fn failures_are_recorded_per_row() {
        let axis = Axis {
            start: 0.5,
            stop: 1.5,
            count: 3,
            scale: AxisScale::Linear,
        };
        let rows = sweep(&grid(axis), None);
        assert_eq!(rows.len(), 3);
        assert!(rows[0].error.is_none());
        assert!(matches!(rows[1].error, Some(Error::InvalidRegime { .. })));
        assert!(rows[2].error.is_some());
    }

    #[test]
    fn log_axis_endpoints() {
        let axis = Axis {
            start: 0.01,
            stop: 0.99,
            count: 50,
            scale: AxisScale::Log,
        };
        let v = axis.values();
        assert_eq!(v.len(), 50);
        assert_relative_eq!(v[0], 0.01, max_relative = 1e-14);
        assert_relative_eq!(v[49], 0.99, max_relative = 1e-14);
    }

    #[test]
    fn monte_carlo_rows() {
        let mc = MonteCarloOptions {
            n_particles: 2000,
            seed: 3,
        };
        let rows = sweep(&grid(Axis::single(0.5)), Some(&mc));
        let est = rows[0].monte_carlo.as_ref().unwrap();
        assert_eq!(est.n_particles, 2000);
    }
}
