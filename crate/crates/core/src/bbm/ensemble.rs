use alloc::vec;
use alloc::vec::Vec;

use super::model::{simulate_particle, BbmConfig, ParticleOutcome};
use crate::analytic::StepSolution;
use crate::Result;

/// Time-weighted occupancy over `[0, range]`, normalized to a density per
/// unit incident flux.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SojournHistogram {
    pub range: f64,
    pub density: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl SojournHistogram {
    pub fn bins(&self) -> usize {
        self.density.len()
    }

    pub fn width(&self) -> f64 {
        self.range / self.density.len() as f64
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = self.width();
        (bin as f64 * w, (bin + 1) as f64 * w)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BbmEstimates {
    pub n_particles: u64,
    /// Residence time on the right per incident particle.
    pub dwell_mean: f64,
    pub dwell_stderr: f64,
    pub entered_fraction: f64,
    pub entered_count: u64,
    /// Mean of the sampled turning points, `NaN` when nothing entered.
    pub mean_turning_point: f64,
    pub turning_point_stderr: f64,
    pub density_hist_plus: SojournHistogram,
    pub density_hist_minus: SojournHistogram,
}

#[derive(Debug, Clone)]
struct BinSums {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl BinSums {
    fn new(bins: usize) -> Self {
        Self {
            sum: vec![0.0; bins],
            sum_sq: vec![0.0; bins],
        }
    }

    /// Adds the time spent crossing `[from, to]` at constant `speed`.
    fn deposit_leg(&mut self, from: f64, to: f64, speed: f64, width: f64) {
        let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
        let bins = self.sum.len();
        let first = (lo / width) as usize;
        for b in first..bins {
            let edge_lo = b as f64 * width;
            if edge_lo >= hi {
                break;
            }
            let edge_hi = edge_lo + width;
            let dt = (hi.min(edge_hi) - lo.max(edge_lo)) / speed;
            if dt > 0.0 {
                self.sum[b] += dt;
                self.sum_sq[b] += dt * dt;
            }
        }
    }

    fn finish(&self, n: f64, flux: f64, width: f64, range: f64) -> SojournHistogram {
        let scale = flux / width;
        let density = self.sum.iter().map(|s| scale * s / n).collect();
        let stderr = self
            .sum
            .iter()
            .zip(&self.sum_sq)
            .map(|(s, s2)| scale * mean_stderr(*s, *s2, n))
            .collect();
        SojournHistogram { range, density, stderr }
    }
}

fn mean_stderr(sum: f64, sum_sq: f64, n: f64) -> f64 {
    if n < 2.0 {
        return 0.0;
    }
    let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
    libm::sqrt(var / n)
}

/// Folds particle outcomes into [`BbmEstimates`].
///
/// Outcomes must be pushed in particle-index order; the result then does not
/// depend on how the particles were computed.
#[derive(Debug, Clone)]
pub struct EnsembleAccumulator {
    flux: f64,
    speed: f64,
    width: f64,
    range: f64,
    count: u64,
    entered: u64,
    dwell_sum: f64,
    dwell_sum_sq: f64,
    tp_sum: f64,
    tp_sum_sq: f64,
    plus: BinSums,
    minus: BinSums,
}

impl EnsembleAccumulator {
    pub fn new(config: &BbmConfig, sol: &StepSolution) -> Self {
        Self {
            flux: sol.incident_flux(),
            speed: sol.right_speed(),
            width: config.bin_range / config.histogram_bins as f64,
            range: config.bin_range,
            count: 0,
            entered: 0,
            dwell_sum: 0.0,
            dwell_sum_sq: 0.0,
            tp_sum: 0.0,
            tp_sum_sq: 0.0,
            plus: BinSums::new(config.histogram_bins),
            minus: BinSums::new(config.histogram_bins),
        }
    }

    pub fn push(&mut self, outcome: &ParticleOutcome) {
        self.count += 1;
        self.dwell_sum += outcome.residence_right;
        self.dwell_sum_sq += outcome.residence_right * outcome.residence_right;
        if outcome.entered {
            self.entered += 1;
        }
        if let Some(x_star) = outcome.turning_point {
            self.tp_sum += x_star;
            self.tp_sum_sq += x_star * x_star;
            // out as σ = +1, back as σ = −1
            self.plus.deposit_leg(0.0, x_star, self.speed, self.width);
            self.minus.deposit_leg(x_star, 0.0, self.speed, self.width);
        }
    }

    pub fn finish(&self) -> BbmEstimates {
        let n = self.count as f64;
        let entered = self.entered as f64;
        let (mean_tp, tp_err) = if self.entered > 0 {
            (self.tp_sum / entered, mean_stderr(self.tp_sum, self.tp_sum_sq, entered))
        } else {
            (f64::NAN, f64::NAN)
        };
        BbmEstimates {
            n_particles: self.count,
            dwell_mean: self.dwell_sum / n,
            dwell_stderr: mean_stderr(self.dwell_sum, self.dwell_sum_sq, n),
            entered_fraction: entered / n,
            entered_count: self.entered,
            mean_turning_point: mean_tp,
            turning_point_stderr: tp_err,
            density_hist_plus: self.plus.finish(n, self.flux, self.width, self.range),
            density_hist_minus: self.minus.finish(n, self.flux, self.width, self.range),
        }
    }
}

/// Runs every particle in index order on the calling thread.
pub fn run_ensemble(config: &BbmConfig) -> Result<BbmEstimates> {
    let sol = config.validate()?;
    let mut acc = EnsembleAccumulator::new(config, &sol);
    for index in 0..config.n_particles {
        acc.push(&simulate_particle(config, &sol, index, None));
    }
    Ok(acc.finish())
}
