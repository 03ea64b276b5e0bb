use alloc::vec::Vec;

use crate::bbm::ParticleStream;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitOptions {
    /// Largest `Jx/v̂` allowed inside the fit window.
    pub small_x_bound: f64,
    /// Samples with `p_a` above this are discarded before fitting.
    pub population_cutoff: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            small_x_bound: 0.1,
            population_cutoff: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub v_hat: f64,
    /// `J/v̂`
    pub j_over_v: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    /// Largest `Jx/v̂` in the final window.
    pub x_max_over_scale: f64,
}

pub const MAX_REFITS: usize = 3;

/// Least-squares slope of `p = s·x²` through the origin.
fn quadratic_slope(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    if samples.len() < 3 {
        return Err(Error::DegenerateFit("need at least three samples with x > 0"));
    }
    let x_first = samples[0].0;
    if samples.iter().all(|&(x, _)| x == x_first) {
        return Err(Error::DegenerateFit("all samples share one position"));
    }
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, p) in samples {
        let q = x * x;
        sxx += q * q;
        sxy += q * p;
    }
    let slope = sxy / sxx;
    if !(slope > 0.0) || !slope.is_finite() {
        return Err(Error::DegenerateFit("non-positive quadratic coefficient"));
    }
    let ss: f64 = samples
        .iter()
        .map(|&(x, p)| {
            let r = p - slope * x * x;
            r * r
        })
        .sum();
    Ok((slope, libm::sqrt(ss / samples.len() as f64)))
}

/// Extracts `v` from the small-`x` growth `p_a ≈ (Jx/v)²` at known coupling `J`.
///
/// While the window reaches beyond `Jx/v̂ = bound`, it is trimmed to the
/// bound and refitted, at most [`MAX_REFITS`] times; a window that still
/// violates the bound is rejected.
pub fn fit_speed(samples: &[(f64, f64)], j: f64, options: &FitOptions) -> Result<FitResult> {
    if !(j > 0.0) {
        return Err(Error::DegenerateFit("coupling must be positive"));
    }
    let mut window: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(x, p)| x > 0.0 && p <= options.population_cutoff)
        .collect();
    window.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut refits = 0;
    loop {
        let (slope, rms) = quadratic_slope(&window)?;
        let j_over_v = libm::sqrt(slope);
        let v_hat = j / j_over_v;
        let x_max = window.last().map_or(0.0, |s| s.0);
        let scaled = x_max * j_over_v;
        if scaled <= options.small_x_bound {
            return Ok(FitResult {
                v_hat,
                j_over_v,
                rms_residual: rms,
                n_points: window.len(),
                x_max_over_scale: scaled,
            });
        }
        if refits == MAX_REFITS {
            return Err(Error::FitWindowTooWide {
                max_scaled: scaled,
                bound: options.small_x_bound,
            });
        }
        refits += 1;
        let limit = options.small_x_bound / j_over_v;
        window.retain(|&(x, _)| x <= limit);
    }
}

/// Number of successes in `trials` Bernoulli draws with probability `p`.
pub fn binomial_count(p: f64, trials: u64, stream: &mut ParticleStream) -> u64 {
    (0..trials).filter(|_| stream.uniform() < p).count() as u64
}

/// Samples `population(x)` at each position, optionally replacing the exact
/// value by a binomial estimate from `counts` detections (independent stream
/// per position).
pub fn synthetic_population<F: Fn(f64) -> f64>(
    xs: &[f64],
    population: F,
    counts: Option<u64>,
    seed: u64,
) -> Vec<(f64, f64)> {
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = population(x);
            let p = match counts {
                Some(n) if n > 0 => {
                    let mut stream = ParticleStream::new(seed, i as u64);
                    binomial_count(p, n, &mut stream) as f64 / n as f64
                }
                _ => p,
            };
            (x, p)
        })
        .collect()
}
