use evanescent_core::bbm::{simulate_particle, BbmConfig, BbmEstimates, EnsembleAccumulator};
use evanescent_core::guidance::TrajectoryRecord;
use rayon::prelude::*;

use crate::error::{CliError, Result};

// Outcomes are computed a chunk at a time and folded in index order, so the
// estimates are bit-identical for any worker count.
const CHUNK: u64 = 1 << 16;

/// Interior samples recorded per trajectory leg.
const LEG_SAMPLES: usize = 8;

pub struct EnsembleRun {
    pub estimates: BbmEstimates,
    /// `(particle index, trajectory)` for the first `record_first` particles.
    pub trajectories: Vec<(u64, TrajectoryRecord)>,
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Usage(format!("--workers: {e}")))
}

/// Runs the ensemble on `workers` threads (all cores when `None`).
pub fn run_ensemble_parallel(config: &BbmConfig, workers: Option<usize>, record_first: u64) -> Result<EnsembleRun> {
    let sol = config.validate()?;
    let pool = pool(workers)?;
    let mut acc = EnsembleAccumulator::new(config, &sol);
    let mut trajectories = Vec::new();

    let mut start = 0;
    while start < config.n_particles {
        let end = (start + CHUNK).min(config.n_particles);
        let outcomes: Vec<_> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| simulate_particle(config, &sol, i, (i < record_first).then_some(LEG_SAMPLES)))
                .collect()
        });
        for (i, mut outcome) in (start..).zip(outcomes) {
            acc.push(&outcome);
            if let Some(traj) = outcome.trajectory.take() {
                trajectories.push((i, traj));
            }
        }
        start = end;
    }
    Ok(EnsembleRun {
        estimates: acc.finish(),
        trajectories,
    })
}
