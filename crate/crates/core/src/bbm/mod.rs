//! Bidirectional Bohmian model of the reflecting step.
//!
//! Every particle carries a direction label `σ = ±1`. In the evanescent
//! region (`x ≥ 0`) it moves at constant speed `v_R` and a right-mover turns
//! around at an exponentially distributed point `x*` with rate `2κ`. In the
//! left region the two direction fluxes are `±j_L` with `j_L = ħk/m`, so the
//! local speed is `2 j_L / ρ_L(x)`. A right-mover arriving at the step enters
//! with probability `a` and is reflected otherwise; left-movers coming back
//! out cross the boundary freely.
//!
//! The dynamics are integrable, so the simulation is event driven: no time
//! stepping anywhere.

mod ensemble;
mod model;
mod rng;

pub use self::ensemble::{run_ensemble, BbmEstimates, EnsembleAccumulator, SojournHistogram};
pub use self::model::{
    bbm_dwell_analytic, entry_probability, left_position_after, left_time_of_flight, sample_turning_point,
    simulate_particle, turning_point_from_uniform, BbmConfig, Direction, ParticleOutcome, ParticleState, Region,
};
pub use self::rng::ParticleStream;
