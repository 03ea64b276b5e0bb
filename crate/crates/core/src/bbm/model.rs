use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_core::RngCore;

use super::ParticleStream;
use crate::analytic::StepSolution;
use crate::guidance::{Termination, TrajectoryRecord};
use crate::{Error, PhysicalParams, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BbmConfig {
    pub params: PhysicalParams,
    pub n_particles: u64,
    pub seed: u64,
    /// Injection point is `−left_extent`.
    pub left_extent: f64,
    pub histogram_bins: usize,
    /// Histograms cover `[0, bin_range]`.
    pub bin_range: f64,
}

impl BbmConfig {
    pub const DEFAULT_SEED: u64 = 20_250_707;
    pub const DEFAULT_PARTICLES: u64 = 100_000;
    pub const DEFAULT_BINS: usize = 200;

    /// Defaults: one density period `π/k` of left region and 200 bins over
    /// `[0, 5/(2κ)]`.
    pub fn new(params: PhysicalParams) -> Result<Self> {
        let sol = StepSolution::new(&params)?;
        Ok(Self {
            params,
            n_particles: Self::DEFAULT_PARTICLES,
            seed: Self::DEFAULT_SEED,
            left_extent: PI / sol.k(),
            histogram_bins: Self::DEFAULT_BINS,
            bin_range: 2.5 / sol.kappa(),
        })
    }

    pub fn validate(&self) -> Result<StepSolution> {
        if self.n_particles == 0 {
            return Err(Error::InvalidConfig("n_particles must be at least 1"));
        }
        if !(self.left_extent.is_finite() && self.left_extent > 0.0) {
            return Err(Error::InvalidConfig("left extent must be positive"));
        }
        if self.histogram_bins == 0 {
            return Err(Error::InvalidConfig("histogram needs at least one bin"));
        }
        if !(self.bin_range.is_finite() && self.bin_range > 0.0) {
            return Err(Error::InvalidConfig("histogram range must be positive"));
        }
        StepSolution::new(&self.params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    /// The label `σ`.
    pub fn sigma(self) -> i8 {
        match self {
            Direction::Right => 1,
            Direction::Left => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `x ≤ 0`
    Left,
    /// `x ≥ 0`, evanescent
    Right,
}

/// Kinematic state between events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub x: f64,
    pub sigma: Direction,
    pub region: Region,
    /// Set only for right-movers in the right region.
    pub turning_point: Option<f64>,
    pub clock: f64,
    pub residence_right: f64,
}

impl ParticleState {
    fn injected(left_extent: f64) -> Self {
        Self {
            x: -left_extent,
            sigma: Direction::Right,
            region: Region::Left,
            turning_point: None,
            clock: 0.0,
            residence_right: 0.0,
        }
    }

    pub fn is_consistent(&self) -> bool {
        let region_ok = match self.region {
            Region::Left => self.x <= 0.0,
            Region::Right => self.x >= 0.0,
        };
        let tp_ok = self.turning_point.is_some() == (self.region == Region::Right && self.sigma == Direction::Right);
        region_ok && tp_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleOutcome {
    pub entered: bool,
    pub residence_right: f64,
    pub turning_point: Option<f64>,
    /// Time at which the particle left through `−L`.
    pub exit_time: f64,
    pub trajectory: Option<TrajectoryRecord>,
}

/// Inverse-CDF map of a uniform `u ∈ (0, 1]` onto the turning-point law
/// `p(x*) = 2κ e^{−2κx*}`.
pub fn turning_point_from_uniform(kappa: f64, u: f64) -> f64 {
    -libm::log(u) / (2.0 * kappa)
}

pub fn sample_turning_point<R: RngCore + ?Sized>(kappa: f64, rng: &mut R) -> f64 {
    // 53-bit uniform on (0, 1]
    let u = 1.0 - (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    turning_point_from_uniform(kappa, u)
}

/// Entry probability `a = |t|² v_R / (2 j_in)`, equal to `2kκ/(k² + κ²)`.
pub fn entry_probability(sol: &StepSolution) -> f64 {
    sol.transmission_weight() * sol.right_speed() / (2.0 * sol.incident_flux())
}

/// Residence time in the evanescent region per incident particle, `a/(κ v_R)`.
pub fn bbm_dwell_analytic(sol: &StepSolution) -> f64 {
    entry_probability(sol) / (sol.kappa() * sol.right_speed())
}

/// Time to move between two left-region points at the local speed
/// `2 j_L / ρ_L(x)`: `|∫ ρ_L dx| / (2 j_L)`. Finite across density nodes.
pub fn left_time_of_flight(sol: &StepSolution, x_from: f64, x_to: f64) -> f64 {
    let span = sol.left_density_integral(x_to) - sol.left_density_integral(x_from);
    libm::fabs(span) / (2.0 * sol.incident_flux())
}

/// Position reached after moving for `dt` from `x_from` in `direction`
/// through the left region; inverts [`left_time_of_flight`].
pub fn left_position_after(sol: &StepSolution, x_from: f64, dt: f64, direction: Direction) -> f64 {
    let target = sol.left_density_integral(x_from) + f64::from(direction.sigma()) * 2.0 * sol.incident_flux() * dt;
    // |F(x) − 2x| ≤ |r|/k = 1/k brackets the root.
    let slack = 1.0 / sol.k();
    let (mut lo, mut hi) = (0.5 * (target - slack), 0.5 * (target + slack));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sol.left_density_integral(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

struct Recorder {
    samples: Vec<(f64, f64)>,
    interior: usize,
}

impl Recorder {
    fn push(&mut self, t: f64, x: f64) {
        match self.samples.last() {
            Some(&(t_last, _)) if t <= t_last => {}
            _ => self.samples.push((t, x)),
        }
    }

    fn left_leg(&mut self, sol: &StepSolution, from: &ParticleState, dt: f64) {
        for i in 1..=self.interior {
            let tau = dt * i as f64 / (self.interior + 1) as f64;
            self.push(from.clock + tau, left_position_after(sol, from.x, tau, from.sigma));
        }
    }

    fn right_leg(&mut self, from: &ParticleState, to: f64, dt: f64) {
        for i in 1..=self.interior {
            let frac = i as f64 / (self.interior + 1) as f64;
            self.push(from.clock + frac * dt, from.x + frac * (to - from.x));
        }
    }
}

/// Full lifecycle of particle `index`: injected as a right-mover at `−L`,
/// decides at the step, possibly visits the evanescent region, and ends when
/// it leaves through `−L` as a left-mover.
///
/// With `record = Some(n)` the event trajectory is kept, with `n` extra
/// samples inside every leg.
pub fn simulate_particle(config: &BbmConfig, sol: &StepSolution, index: u64, record: Option<usize>) -> ParticleOutcome {
    let mut rng = ParticleStream::new(config.seed, index);
    let a = entry_probability(sol);
    let v_r = sol.right_speed();
    let left_end = -config.left_extent;

    let mut state = ParticleState::injected(config.left_extent);
    let mut recorder = record.map(|interior| Recorder {
        samples: Vec::new(),
        interior,
    });
    if let Some(rec) = recorder.as_mut() {
        rec.push(state.clock, state.x);
    }
    let mut entered = false;
    let mut first_turning_point = None;

    loop {
        debug_assert!(state.is_consistent());
        match (state.region, state.sigma) {
            (Region::Left, Direction::Right) => {
                let dt = left_time_of_flight(sol, state.x, 0.0);
                if let Some(rec) = recorder.as_mut() {
                    rec.left_leg(sol, &state, dt);
                }
                state.clock += dt;
                state.x = 0.0;
                if rng.uniform() < a {
                    let x_star = sample_turning_point(sol.kappa(), &mut rng);
                    entered = true;
                    first_turning_point.get_or_insert(x_star);
                    state.region = Region::Right;
                    state.turning_point = Some(x_star);
                } else {
                    state.sigma = Direction::Left;
                }
            }
            (Region::Right, Direction::Right) => {
                let x_star = state.turning_point.take().expect("right-mover carries a turning point");
                let dt = (x_star - state.x) / v_r;
                if let Some(rec) = recorder.as_mut() {
                    rec.push(state.clock, state.x);
                    rec.right_leg(&state, x_star, dt);
                }
                state.clock += dt;
                state.residence_right += dt;
                state.x = x_star;
                state.sigma = Direction::Left;
            }
            (Region::Right, Direction::Left) => {
                let dt = state.x / v_r;
                if let Some(rec) = recorder.as_mut() {
                    rec.push(state.clock, state.x);
                    rec.right_leg(&state, 0.0, dt);
                }
                state.clock += dt;
                state.residence_right += dt;
                state.x = 0.0;
                state.region = Region::Left;
            }
            (Region::Left, Direction::Left) => {
                let dt = left_time_of_flight(sol, state.x, left_end);
                if let Some(rec) = recorder.as_mut() {
                    rec.push(state.clock, state.x);
                    rec.left_leg(sol, &state, dt);
                }
                state.clock += dt;
                state.x = left_end;
                if let Some(rec) = recorder.as_mut() {
                    rec.push(state.clock, state.x);
                }
                break;
            }
        }
    }

    ParticleOutcome {
        entered,
        residence_right: state.residence_right,
        turning_point: first_turning_point,
        exit_time: state.clock,
        trajectory: recorder.map(|rec| TrajectoryRecord {
            samples: rec.samples,
            terminated: Termination::HitBoundary,
        }),
    }
}
