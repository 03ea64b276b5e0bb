//! Standard Bohmian guidance: velocity fields from probability currents and
//! their integration into trajectories.

mod integrate;
mod standard;

pub use self::integrate::{integrate_trajectory, StepControl, Termination, TrajectoryRecord};
pub use self::standard::{
    modified_velocity, probability_current, standard_velocity, ConstantField, Interval, ModifiedGuidance, PlaneWave,
    StandardGuidance, StationaryState, VelocityField, DEFAULT_NODE_EPSILON,
};
