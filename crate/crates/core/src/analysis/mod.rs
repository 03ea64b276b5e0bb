//! Derived quantities and verification procedures.

mod dwell;
mod fit;
mod invariance;
mod sweep;

pub use self::dwell::{qm_dwell_time, DwellTime};
pub use self::fit::{binomial_count, fit_speed, synthetic_population, FitOptions, FitResult, MAX_REFITS};
pub use self::invariance::{invariance_check, InvarianceReport, INVARIANCE_TOLERANCE};
pub use self::sweep::{sweep, Axis, AxisScale, GridSpec, MonteCarloOptions, SweepRow};
