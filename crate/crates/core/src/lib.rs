//! Stationary solutions and particle-speed models for evanescent regimes.
//!
//! The crate covers two systems:
//!
//! * a pair of coupled waveguides behind a potential step, where the
//!   population transferred into the auxiliary guide acts as a clock and
//!   fixes a characteristic speed `v = sqrt(2|Δ|/m)`;
//! * a single reflecting step `V(x) = V0 θ(x)` with `E < V0`, used to compare
//!   the standard guiding equation against a bidirectional trajectory model
//!   whose right-region particles move at `v_R` and turn around at
//!   exponentially distributed points.
//!
//! Everything here is `no_std` (with `alloc`). File formats, the command line
//! and parallel ensemble execution live in the companion `evanescent-cli`
//! crate.
//!
//! Modules:
//!
//! * [`analytic`] closed-form stationary solutions and dilations,
//! * [`guidance`] the standard guiding equation and trajectory integration,
//! * [`bbm`] the event-driven bidirectional Monte Carlo model,
//! * [`analysis`] dwell times, speed extraction and invariance checks.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod analytic;
pub mod bbm;
mod error;
pub mod guidance;
mod params;
mod quad;

pub use num_complex::Complex64;

pub use self::error::{Error, Result};
pub use self::params::PhysicalParams;
