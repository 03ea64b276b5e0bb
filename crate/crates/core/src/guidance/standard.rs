use num_complex::Complex64;

use crate::analytic::{StepSolution, WaveguideSolution};
use crate::{Error, PhysicalParams, Result};

/// Densities below this are treated as nodes of the wavefunction.
pub const DEFAULT_NODE_EPSILON: f64 = 1e-14;

/// `j = (ħ/m) Im(ψ* ψ′)`.
pub fn probability_current(psi: Complex64, dpsi: Complex64, params: &PhysicalParams) -> f64 {
    params.hbar() / params.m() * (psi.conj() * dpsi).im
}

/// The guiding equation `v = j/ρ`.
pub fn standard_velocity(j: f64, rho: f64) -> Result<f64> {
    modified_velocity(j, 0.0, rho)
}

/// Guidance with a divergence-free shifted flux `j + k_add`. In one stationary
/// dimension the shift has to be a constant.
pub fn modified_velocity(j: f64, k_add: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::ZeroDensity { rho });
    }
    Ok((j + k_add) / rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// A stationary state with a density and a total probability current.
pub trait StationaryState {
    fn params(&self) -> &PhysicalParams;
    fn density(&self, x: f64) -> f64;
    fn current(&self, x: f64) -> f64;
    fn domain(&self) -> Interval;
}

impl StationaryState for StepSolution {
    fn params(&self) -> &PhysicalParams {
        StepSolution::params(self)
    }

    fn density(&self, x: f64) -> f64 {
        StepSolution::density(self, x)
    }

    fn current(&self, x: f64) -> f64 {
        probability_current(self.psi(x), self.dpsi(x), StepSolution::params(self))
    }

    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }
}

/// Both guides together: densities and currents are summed.
impl StationaryState for WaveguideSolution {
    fn params(&self) -> &PhysicalParams {
        WaveguideSolution::params(self)
    }

    fn density(&self, x: f64) -> f64 {
        let (m, a) = self.fields(x);
        m.norm_sqr() + a.norm_sqr()
    }

    fn current(&self, x: f64) -> f64 {
        let (m, a) = self.fields(x);
        let (dm, da) = self.field_derivatives(x);
        let p = WaveguideSolution::params(self);
        probability_current(m, dm, p) + probability_current(a, da, p)
    }

    fn domain(&self) -> Interval {
        Interval::new(0.0, f64::INFINITY)
    }
}

/// `ψ = A e^{ikx}` with `k = sqrt(2mE)/ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    params: PhysicalParams,
    k: f64,
    amplitude: f64,
}

impl PlaneWave {
    pub fn new(params: &PhysicalParams, amplitude: f64) -> Self {
        let k = libm::sqrt(2.0 * params.m() * params.e()) / params.hbar();
        Self {
            params: *params,
            k,
            amplitude,
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn psi(&self, x: f64) -> Complex64 {
        Complex64::new(0.0, self.k * x).exp() * self.amplitude
    }

    pub fn dpsi(&self, x: f64) -> Complex64 {
        Complex64::new(0.0, self.k) * self.psi(x)
    }
}

impl StationaryState for PlaneWave {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn density(&self, _x: f64) -> f64 {
        self.amplitude * self.amplitude
    }

    fn current(&self, x: f64) -> f64 {
        probability_current(self.psi(x), self.dpsi(x), &self.params)
    }

    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }
}

/// A one-dimensional, time-independent velocity field `x ↦ v(x)`.
pub trait VelocityField {
    /// Velocity at `x`, or [`Error::ZeroDensity`] at a singular point.
    fn velocity(&self, x: f64) -> Result<f64>;

    fn domain(&self) -> Interval;
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantField {
    pub velocity: f64,
    pub domain: Interval,
}

impl VelocityField for ConstantField {
    fn velocity(&self, _x: f64) -> Result<f64> {
        Ok(self.velocity)
    }

    fn domain(&self) -> Interval {
        self.domain
    }
}

/// `v = j/ρ` over a stationary state.
#[derive(Debug, Clone, Copy)]
pub struct StandardGuidance<'a, S> {
    state: &'a S,
    node_epsilon: f64,
}

impl<'a, S: StationaryState> StandardGuidance<'a, S> {
    pub fn new(state: &'a S) -> Self {
        Self {
            state,
            node_epsilon: DEFAULT_NODE_EPSILON,
        }
    }

    pub fn with_node_epsilon(mut self, node_epsilon: f64) -> Self {
        self.node_epsilon = node_epsilon;
        self
    }
}

impl<S: StationaryState> VelocityField for StandardGuidance<'_, S> {
    fn velocity(&self, x: f64) -> Result<f64> {
        let rho = self.state.density(x);
        if rho < self.node_epsilon {
            return Err(Error::ZeroDensity { rho });
        }
        standard_velocity(self.state.current(x), rho)
    }

    fn domain(&self) -> Interval {
        self.state.domain()
    }
}

/// `v′ = (j + k_add)/ρ` over a stationary state.
#[derive(Debug, Clone, Copy)]
pub struct ModifiedGuidance<'a, S> {
    state: &'a S,
    k_add: f64,
    node_epsilon: f64,
}

impl<'a, S: StationaryState> ModifiedGuidance<'a, S> {
    pub fn new(state: &'a S, k_add: f64) -> Self {
        Self {
            state,
            k_add,
            node_epsilon: DEFAULT_NODE_EPSILON,
        }
    }
}

impl<S: StationaryState> VelocityField for ModifiedGuidance<'_, S> {
    fn velocity(&self, x: f64) -> Result<f64> {
        let rho = self.state.density(x);
        if rho < self.node_epsilon {
            return Err(Error::ZeroDensity { rho });
        }
        modified_velocity(self.state.current(x), self.k_add, rho)
    }

    fn domain(&self) -> Interval {
        self.state.domain()
    }
}
