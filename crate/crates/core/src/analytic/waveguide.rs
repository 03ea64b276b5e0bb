use num_complex::Complex64;

use super::population_ratio;
use crate::{Error, PhysicalParams, Result};

/// Default guard for `|Δ + ħJ|`, natural units.
pub const DEFAULT_DEGENERACY_EPSILON: f64 = 1e-12;

/// Sign of `Δ`: oscillatory (`Δ > 0`) or saturating (`Δ < 0`) population transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Regime {
    Propagating,
    Evanescent,
}

impl Regime {
    pub fn of(delta: f64) -> Self {
        if delta >= 0.0 {
            Regime::Propagating
        } else {
            Regime::Evanescent
        }
    }
}

/// Stationary solution of the coupled main/auxiliary waveguide pair for `x ≥ 0`.
///
/// For `Δ ≥ ħJ` both `k1` and `k2` are real, for `Δ ≤ −ħJ` both are purely
/// imaginary. In between, `Δ² − (ħJ)²` is negative and the principal square
/// root makes `k2` fully complex; `p_a` then interpolates between the
/// oscillating and the saturating form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideSolution {
    params: PhysicalParams,
    k0: f64,
    k1: Complex64,
    k2: Complex64,
}

impl WaveguideSolution {
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        Self::with_epsilon(params, DEFAULT_DEGENERACY_EPSILON)
    }

    pub fn with_epsilon(params: &PhysicalParams, epsilon: f64) -> Result<Self> {
        let (m, hbar) = (params.m(), params.hbar());
        let delta = params.delta();
        let hj = hbar * params.j();
        let shifted = delta + hj;
        if libm::fabs(shifted) < epsilon {
            return Err(Error::DegenerateParameter {
                magnitude: libm::fabs(shifted),
                epsilon,
            });
        }
        let k0 = libm::sqrt(2.0 * m * params.e()) / hbar;
        // (Δ − ħJ)(Δ + ħJ) keeps the imaginary part at +0 when negative,
        // so the principal root lands on +i.
        let disc = Complex64::new((delta - hj) * shifted, 0.0).sqrt();
        let sign = if shifted > 0.0 { 1.0 } else { -1.0 };
        let k2 = (Complex64::new(delta, 0.0) + disc * sign).sqrt() * (libm::sqrt(m) / hbar);
        if k2.norm() == 0.0 {
            return Err(Error::DegenerateParameter {
                magnitude: libm::fabs(shifted),
                epsilon,
            });
        }
        let k1 = Complex64::new(m * params.j() / hbar, 0.0) / k2;
        Ok(Self {
            params: *params,
            k0,
            k1,
            k2,
        })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn k1(&self) -> Complex64 {
        self.k1
    }

    pub fn k2(&self) -> Complex64 {
        self.k2
    }

    /// Prefactor `2k0 / (k0 + k2)` shared by both fields.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(2.0 * self.k0, 0.0) / (self.k2 + self.k0)
    }

    /// `(ψ_m(x), ψ_a(x))` for `x ≥ 0`.
    pub fn fields(&self, x: f64) -> (Complex64, Complex64) {
        let phase = (Complex64::i() * self.k2 * x).exp();
        let arg = self.k1 * x;
        let amp = self.amplitude();
        let psi_m = amp * arg.cos() * phase;
        let psi_a = -Complex64::i() * amp * arg.sin() * phase;
        (psi_m, psi_a)
    }

    /// Analytic `(ψ_m′(x), ψ_a′(x))`.
    pub fn field_derivatives(&self, x: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let phase = (i * self.k2 * x).exp();
        let arg = self.k1 * x;
        let (s, c) = (arg.sin(), arg.cos());
        let amp = self.amplitude();
        let dm = amp * phase * (-self.k1 * s + i * self.k2 * c);
        let da = -i * amp * phase * (self.k1 * c + i * self.k2 * s);
        (dm, da)
    }

    /// Fraction of the density found in the auxiliary guide at `x`.
    pub fn relative_population(&self, x: f64) -> Result<f64> {
        let arg = self.k1 * x;
        let p = population_ratio(arg.re, arg.im);
        if !p.is_finite() {
            return Err(Error::ZeroDensity { rho: 0.0 });
        }
        Ok(p)
    }
}

/// Large-`|Δ|` population transfer, a function of `Jx/v` only.
pub fn relative_population_asymptotic(j: f64, v: f64, x: f64, regime: Regime) -> f64 {
    let u = j * x / v;
    match regime {
        Regime::Propagating => {
            let s = libm::sin(u);
            s * s
        }
        Regime::Evanescent => population_ratio(0.0, u),
    }
}

/// `v = sqrt(2|Δ|/m)`; a speed, identical for `±Δ`.
pub fn characteristic_speed(params: &PhysicalParams) -> f64 {
    libm::sqrt(2.0 * libm::fabs(params.delta()) / params.m())
}
