use num_complex::Complex64;

use crate::{Error, PhysicalParams, Result};

/// Stationary scattering state of a reflecting step `V(x) = V0 θ(x)`, `0 < E < V0`.
///
/// `ψ(x) = e^{ikx} + r e^{−ikx}` on the left, `ψ(x) = t e^{−κx}` on the
/// right, with the incident wave at unit amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSolution {
    params: PhysicalParams,
    k: f64,
    kappa: f64,
    r: Complex64,
    t: Complex64,
}

impl StepSolution {
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        let (e, v0) = (params.e(), params.v0());
        if params.j() != 0.0 || e >= v0 {
            return Err(Error::InvalidRegime { e, v0, j: params.j() });
        }
        let (m, hbar) = (params.m(), params.hbar());
        let k = libm::sqrt(2.0 * m * e) / hbar;
        let kappa = libm::sqrt(2.0 * m * (v0 - e)) / hbar;
        let denom = Complex64::new(k, kappa);
        let r = Complex64::new(k, -kappa) / denom;
        let t = Complex64::new(2.0 * k, 0.0) / denom;
        Ok(Self {
            params: *params,
            k,
            kappa,
            r,
            t,
        })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    /// `|t|² = 4k² / (k² + κ²)`.
    pub fn transmission_weight(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// Incident flux of the unit-amplitude plane wave, `j_in = ħk/m`.
    pub fn incident_flux(&self) -> f64 {
        self.params.hbar() * self.k / self.params.m()
    }

    /// Constant speed in the evanescent region, `v_R = sqrt(2(V0 − E)/m)`.
    pub fn right_speed(&self) -> f64 {
        libm::sqrt(2.0 * (self.params.v0() - self.params.e()) / self.params.m())
    }

    pub fn psi(&self, x: f64) -> Complex64 {
        if x < 0.0 {
            let forward = Complex64::new(0.0, self.k * x).exp();
            forward + self.r / forward
        } else {
            self.t * libm::exp(-self.kappa * x)
        }
    }

    pub fn dpsi(&self, x: f64) -> Complex64 {
        if x < 0.0 {
            let forward = Complex64::new(0.0, self.k * x).exp();
            Complex64::new(0.0, self.k) * (forward - self.r / forward)
        } else {
            self.t * (-self.kappa * libm::exp(-self.kappa * x))
        }
    }

    /// Left-region density `|e^{ikx} + r e^{−ikx}|² = 2[1 + Re(r) cos 2kx + Im(r) sin 2kx]`.
    pub fn left_density(&self, x: f64) -> f64 {
        let phase = 2.0 * self.k * x;
        2.0 * (1.0 + self.r.re * libm::cos(phase) + self.r.im * libm::sin(phase))
    }

    /// Antiderivative of [`left_density`](Self::left_density).
    pub fn left_density_integral(&self, x: f64) -> f64 {
        let phase = 2.0 * self.k * x;
        2.0 * x + (self.r.re * libm::sin(phase) - self.r.im * libm::cos(phase)) / self.k
    }

    /// Particle density on either side of the step.
    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.left_density(x)
        } else {
            self.transmission_weight() * libm::exp(-2.0 * self.kappa * x)
        }
    }
}
