use crate::{Error, Result};

/// Physical inputs shared by every model in the crate.
///
/// `Δ = E + ħJ − V0` is always derived from the stored fields, never cached.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawParams", into = "RawParams"))]
pub struct PhysicalParams {
    m: f64,
    hbar: f64,
    e: f64,
    v0: f64,
    j: f64,
}

impl PhysicalParams {
    pub fn new(m: f64, hbar: f64, e: f64, v0: f64, j: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidParams("mass must be positive and finite"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParams("hbar must be positive and finite"));
        }
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidParams("energy E must be positive and finite"));
        }
        if !v0.is_finite() {
            return Err(Error::InvalidParams("step height V0 must be finite"));
        }
        if !(j.is_finite() && j >= 0.0) {
            return Err(Error::InvalidParams("coupling J must be non-negative and finite"));
        }
        Ok(Self { m, hbar, e, v0, j })
    }

    /// Natural units, `ħ = m = 1`.
    pub fn natural(e: f64, v0: f64, j: f64) -> Result<Self> {
        Self::new(1.0, 1.0, e, v0, j)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    /// Kinetic energy inside the coupled section, `Δ = E + ħJ − V0`.
    pub fn delta(&self) -> f64 {
        self.e + self.hbar * self.j - self.v0
    }

    pub fn with_coupling(&self, j: f64) -> Result<Self> {
        Self::new(self.m, self.hbar, self.e, self.v0, j)
    }
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct RawParams {
    m: f64,
    hbar: f64,
    #[serde(rename = "E")]
    e: f64,
    #[serde(rename = "V0")]
    v0: f64,
    #[serde(rename = "J")]
    j: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<RawParams> for PhysicalParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.m, raw.hbar, raw.e, raw.v0, raw.j)
    }
}

#[cfg(feature = "serde")]
impl From<PhysicalParams> for RawParams {
    fn from(p: PhysicalParams) -> Self {
        RawParams {
            m: p.m,
            hbar: p.hbar,
            e: p.e,
            v0: p.v0,
            j: p.j,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_inputs() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 1.0, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, f64::NAN, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 0.0, -0.1).is_err());
    }

    #[test]
    fn delta_tracks_fields() {
        let p = PhysicalParams::new(1.0, 2.0, 0.5, 2.0, 0.1).unwrap();
        assert_eq!(p.delta(), 0.5 + 0.2 - 2.0);
        let q = p.with_coupling(0.3).unwrap();
        assert_eq!(q.delta(), 0.5 + 0.6 - 2.0);
    }
}
