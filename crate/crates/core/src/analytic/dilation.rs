use crate::{Error, PhysicalParams, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DilationMode {
    /// `x → αx`
    Space,
    /// `t → αt`
    Time,
}

/// Rescales the physical parameters for a change of length or time unit.
///
/// `ħ` is held fixed, so the mass carries the dimensional bookkeeping
/// (`[ħ] = M L² / T`):
///
/// * space: `m → m/α²`; energies and `J` are unchanged. Wavenumbers become
///   `k/α` and `v → αv`.
/// * time: `m → αm`, energies `→ /α`, `J → J/α`. Wavenumbers are unchanged
///   and `v → v/α`.
///
/// Both keep `Jx/v` and the exact `k1 x` invariant at corresponding points.
pub fn dilation_transform(params: &PhysicalParams, alpha: f64, mode: DilationMode) -> Result<PhysicalParams> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidConfig("dilation factor must be positive and finite"));
    }
    let (m, hbar, e, v0, j) = (params.m(), params.hbar(), params.e(), params.v0(), params.j());
    match mode {
        DilationMode::Space => PhysicalParams::new(m / (alpha * alpha), hbar, e, v0, j),
        DilationMode::Time => PhysicalParams::new(m * alpha, hbar, e / alpha, v0 / alpha, j / alpha),
    }
}
