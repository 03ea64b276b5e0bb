use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Error {
    #[error("invalid physical parameter: {0}")]
    InvalidParams(&'static str),

    /// `Δ + ħJ` is too close to zero for the wavenumber branch to be defined.
    #[error("degenerate parameters: |Δ + ħJ| = {magnitude:e} is below {epsilon:e}")]
    DegenerateParameter { magnitude: f64, epsilon: f64 },

    #[error("density {rho:e} is too small to define a velocity")]
    ZeroDensity { rho: f64 },

    #[error("step analysis needs 0 < E < V0 and J = 0 (got E = {e}, V0 = {v0}, J = {j})")]
    InvalidRegime { e: f64, v0: f64, j: f64 },

    #[error("step controller failed near a density node at t = {t}, x = {x}")]
    SingularityEncountered { t: f64, x: f64 },

    #[error("fit window too wide: Jx/v reaches {max_scaled} (bound {bound})")]
    FitWindowTooWide { max_scaled: f64, bound: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
