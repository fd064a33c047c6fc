//! Helpers behind the magnitude of the score units.
//!
//! Scores live on a logarithmic scale with base sqrt(10): a factor of ten in
//! dose is two score points. Distance barriers rest on an assumption about
//! how aerosol concentration thins out with distance from the source.

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// Score-unit difference corresponding to a multiplicative factor,
/// i.e. `log_{sqrt(10)}(ratio) = 2 * log10(ratio)`.
pub fn factor_to_score(ratio: f64) -> Result<f64, DomainError> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(DomainError::NonPositiveRatio(ratio));
    }
    Ok(2.0 * ratio.log10())
}

/// How concentration decays with distance from an infected person.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// Aerosol mixed through the whole room; distance does not help.
    RoomUniform,
    /// Cylindrical wave, e.g. singers on a stage.
    Cylindrical,
    /// Spherical wave, e.g. sneezing or a brass instrument.
    Spherical,
    /// Thinning in a volume under sufficient convection.
    Volume,
}

impl DecayModel {
    pub fn exponent(self) -> i32 {
        match self {
            Self::RoomUniform => 0,
            Self::Cylindrical => 1,
            Self::Spherical => 2,
            Self::Volume => 3,
        }
    }
}

/// Concentration at `distance` relative to the concentration at `reference`.
pub fn concentration_ratio(model: DecayModel, reference: f64, distance: f64) -> Result<f64, DomainError> {
    for d in [reference, distance] {
        if !(d.is_finite() && d > 0.0) {
            return Err(DomainError::NonPositiveDistance(d));
        }
    }
    Ok((reference / distance).powi(model.exponent()))
}
