use std::fmt;

use serde::{Deserialize, Serialize};

use super::category::RegulatoryCategory;
use crate::geodesy::HaulClass;
use crate::inventory::{MemberStatus, TravelMode, TravelPurpose};

/// Activity family a record was computed from. Declaration order is the
/// stable ordering of records in a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmissionSource {
    BuildingEnergy,
    Refrigerants,
    LabVehicles,
    Commutes,
    ProfessionalTravel,
}

impl EmissionSource {
    pub const ALL: [EmissionSource; 5] = [
        EmissionSource::BuildingEnergy,
        EmissionSource::Refrigerants,
        EmissionSource::LabVehicles,
        EmissionSource::Commutes,
        EmissionSource::ProfessionalTravel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmissionSource::BuildingEnergy => "building_energy",
            EmissionSource::Refrigerants => "refrigerants",
            EmissionSource::LabVehicles => "lab_vehicles",
            EmissionSource::Commutes => "commutes",
            EmissionSource::ProfessionalTravel => "professional_travel",
        }
    }
}

impl fmt::Display for EmissionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Breakdown attributes of a professional-travel record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TravelDimensions {
    pub purpose: TravelPurpose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<MemberStatus>,
    pub mode: TravelMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haul: Option<HaulClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionRecord {
    pub source: EmissionSource,
    pub category: RegulatoryCategory,
    pub co2e_kg: f64,
    pub uncertainty_kg: f64,
    /// Path of the activity item in the inventory, e.g. `trips[2].legs[0]`.
    pub origin: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<TravelDimensions>,
}
