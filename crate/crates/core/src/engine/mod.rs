//! Footprint engine: activity data to emission records, regulatory table,
//! synthetic footprint and travel breakdowns.

mod aggregate;
mod category;
mod compute;
mod record;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{
    aggregate_regulatory, aggregate_synthetic, breakdown_travel, propagate_uncertainty, Breakdown, BreakdownRow,
    BuildingsFootprint, Entry, RegulatoryRow, RegulatoryTable, ScopeSubtotal, SyntheticFootprint, SyntheticGroup,
    SyntheticLeaf, TravelAxis, TravelFootprint, UNKNOWN_KEY,
};
pub use category::{RegulatoryCategory, Scope};
pub use compute::{
    compute_building_emissions, compute_commute_emissions, compute_travel_emissions, compute_vehicle_emissions,
};
pub use record::{EmissionRecord, EmissionSource, TravelDimensions};

use crate::factors::{ActivityUnit, FactorError, FactorSet};
use crate::geodesy::RouteCorrection;
use crate::inventory::{validate_inventory, Finding, Inventory};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("no emission factor for {category} [{selector}]")]
    MissingFactor { category: String, selector: String },
    #[error("factor '{factor_id}' is expressed per {found}, activity is in {expected}")]
    UnitMismatch { factor_id: String, expected: ActivityUnit, found: ActivityUnit },
    #[error("no commute survey responses")]
    NoResponses,
    #[error("lab has no members to extrapolate commutes to")]
    ZeroMembers,
    #[error("inventory is invalid: {}", describe_findings(.0))]
    InvalidInventory(Vec<Finding>),
    #[error("inventory expects factor set '{inventory}', loaded set is '{loaded}'")]
    FactorVersionMismatch { inventory: String, loaded: String },
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
    #[error("{stage}: {error}")]
    In { stage: EmissionSource, error: Box<EngineError> },
}

fn describe_findings(findings: &[Finding]) -> String {
    findings.iter().map(|f| format!("{}: {}", f.path, f.message)).collect::<Vec<_>>().join("; ")
}

impl EngineError {
    /// The error with any source tag removed.
    pub fn root(&self) -> &EngineError {
        match self {
            EngineError::In { error, .. } => error.root(),
            e => e,
        }
    }

    fn tagged(self, stage: EmissionSource) -> EngineError {
        EngineError::In { stage, error: Box::new(self) }
    }
}

impl From<FactorError> for EngineError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::MissingFactor { category, selector } => EngineError::MissingFactor { category, selector },
            other => EngineError::InvalidConfig(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub route_correction: RouteCorrection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdowns {
    pub purpose: Breakdown,
    pub status: Breakdown,
    pub mode: Breakdown,
    pub haul: Breakdown,
}

impl Breakdowns {
    pub fn get(&self, axis: TravelAxis) -> &Breakdown {
        match axis {
            TravelAxis::Purpose => &self.purpose,
            TravelAxis::Status => &self.status,
            TravelAxis::Mode => &self.mode,
            TravelAxis::Haul => &self.haul,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Methodology {
    pub factor_set_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gwp_horizon: Option<String>,
    pub route_correction: RouteCorrection,
    pub assumptions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintResult {
    pub schema_version: u32,
    pub lab: String,
    pub year: i32,
    pub total_kg: f64,
    pub uncertainty_kg: f64,
    pub records: Vec<EmissionRecord>,
    pub regulatory: RegulatoryTable,
    pub synthetic: SyntheticFootprint,
    pub breakdowns: Breakdowns,
    pub warnings: Vec<String>,
    pub methodology: Methodology,
}

impl FootprintResult {
    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("result serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> serde_json::Result<Self> {
        serde_json::from_slice(bytes)
    }

    pub fn sources(&self) -> std::collections::BTreeSet<EmissionSource> {
        self.records.iter().map(|r| r.source).collect()
    }
}

const ASSUMPTIONS: [&str; 6] = [
    "building quantities are prorated by the occupied floor share",
    "electric lab vehicles: charging is counted in building electricity, only manufacturing is added",
    "vehicle manufacturing is reported under fixed assets",
    "commute emissions are scaled by members / respondents",
    "train legs use the domestic factor when both ends are in France",
    "per-record uncertainties are combined in quadrature",
];

/// Full computation for a validated inventory. Records are ordered by source,
/// then by inventory order.
pub fn compute_inventory(inv: &Inventory, f: &FactorSet, cfg: &EngineConfig) -> Result<FootprintResult, EngineError> {
    cfg.route_correction.validate().map_err(|e| EngineError::InvalidConfig(e.to_string()))?;
    if inv.factor_set_version != f.version() {
        return Err(EngineError::FactorVersionMismatch {
            inventory: inv.factor_set_version.clone(),
            loaded: f.version().to_owned(),
        });
    }
    let findings = validate_inventory(inv);
    if !findings.is_empty() {
        return Err(EngineError::InvalidInventory(findings));
    }

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (i, b) in inv.buildings.iter().enumerate() {
        let r = compute::building_records(&format!("buildings[{i}]"), b, f)
            .map_err(|e| e.tagged(EmissionSource::BuildingEnergy))?;
        records.extend(r);
    }
    for (i, v) in inv.vehicles.iter().enumerate() {
        let r = compute::vehicle_records(&format!("vehicles[{i}]"), v, f).map_err(|e| e.tagged(EmissionSource::LabVehicles))?;
        records.extend(r);
    }
    match compute_commute_emissions(&inv.commute_responses, &inv.lab, f) {
        Ok(r) => records.extend(r),
        Err(EngineError::NoResponses) => warnings.push("no commute survey responses: commute emissions are 0".to_owned()),
        Err(e) => return Err(e.tagged(EmissionSource::Commutes)),
    }
    let travel = compute_travel_emissions(&inv.trips, f, &cfg.route_correction)
        .map_err(|e| e.tagged(EmissionSource::ProfessionalTravel))?;
    records.extend(travel);
    records.sort_by_key(|r| r.source);

    let (total_kg, uncertainty_kg) = propagate_uncertainty(&records);
    let breakdown = |axis| breakdown_travel(&records, axis);
    Ok(FootprintResult {
        schema_version: RESULT_SCHEMA_VERSION,
        lab: inv.lab.name.clone(),
        year: inv.lab.year,
        total_kg,
        uncertainty_kg,
        regulatory: aggregate_regulatory(&records),
        synthetic: aggregate_synthetic(&records),
        breakdowns: Breakdowns {
            purpose: breakdown(TravelAxis::Purpose),
            status: breakdown(TravelAxis::Status),
            mode: breakdown(TravelAxis::Mode),
            haul: breakdown(TravelAxis::Haul),
        },
        warnings,
        methodology: Methodology {
            factor_set_version: f.version().to_owned(),
            gwp_horizon: f.gwp_horizon().map(str::to_owned),
            route_correction: cfg.route_correction.clone(),
            assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        },
        records,
    })
}
