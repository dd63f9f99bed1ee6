//! Aggregation of emission records into the regulatory and synthetic views.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::category::{RegulatoryCategory, Scope};
use super::record::{EmissionRecord, EmissionSource};
use crate::sum::{exact_sum, quadrature};

fn total_of<'a>(records: impl IntoIterator<Item = &'a EmissionRecord> + Clone) -> (f64, f64) {
    let total = exact_sum(records.clone().into_iter().map(|r| r.co2e_kg));
    let uncertainty = quadrature(records.into_iter().map(|r| r.uncertainty_kg));
    (total, uncertainty)
}

/// Total and quadrature uncertainty, records taken as independent.
pub fn propagate_uncertainty(records: &[EmissionRecord]) -> (f64, f64) {
    total_of(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulatoryRow {
    pub category: RegulatoryCategory,
    pub scope: Scope,
    pub co2e_kg: f64,
    pub uncertainty_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopeSubtotal {
    pub scope: Scope,
    pub co2e_kg: f64,
    pub uncertainty_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulatoryTable {
    /// Always 23 rows, in category order.
    pub rows: Vec<RegulatoryRow>,
    /// Always 3 subtotals, in scope order.
    pub scopes: Vec<ScopeSubtotal>,
    pub total_kg: f64,
    pub uncertainty_kg: f64,
}

impl RegulatoryTable {
    pub fn row(&self, c: RegulatoryCategory) -> &RegulatoryRow {
        &self.rows[usize::from(c.number()) - 1]
    }

    pub fn scope(&self, s: Scope) -> &ScopeSubtotal {
        &self.scopes[usize::from(s.number()) - 1]
    }
}

pub fn aggregate_regulatory(records: &[EmissionRecord]) -> RegulatoryTable {
    let rows = RegulatoryCategory::ALL
        .iter()
        .map(|&category| {
            let (co2e_kg, uncertainty_kg) = total_of(records.iter().filter(|r| r.category == category));
            RegulatoryRow { category, scope: category.scope(), co2e_kg, uncertainty_kg }
        })
        .collect();
    let scopes = Scope::ALL
        .iter()
        .map(|&scope| {
            let (co2e_kg, uncertainty_kg) = total_of(records.iter().filter(|r| r.category.scope() == scope));
            ScopeSubtotal { scope, co2e_kg, uncertainty_kg }
        })
        .collect();
    let (total_kg, uncertainty_kg) = total_of(records);
    RegulatoryTable { rows, scopes, total_kg, uncertainty_kg }
}

/// Leaves of the synthetic footprint, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticLeaf {
    Heating,
    Electricity,
    Refrigerants,
    Commutes,
    Vehicles,
    ProfessionalTravel,
}

impl SyntheticLeaf {
    pub const ALL: [SyntheticLeaf; 6] = [
        SyntheticLeaf::Heating,
        SyntheticLeaf::Electricity,
        SyntheticLeaf::Refrigerants,
        SyntheticLeaf::Commutes,
        SyntheticLeaf::Vehicles,
        SyntheticLeaf::ProfessionalTravel,
    ];

    /// Building energy other than purchased electricity counts as heating.
    pub fn of(record: &EmissionRecord) -> SyntheticLeaf {
        match record.source {
            EmissionSource::BuildingEnergy if record.category == RegulatoryCategory::PurchasedElectricity => {
                SyntheticLeaf::Electricity
            }
            EmissionSource::BuildingEnergy => SyntheticLeaf::Heating,
            EmissionSource::Refrigerants => SyntheticLeaf::Refrigerants,
            EmissionSource::LabVehicles => SyntheticLeaf::Vehicles,
            EmissionSource::Commutes => SyntheticLeaf::Commutes,
            EmissionSource::ProfessionalTravel => SyntheticLeaf::ProfessionalTravel,
        }
    }

    pub fn group(self) -> SyntheticGroup {
        match self {
            SyntheticLeaf::Heating | SyntheticLeaf::Electricity | SyntheticLeaf::Refrigerants => SyntheticGroup::Buildings,
            _ => SyntheticGroup::Travel,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SyntheticLeaf::Heating => "heating",
            SyntheticLeaf::Electricity => "electricity",
            SyntheticLeaf::Refrigerants => "refrigerants",
            SyntheticLeaf::Commutes => "commutes",
            SyntheticLeaf::Vehicles => "vehicles",
            SyntheticLeaf::ProfessionalTravel => "professional_travel",
        }
    }
}

impl fmt::Display for SyntheticLeaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticGroup {
    Buildings,
    Travel,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Entry {
    pub co2e_kg: f64,
    pub uncertainty_kg: f64,
    /// Fraction of the grand total; 0 when the total is 0.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingsFootprint {
    pub heating: Entry,
    pub electricity: Entry,
    pub refrigerants: Entry,
    pub subtotal: Entry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravelFootprint {
    pub commutes: Entry,
    pub vehicles: Entry,
    pub professional_travel: Entry,
    pub subtotal: Entry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticFootprint {
    pub buildings: BuildingsFootprint,
    pub travel: TravelFootprint,
    pub total_kg: f64,
    pub uncertainty_kg: f64,
}

impl SyntheticFootprint {
    pub fn leaf(&self, leaf: SyntheticLeaf) -> &Entry {
        match leaf {
            SyntheticLeaf::Heating => &self.buildings.heating,
            SyntheticLeaf::Electricity => &self.buildings.electricity,
            SyntheticLeaf::Refrigerants => &self.buildings.refrigerants,
            SyntheticLeaf::Commutes => &self.travel.commutes,
            SyntheticLeaf::Vehicles => &self.travel.vehicles,
            SyntheticLeaf::ProfessionalTravel => &self.travel.professional_travel,
        }
    }

    pub fn group(&self, group: SyntheticGroup) -> &Entry {
        match group {
            SyntheticGroup::Buildings => &self.buildings.subtotal,
            SyntheticGroup::Travel => &self.travel.subtotal,
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = (SyntheticLeaf, &Entry)> {
        SyntheticLeaf::ALL.into_iter().map(move |l| (l, self.leaf(l)))
    }
}

pub fn aggregate_synthetic(records: &[EmissionRecord]) -> SyntheticFootprint {
    let (total_kg, uncertainty_kg) = total_of(records);
    let entry = |keep: &dyn Fn(SyntheticLeaf) -> bool| {
        let (co2e_kg, uncertainty_kg) = total_of(records.iter().filter(|r| keep(SyntheticLeaf::of(r))));
        let share = if total_kg > 0.0 { co2e_kg / total_kg } else { 0.0 };
        Entry { co2e_kg, uncertainty_kg, share }
    };
    let leaf = |l: SyntheticLeaf| entry(&|x| x == l);
    let group = |g: SyntheticGroup| entry(&|x: SyntheticLeaf| x.group() == g);
    SyntheticFootprint {
        buildings: BuildingsFootprint {
            heating: leaf(SyntheticLeaf::Heating),
            electricity: leaf(SyntheticLeaf::Electricity),
            refrigerants: leaf(SyntheticLeaf::Refrigerants),
            subtotal: group(SyntheticGroup::Buildings),
        },
        travel: TravelFootprint {
            commutes: leaf(SyntheticLeaf::Commutes),
            vehicles: leaf(SyntheticLeaf::Vehicles),
            professional_travel: leaf(SyntheticLeaf::ProfessionalTravel),
            subtotal: group(SyntheticGroup::Travel),
        },
        total_kg,
        uncertainty_kg,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TravelAxis {
    Purpose,
    Status,
    Mode,
    Haul,
}

impl TravelAxis {
    pub const ALL: [TravelAxis; 4] = [TravelAxis::Purpose, TravelAxis::Status, TravelAxis::Mode, TravelAxis::Haul];
}

pub const UNKNOWN_KEY: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    /// Serialized axis value, or `unknown`.
    pub key: String,
    /// Label as written in the import files.
    pub label: String,
    pub co2e_kg: f64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub axis: TravelAxis,
    pub rows: Vec<BreakdownRow>,
    pub total_kg: f64,
}

fn enum_key<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => UNKNOWN_KEY.to_owned(),
    }
}

fn rank<T: PartialEq>(all: &[T], v: T) -> usize {
    all.iter().position(|x| *x == v).unwrap_or(usize::MAX - 1)
}

/// Returns (sort rank, key, label) for the record's value on `axis`.
fn axis_value(r: &EmissionRecord, axis: TravelAxis) -> (usize, String, String) {
    use crate::inventory::{MemberStatus, TravelMode, TravelPurpose};
    let unknown = || (usize::MAX, UNKNOWN_KEY.to_owned(), "Inconnu".to_owned());
    let Some(d) = r.dimensions else { return unknown() };
    match axis {
        TravelAxis::Purpose if d.purpose == TravelPurpose::Unknown => unknown(),
        TravelAxis::Purpose => (rank(&TravelPurpose::ALL, d.purpose), enum_key(&d.purpose), d.purpose.label().to_owned()),
        TravelAxis::Status => match d.status {
            Some(s) => (rank(&MemberStatus::ALL, s), enum_key(&s), s.label().to_owned()),
            None => unknown(),
        },
        TravelAxis::Mode => (rank(&TravelMode::ALL, d.mode), enum_key(&d.mode), d.mode.label().to_owned()),
        TravelAxis::Haul => match d.haul {
            Some(h) => (h as usize, h.as_str().to_owned(), h.as_str().to_owned()),
            None => unknown(),
        },
    }
}

/// Professional-travel emissions split along one axis. Rows follow the
/// axis declaration order with `unknown` last; other sources are ignored.
pub fn breakdown_travel(records: &[EmissionRecord], axis: TravelAxis) -> Breakdown {
    let travel: Vec<&EmissionRecord> =
        records.iter().filter(|r| r.source == EmissionSource::ProfessionalTravel).collect();
    let total_kg = exact_sum(travel.iter().map(|r| r.co2e_kg));
    let mut groups: std::collections::BTreeMap<(usize, String), (String, Vec<f64>)> = Default::default();
    for r in &travel {
        let (rank, key, label) = axis_value(r, axis);
        groups.entry((rank, key)).or_insert_with(|| (label, Vec::new())).1.push(r.co2e_kg);
    }
    let rows = groups
        .into_iter()
        .map(|((_, key), (label, values))| {
            let co2e_kg = exact_sum(values);
            let share = if total_kg > 0.0 { co2e_kg / total_kg } else { 0.0 };
            BreakdownRow { key, label, co2e_kg, share }
        })
        .collect();
    Breakdown { axis, rows, total_kg }
}
