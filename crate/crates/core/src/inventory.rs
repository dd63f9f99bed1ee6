//! Activity data for one lab-year: the engine's input.
//!
//! The JSON form of [`Inventory`] is the interchange format shared by the CLI
//! and the service. Enumerations serialize as snake_case identifiers; the
//! French labels used in imported files are handled by the `from_label`
//! constructors.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::factors::{ActivityUnit, Fuel, VehicleKind};
use crate::geodesy::GeoPoint;
use crate::text::fold;

pub const INVENTORY_SCHEMA_VERSION: u32 = 1;

macro_rules! labelled_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident { $($variant:ident => $label:literal $(| $alias:literal)*),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: [$name; [$($name::$variant),+].len()] = [$($name::$variant),+];

            /// Label as written in imported files.
            pub fn label(self) -> &'static str {
                match self { $($name::$variant => $label),+ }
            }

            /// Matches a label case-insensitively, ignoring accents and separators.
            pub fn from_label(s: &str) -> Option<Self> {
                let key = fold(s);
                $(
                    if key == fold($label) $(|| key == fold($alias))* {
                        return Some($name::$variant);
                    }
                )+
                None
            }

            /// Comma-separated list of accepted labels, for error messages.
            pub fn allowed() -> String {
                [$($label),+].join(", ")
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
    };
}

labelled_enum! {
    /// Agent status of a lab member.
    pub enum MemberStatus {
        Researcher => "Chercheur.e-EC",
        TechnicianAdmin => "ITA",
        PhdPostdoc => "Doc-Post doc",
        Guest => "Personne invitée",
    }
}

labelled_enum! {
    /// Professional travel mode.
    pub enum TravelMode {
        Plane => "Avion",
        Train => "Train",
        Car => "Voiture",
        Taxi => "Taxi",
        Bus => "Bus",
        Streetcar => "Tramway",
        Rer => "RER",
        Metro => "Métro",
        Ferry => "Ferry",
    }
}

labelled_enum! {
    pub enum TravelPurpose {
        FieldStudy => "Etude terrain",
        Conference => "Colloque-Congrès",
        Seminar => "Séminaire",
        Teaching => "Enseignement",
        Collaboration => "Collaboration",
        Visit => "Visite",
        ResearchAdmin => "Administration de la recherche",
        Other => "Autre",
        Unknown => "Inconnu",
    }
}

labelled_enum! {
    /// Commute leg mode: any travel mode plus active and light modes.
    pub enum CommuteMode {
        Walk => "Marche" | "Marche à pied" | "À pied" | "Walk",
        Bike => "Vélo" | "Bike",
        EBike => "Vélo électrique" | "VAE" | "E-bike",
        EScooter => "Trottinette électrique" | "E-scooter",
        Motorbike => "Moto" | "Deux-roues motorisé" | "Motorbike",
        Plane => "Avion",
        Train => "Train",
        Car => "Voiture",
        Taxi => "Taxi",
        Bus => "Bus",
        Streetcar => "Tramway",
        Rer => "RER",
        Metro => "Métro",
        Ferry => "Ferry",
    }
}

#[allow(clippy::derivable_impls)]
impl Default for TravelPurpose {
    fn default() -> Self {
        TravelPurpose::Unknown
    }
}

impl TravelMode {
    /// Car and taxi legs carry an occupancy that splits vehicle emissions.
    pub fn needs_occupancy(self) -> bool {
        matches!(self, TravelMode::Car | TravelMode::Taxi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabInfo {
    pub name: String,
    pub year: i32,
    pub members: BTreeMap<MemberStatus, u32>,
}

impl LabInfo {
    pub fn total_members(&self) -> u64 {
        self.members.values().map(|&n| u64::from(n)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelUse {
    /// Selector value of the stationary-combustion factor, e.g. `natural_gas`.
    pub fuel: String,
    pub quantity: f64,
    pub unit: ActivityUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefrigerantLeak {
    pub gas: String,
    pub kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub name: String,
    pub floor_area_m2: f64,
    /// Share of the building occupied by the lab; every consumption is prorated by it.
    pub occupied_share: f64,
    /// Purchased electricity, net of self-generation.
    pub electricity_kwh: f64,
    #[serde(default)]
    pub self_generated_kwh: f64,
    #[serde(default)]
    pub heat_network_kwh_pci: f64,
    #[serde(default)]
    pub fuel_combustion: Vec<FuelUse>,
    #[serde(default)]
    pub refrigerant_leaks: Vec<RefrigerantLeak>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelQuantity {
    pub quantity: f64,
    pub unit: ActivityUnit,
}

/// A vehicle operated by the lab. Exactly one usage basis must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabVehicle {
    #[serde(default)]
    pub name: String,
    pub kind: VehicleKind,
    pub fuel: Fuel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annual_distance_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annual_fuel: Option<FuelQuantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hours_of_operation: Option<f64>,
}

impl LabVehicle {
    fn bases_set(&self) -> usize {
        [self.annual_distance_km.is_some(), self.annual_fuel.is_some(), self.hours_of_operation.is_some()]
            .iter()
            .filter(|&&b| b)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommuteLeg {
    pub mode: CommuteMode,
    pub one_way_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommuteResponse {
    pub status: MemberStatus,
    pub legs: Vec<CommuteLeg>,
    pub days_per_week: f64,
    pub weeks_per_year: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravelLeg {
    pub mode: TravelMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub departure_date: Option<NaiveDate>,
    #[serde(default)]
    pub from_city: String,
    /// ISO 3166 alpha-2 code.
    pub from_country: String,
    pub from: GeoPoint,
    #[serde(default)]
    pub to_city: String,
    pub to_country: String,
    pub to: GeoPoint,
    pub great_circle_km: f64,
    pub corrected_km: f64,
    pub round_trip: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub car_occupancy: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trip {
    pub trip_number: u32,
    pub legs: Vec<TravelLeg>,
    #[serde(default)]
    pub purpose: TravelPurpose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<MemberStatus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inventory {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub lab: LabInfo,
    #[serde(default)]
    pub buildings: Vec<Building>,
    #[serde(default)]
    pub vehicles: Vec<LabVehicle>,
    #[serde(default)]
    pub commute_responses: Vec<CommuteResponse>,
    #[serde(default)]
    pub trips: Vec<Trip>,
    pub factor_set_version: String,
}

fn schema_version() -> u32 {
    INVENTORY_SCHEMA_VERSION
}

impl Inventory {
    pub fn from_json(bytes: &[u8]) -> serde_json::Result<Self> {
        serde_json::from_slice(bytes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("inventory serializes")
    }
}

/// A violated invariant, located by a JSON-style path such as `vehicles[0]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub path: String,
    pub message: String,
}

struct Findings(Vec<Finding>);

impl Findings {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Finding { path: path.into(), message: message.into() });
    }

    fn non_negative(&mut self, path: impl Into<String>, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.push(path, format!("must be a finite number >= 0, found {v}"));
        }
    }
}

/// Checks every type invariant of the inventory against the current calendar year.
pub fn validate_inventory(inv: &Inventory) -> Vec<Finding> {
    validate_inventory_for_year(inv, chrono::Local::now().year())
}

/// Same as [`validate_inventory`] with an explicit upper bound on the year.
pub fn validate_inventory_for_year(inv: &Inventory, current_year: i32) -> Vec<Finding> {
    let mut f = Findings(Vec::new());

    if inv.schema_version != INVENTORY_SCHEMA_VERSION {
        f.push("schema_version", format!("unsupported schema version {}", inv.schema_version));
    }
    if inv.factor_set_version.trim().is_empty() {
        f.push("factor_set_version", "must name a factor set");
    }
    if inv.lab.name.trim().is_empty() {
        f.push("lab.name", "must not be empty");
    }
    if !(1990..=current_year).contains(&inv.lab.year) {
        f.push("lab.year", format!("must lie in [1990, {current_year}], found {}", inv.lab.year));
    }
    if inv.lab.total_members() == 0 {
        f.push("lab.members", "the lab must have at least one member");
    }

    for (i, b) in inv.buildings.iter().enumerate() {
        let p = format!("buildings[{i}]");
        if !(b.floor_area_m2.is_finite() && b.floor_area_m2 > 0.0) {
            f.push(format!("{p}.floor_area_m2"), "must be > 0");
        }
        if !(b.occupied_share > 0.0 && b.occupied_share <= 1.0) {
            f.push(format!("{p}.occupied_share"), "must lie in (0, 1]");
        }
        f.non_negative(format!("{p}.electricity_kwh"), b.electricity_kwh);
        f.non_negative(format!("{p}.self_generated_kwh"), b.self_generated_kwh);
        f.non_negative(format!("{p}.heat_network_kwh_pci"), b.heat_network_kwh_pci);
        for (j, u) in b.fuel_combustion.iter().enumerate() {
            f.non_negative(format!("{p}.fuel_combustion[{j}].quantity"), u.quantity);
            if u.fuel.trim().is_empty() {
                f.push(format!("{p}.fuel_combustion[{j}].fuel"), "must not be empty");
            }
        }
        for (j, l) in b.refrigerant_leaks.iter().enumerate() {
            f.non_negative(format!("{p}.refrigerant_leaks[{j}].kg"), l.kg);
            if l.gas.trim().is_empty() {
                f.push(format!("{p}.refrigerant_leaks[{j}].gas"), "must not be empty");
            }
        }
    }

    for (i, v) in inv.vehicles.iter().enumerate() {
        let p = format!("vehicles[{i}]");
        match v.bases_set() {
            1 => {}
            0 => f.push(p.clone(), "exactly one usage basis is required (distance, fuel or hours); none set"),
            n => f.push(p.clone(), format!("exactly one usage basis is required (distance, fuel or hours); {n} set")),
        }
        if let Some(km) = v.annual_distance_km {
            f.non_negative(format!("{p}.annual_distance_km"), km);
        }
        if let Some(q) = &v.annual_fuel {
            f.non_negative(format!("{p}.annual_fuel.quantity"), q.quantity);
        }
        if let Some(h) = v.hours_of_operation {
            f.non_negative(format!("{p}.hours_of_operation"), h);
        }
    }

    for (i, r) in inv.commute_responses.iter().enumerate() {
        let p = format!("commute_responses[{i}]");
        if r.legs.is_empty() {
            f.push(format!("{p}.legs"), "at least one leg is required");
        }
        for (j, l) in r.legs.iter().enumerate() {
            if !(l.one_way_km.is_finite() && l.one_way_km > 0.0) {
                f.push(format!("{p}.legs[{j}].one_way_km"), "must be > 0");
            }
        }
        if !(0.0..=7.0).contains(&r.days_per_week) {
            f.push(format!("{p}.days_per_week"), "must lie in [0, 7]");
        }
        if !(0.0..=52.0).contains(&r.weeks_per_year) {
            f.push(format!("{p}.weeks_per_year"), "must lie in [0, 52]");
        }
    }

    for (i, t) in inv.trips.iter().enumerate() {
        let p = format!("trips[{i}]");
        if t.trip_number == 0 {
            f.push(format!("{p}.trip_number"), "must be a positive integer");
        }
        if t.legs.is_empty() {
            f.push(format!("{p}.legs"), "at least one leg is required");
        }
        for (j, l) in t.legs.iter().enumerate() {
            let lp = format!("{p}.legs[{j}]");
            if !l.from.is_valid() {
                f.push(format!("{lp}.from"), "coordinates out of range");
            }
            if !l.to.is_valid() {
                f.push(format!("{lp}.to"), "coordinates out of range");
            }
            f.non_negative(format!("{lp}.great_circle_km"), l.great_circle_km);
            f.non_negative(format!("{lp}.corrected_km"), l.corrected_km);
            match (l.mode.needs_occupancy(), l.car_occupancy) {
                (true, None) => f.push(format!("{lp}.car_occupancy"), "required for car and taxi legs"),
                (true, Some(0)) => f.push(format!("{lp}.car_occupancy"), "must be a positive integer"),
                (false, Some(_)) => f.push(format!("{lp}.car_occupancy"), "only allowed for car and taxi legs"),
                _ => {}
            }
        }
    }

    f.0
}
