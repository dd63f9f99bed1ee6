//! Emission factors and global-warming potentials.
//!
//! A [`FactorSet`] is loaded from a versioned JSON document and is the single
//! source of numeric truth for every conversion the engine performs. Factors
//! are addressed by a category plus an exact selector map; there is no fuzzy
//! fallback, so a missing entry always surfaces as [`FactorError::MissingFactor`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The sample factor set shipped with the crate.
pub const BUNDLED_FACTORS: &str = include_str!("../data/factors-sample-1.json");

/// Gases of the Kyoto basket. Every family must have at least one GWP entry.
const KYOTO_FAMILIES: &[(&str, &[&str])] = &[
    ("CO2", &["CO2"]),
    ("CH4", &["CH4"]),
    ("N2O", &["N2O"]),
    ("HFC", &["R32", "R134a", "R404A", "R407C", "R410A", "HFC-23", "HFC-32", "HFC-134a"]),
    ("PFC", &["CF4", "C2F6", "C3F8", "PFC-14", "PFC-116"]),
    ("SF6", &["SF6"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorCategory {
    Electricity,
    HeatNetwork,
    StationaryCombustion,
    RefrigerantGwp,
    Vehicle,
    TransportMode,
}

impl fmt::Display for FactorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FactorCategory::Electricity => "electricity",
            FactorCategory::HeatNetwork => "heat_network",
            FactorCategory::StationaryCombustion => "stationary_combustion",
            FactorCategory::RefrigerantGwp => "refrigerant_gwp",
            FactorCategory::Vehicle => "vehicle",
            FactorCategory::TransportMode => "transport_mode",
        };
        f.write_str(s)
    }
}

/// Activity unit a factor is expressed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActivityUnit {
    #[serde(rename = "kWh")]
    KWh,
    #[serde(rename = "kg")]
    Kg,
    #[serde(rename = "km")]
    Km,
    #[serde(rename = "passenger_km")]
    PassengerKm,
    #[serde(rename = "vehicle_km")]
    VehicleKm,
    #[serde(rename = "hour")]
    Hour,
}

impl ActivityUnit {
    /// True for the three distance units, which are interchangeable as far as
    /// the activity quantity is concerned.
    pub fn is_distance(self) -> bool {
        matches!(self, ActivityUnit::Km | ActivityUnit::PassengerKm | ActivityUnit::VehicleKm)
    }
}

impl fmt::Display for ActivityUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ActivityUnit::KWh => "kWh",
            ActivityUnit::Kg => "kg",
            ActivityUnit::Km => "km",
            ActivityUnit::PassengerKm => "passenger_km",
            ActivityUnit::VehicleKm => "vehicle_km",
            ActivityUnit::Hour => "hour",
        };
        f.write_str(s)
    }
}

/// Selector keys and values, e.g. `mode=plane, haul=short`.
pub type Selector = BTreeMap<String, String>;

/// Builds a selector from string pairs.
pub fn selector<'a, I>(pairs: I) -> Selector
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v.to_owned())).collect()
}

/// Formats a selector as `k=v, k=v` for error messages.
pub fn describe_selector(sel: &Selector) -> String {
    sel.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

/// kg CO2e per unit of activity, split into use phase and manufacturing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionFactor {
    pub id: String,
    pub category: FactorCategory,
    pub selector: Selector,
    pub unit: ActivityUnit,
    pub use_phase_value: f64,
    pub manufacturing_value: f64,
    pub relative_uncertainty: f64,
    #[serde(default)]
    pub source_note: String,
}

impl EmissionFactor {
    pub fn total(&self) -> f64 {
        self.use_phase_value + self.manufacturing_value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDocument {
    version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gwp_horizon: Option<String>,
    #[serde(default)]
    gwp: BTreeMap<String, f64>,
    #[serde(default)]
    factors: Vec<EmissionFactor>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("malformed factor document at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("duplicate factor for {category} [{selector}]: '{first}' and '{second}'")]
    Conflict { category: FactorCategory, selector: String, first: String, second: String },
    #[error("invalid factor document at {field}: {message}")]
    Validation { field: String, message: String },
    #[error("no emission factor for {category} [{selector}]")]
    MissingFactor { category: String, selector: String },
}

impl FactorError {
    fn missing(category: impl fmt::Display, sel: &Selector) -> Self {
        FactorError::MissingFactor { category: category.to_string(), selector: describe_selector(sel) }
    }

    fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        FactorError::Validation { field: field.into(), message: message.into() }
    }
}

/// Immutable, versioned collection of emission factors and GWPs.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSet {
    version: String,
    gwp_horizon: Option<String>,
    gwp: BTreeMap<String, f64>,
    factors: Vec<EmissionFactor>,
    index: BTreeMap<(FactorCategory, Selector), usize>,
}

impl FactorSet {
    /// Parses and validates a factor document.
    pub fn load(document: &[u8]) -> Result<Self, FactorError> {
        let doc: FactorDocument = if document.iter().all(u8::is_ascii_whitespace) {
            // An empty file has no CO2 entry; report that rather than a parse failure.
            return Err(FactorError::validation("gwp.CO2", "missing CO2 global-warming potential"));
        } else {
            serde_json::from_slice(document).map_err(|e| FactorError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?
        };
        Self::from_document(doc)
    }

    /// The sample set bundled with this crate.
    pub fn bundled() -> Self {
        Self::load(BUNDLED_FACTORS.as_bytes()).expect("bundled factor file is valid")
    }

    fn from_document(doc: FactorDocument) -> Result<Self, FactorError> {
        if doc.version.trim().is_empty() {
            return Err(FactorError::validation("version", "must not be empty"));
        }
        match doc.gwp.get("CO2") {
            Some(v) if *v == 1.0 => {}
            Some(v) => {
                return Err(FactorError::validation("gwp.CO2", format!("must be exactly 1, found {v}")))
            }
            None => return Err(FactorError::validation("gwp.CO2", "missing CO2 global-warming potential")),
        }
        for (gas, v) in &doc.gwp {
            if !v.is_finite() || *v <= 0.0 {
                return Err(FactorError::validation(format!("gwp.{gas}"), "must be a positive number"));
            }
        }
        for (family, members) in KYOTO_FAMILIES {
            if !members.iter().any(|g| doc.gwp.contains_key(*g)) {
                return Err(FactorError::validation(
                    "gwp",
                    format!("no GWP for the {family} family (expected one of {})", members.join(", ")),
                ));
            }
        }

        let mut index = BTreeMap::new();
        let mut ids = BTreeSet::new();
        for (i, f) in doc.factors.iter().enumerate() {
            let at = |field: &str| format!("factors[{i}].{field}");
            if f.id.trim().is_empty() {
                return Err(FactorError::validation(at("id"), "must not be empty"));
            }
            if !ids.insert(f.id.as_str()) {
                return Err(FactorError::validation(at("id"), format!("duplicate id '{}'", f.id)));
            }
            for (name, v) in [("use_phase_value", f.use_phase_value), ("manufacturing_value", f.manufacturing_value)] {
                if !v.is_finite() || v < 0.0 {
                    return Err(FactorError::validation(at(name), "must be a finite number >= 0"));
                }
            }
            if f.total() <= 0.0 {
                return Err(FactorError::validation(
                    at("use_phase_value"),
                    "use_phase_value + manufacturing_value must be > 0",
                ));
            }
            if !(0.0..=1.0).contains(&f.relative_uncertainty) {
                return Err(FactorError::validation(at("relative_uncertainty"), "must lie in [0, 1]"));
            }
            if f.category == FactorCategory::RefrigerantGwp {
                let gas = f
                    .selector
                    .get("gas")
                    .ok_or_else(|| FactorError::validation(at("selector"), "refrigerant factors need a 'gas' key"))?;
                match doc.gwp.get(gas) {
                    Some(g) if *g == f.use_phase_value && f.manufacturing_value == 0.0 => {}
                    _ => {
                        return Err(FactorError::validation(
                            at("use_phase_value"),
                            format!("refrigerant factor must equal gwp[\"{gas}\"]"),
                        ))
                    }
                }
            }
            if let Some(prev) = index.insert((f.category, f.selector.clone()), i) {
                return Err(FactorError::Conflict {
                    category: f.category,
                    selector: describe_selector(&f.selector),
                    first: doc.factors[prev].id.clone(),
                    second: f.id.clone(),
                });
            }
        }

        Ok(FactorSet { version: doc.version, gwp_horizon: doc.gwp_horizon, gwp: doc.gwp, factors: doc.factors, index })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn gwp_horizon(&self) -> Option<&str> {
        self.gwp_horizon.as_deref()
    }

    pub fn factors(&self) -> &[EmissionFactor] {
        &self.factors
    }

    pub fn gwps(&self) -> &BTreeMap<String, f64> {
        &self.gwp
    }

    /// Exact match on category and the full selector map.
    pub fn lookup(&self, category: FactorCategory, sel: &Selector) -> Result<&EmissionFactor, FactorError> {
        self.index
            .get(&(category, sel.clone()))
            .map(|&i| &self.factors[i])
            .ok_or_else(|| FactorError::missing(category, sel))
    }

    /// 100-year global-warming potential of `gas`.
    pub fn gwp(&self, gas: &str) -> Result<f64, FactorError> {
        self.gwp.get(gas).copied().ok_or_else(|| FactorError::MissingFactor {
            category: "gwp".into(),
            selector: format!("gas={gas}"),
        })
    }

    /// Use-phase and manufacturing components of a vehicle's per-distance factor.
    pub fn effective_vehicle_factor(&self, kind: VehicleKind, fuel: Fuel) -> Result<(f64, f64), FactorError> {
        let f = self.lookup(FactorCategory::Vehicle, &selector([("kind", kind.as_str()), ("fuel", fuel.as_str())]))?;
        Ok((f.use_phase_value, f.manufacturing_value))
    }

    /// Serializes the set back to its document form.
    pub fn to_document(&self) -> String {
        let doc = FactorDocument {
            version: self.version.clone(),
            gwp_horizon: self.gwp_horizon.clone(),
            gwp: self.gwp.clone(),
            factors: self.factors.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("factor document serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VehicleKind {
    Car,
    Motorbike,
    Bike,
    EBike,
    Scooter,
    EScooter,
    Bus,
    Coach,
    Train,
    Streetcar,
    Subway,
    Aircraft,
    Boat,
}

impl VehicleKind {
    pub const ALL: [VehicleKind; 13] = [
        VehicleKind::Car,
        VehicleKind::Motorbike,
        VehicleKind::Bike,
        VehicleKind::EBike,
        VehicleKind::Scooter,
        VehicleKind::EScooter,
        VehicleKind::Bus,
        VehicleKind::Coach,
        VehicleKind::Train,
        VehicleKind::Streetcar,
        VehicleKind::Subway,
        VehicleKind::Aircraft,
        VehicleKind::Boat,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VehicleKind::Car => "car",
            VehicleKind::Motorbike => "motorbike",
            VehicleKind::Bike => "bike",
            VehicleKind::EBike => "e-bike",
            VehicleKind::Scooter => "scooter",
            VehicleKind::EScooter => "e-scooter",
            VehicleKind::Bus => "bus",
            VehicleKind::Coach => "coach",
            VehicleKind::Train => "train",
            VehicleKind::Streetcar => "streetcar",
            VehicleKind::Subway => "subway",
            VehicleKind::Aircraft => "aircraft",
            VehicleKind::Boat => "boat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fuel {
    Gasoline,
    Diesel,
    Electric,
    Hybrid,
    None,
    /// Accepted in documents so that callers get a MissingFactor rather than a parse error.
    Hydrogen,
}

impl Fuel {
    pub fn as_str(self) -> &'static str {
        match self {
            Fuel::Gasoline => "gasoline",
            Fuel::Diesel => "diesel",
            Fuel::Electric => "electric",
            Fuel::Hybrid => "hybrid",
            Fuel::None => "none",
            Fuel::Hydrogen => "hydrogen",
        }
    }

    /// Fuels burnt on board; their use phase is a direct mobile-combustion emission.
    pub fn is_thermal(self) -> bool {
        matches!(self, Fuel::Gasoline | Fuel::Diesel | Fuel::Hybrid)
    }
}
