//! The bundled Cogitamus 2019 fixture: a fictitious lab of 80 members.
//!
//! The base inventory holds buildings and the lab car; survey and travel
//! files are synthetic and imported on top by [`full_inventory`].

use crate::geodesy::RouteCorrection;
use crate::ingestion::{normalize_trips, parse_commute_csv, parse_travel_tsv, Gazetteer};
use crate::inventory::Inventory;

pub const BASE_INVENTORY_JSON: &str = include_str!("../data/demo/cogitamus-2019.json");
pub const TRAVEL_TSV: &str = include_str!("../data/demo/cogitamus-2019-travel.tsv");
pub const COMMUTES_CSV: &str = include_str!("../data/demo/cogitamus-2019-commutes.csv");

pub fn base_inventory() -> Inventory {
    Inventory::from_json(BASE_INVENTORY_JSON.as_bytes()).expect("bundled fixture parses")
}

/// Base inventory with the commute survey and travel file imported.
pub fn full_inventory() -> Inventory {
    let mut inv = base_inventory();
    let (responses, errors) = parse_commute_csv(COMMUTES_CSV.as_bytes()).expect("bundled survey decodes");
    assert!(errors.is_empty(), "bundled survey has row errors: {errors:?}");
    inv.commute_responses = responses;

    let (rows, errors) = parse_travel_tsv(TRAVEL_TSV.as_bytes()).expect("bundled travel file decodes");
    assert!(errors.is_empty(), "bundled travel file has row errors: {errors:?}");
    let travel = normalize_trips(&rows, &Gazetteer::bundled(), &RouteCorrection::default());
    assert!(travel.errors.is_empty(), "bundled travel file has unresolved places: {:?}", travel.errors);
    inv.trips = travel.trips;
    inv
}
