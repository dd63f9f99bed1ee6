//! Conversion of activity data into emission records, one function per source.

use super::category::RegulatoryCategory;
use super::record::{EmissionRecord, EmissionSource, TravelDimensions};
use super::EngineError;
use crate::factors::{selector, ActivityUnit, EmissionFactor, FactorCategory, FactorSet, Fuel, Selector};
use crate::geodesy::{HaulClass, RouteCorrection};
use crate::inventory::{Building, CommuteMode, CommuteResponse, LabInfo, LabVehicle, TravelMode, Trip};

/// Grid zone and heat network used for every building.
const ELECTRICITY_ZONE: &str = "france";
const HEAT_NETWORK: &str = "default";

fn push(
    out: &mut Vec<EmissionRecord>,
    source: EmissionSource,
    category: RegulatoryCategory,
    co2e_kg: f64,
    factor: &EmissionFactor,
    origin: String,
    dimensions: Option<TravelDimensions>,
) {
    if co2e_kg > 0.0 {
        out.push(EmissionRecord {
            source,
            category,
            co2e_kg,
            uncertainty_kg: co2e_kg * factor.relative_uncertainty,
            origin,
            factor_id: Some(factor.id.clone()),
            dimensions,
        });
    }
}

fn check_unit(factor: &EmissionFactor, expected: ActivityUnit) -> Result<(), EngineError> {
    let ok = factor.unit == expected || (factor.unit.is_distance() && expected.is_distance());
    if ok {
        Ok(())
    } else {
        Err(EngineError::UnitMismatch { factor_id: factor.id.clone(), expected, found: factor.unit })
    }
}

fn lookup<'a>(f: &'a FactorSet, category: FactorCategory, sel: &Selector) -> Result<&'a EmissionFactor, EngineError> {
    Ok(f.lookup(category, sel)?)
}

/// Records for one building. Quantities are prorated by the occupied share.
pub fn compute_building_emissions(b: &Building, f: &FactorSet) -> Result<Vec<EmissionRecord>, EngineError> {
    building_records("building", b, f)
}

pub(crate) fn building_records(prefix: &str, b: &Building, f: &FactorSet) -> Result<Vec<EmissionRecord>, EngineError> {
    let mut out = Vec::new();
    let share = b.occupied_share;

    if b.electricity_kwh > 0.0 {
        let factor = lookup(f, FactorCategory::Electricity, &selector([("zone", ELECTRICITY_ZONE)]))?;
        check_unit(factor, ActivityUnit::KWh)?;
        let kg = b.electricity_kwh * share * factor.total();
        push(&mut out, EmissionSource::BuildingEnergy, RegulatoryCategory::PurchasedElectricity, kg, factor, format!("{prefix}.electricity_kwh"), None);
    }
    if b.heat_network_kwh_pci > 0.0 {
        let factor = lookup(f, FactorCategory::HeatNetwork, &selector([("network", HEAT_NETWORK)]))?;
        check_unit(factor, ActivityUnit::KWh)?;
        let kg = b.heat_network_kwh_pci * share * factor.total();
        push(&mut out, EmissionSource::BuildingEnergy, RegulatoryCategory::PurchasedHeat, kg, factor, format!("{prefix}.heat_network_kwh_pci"), None);
    }
    for (j, fuel) in b.fuel_combustion.iter().enumerate() {
        if fuel.quantity <= 0.0 {
            continue;
        }
        let factor = lookup(f, FactorCategory::StationaryCombustion, &selector([("fuel", fuel.fuel.as_str())]))?;
        check_unit(factor, fuel.unit)?;
        let kg = fuel.quantity * share * factor.total();
        push(&mut out, EmissionSource::BuildingEnergy, RegulatoryCategory::StationaryCombustion, kg, factor, format!("{prefix}.fuel_combustion[{j}]"), None);
    }
    for (j, leak) in b.refrigerant_leaks.iter().enumerate() {
        if leak.kg <= 0.0 {
            continue;
        }
        let gwp = f.gwp(&leak.gas)?;
        let factor = lookup(f, FactorCategory::RefrigerantGwp, &selector([("gas", leak.gas.as_str())]))?;
        let kg = leak.kg * share * gwp;
        push(&mut out, EmissionSource::Refrigerants, RegulatoryCategory::Fugitive, kg, factor, format!("{prefix}.refrigerant_leaks[{j}]"), None);
    }
    Ok(out)
}

/// Records for one lab vehicle: combustion in category 2, manufacturing in 10.
///
/// Electric use phase is not counted; charging is billed with the buildings.
pub fn compute_vehicle_emissions(v: &LabVehicle, f: &FactorSet) -> Result<Vec<EmissionRecord>, EngineError> {
    vehicle_records("vehicle", v, f)
}

pub(crate) fn vehicle_records(prefix: &str, v: &LabVehicle, f: &FactorSet) -> Result<Vec<EmissionRecord>, EngineError> {
    let (kind, fuel) = (v.kind.as_str(), v.fuel.as_str());
    let (quantity, unit, sel) = if let Some(km) = v.annual_distance_km {
        (km, ActivityUnit::VehicleKm, selector([("kind", kind), ("fuel", fuel)]))
    } else if let Some(q) = &v.annual_fuel {
        (q.quantity, q.unit, selector([("kind", kind), ("fuel", fuel), ("basis", "fuel")]))
    } else if let Some(h) = v.hours_of_operation {
        (h, ActivityUnit::Hour, selector([("kind", kind), ("fuel", fuel), ("basis", "hours")]))
    } else {
        return Err(EngineError::InvalidInventory(vec![crate::inventory::Finding {
            path: prefix.to_owned(),
            message: "no usage basis set".into(),
        }]));
    };
    let mut out = Vec::new();
    if quantity <= 0.0 {
        return Ok(out);
    }
    let factor = lookup(f, FactorCategory::Vehicle, &sel)?;
    check_unit(factor, unit)?;

    let use_phase = quantity * factor.use_phase_value;
    if v.fuel.is_thermal() {
        push(&mut out, EmissionSource::LabVehicles, RegulatoryCategory::MobileCombustion, use_phase, factor, format!("{prefix}.use_phase"), None);
    } else if v.fuel != Fuel::Electric {
        // no combustion on board: upkeep and energy supply count with the asset
        push(&mut out, EmissionSource::LabVehicles, RegulatoryCategory::FixedAssets, use_phase, factor, format!("{prefix}.use_phase"), None);
    }
    let manufacturing = quantity * factor.manufacturing_value;
    push(&mut out, EmissionSource::LabVehicles, RegulatoryCategory::FixedAssets, manufacturing, factor, format!("{prefix}.manufacturing"), None);
    Ok(out)
}

fn commute_selector(mode: CommuteMode) -> Option<Selector> {
    let sel = match mode {
        CommuteMode::Walk => return None,
        CommuteMode::Bike => selector([("mode", "bike")]),
        CommuteMode::EBike => selector([("mode", "e-bike")]),
        CommuteMode::EScooter => selector([("mode", "e-scooter")]),
        CommuteMode::Motorbike => selector([("mode", "motorbike")]),
        CommuteMode::Plane => selector([("mode", "plane"), ("haul", "short")]),
        CommuteMode::Train => selector([("mode", "train"), ("zone", "france")]),
        CommuteMode::Car | CommuteMode::Taxi => selector([("mode", "car")]),
        CommuteMode::Bus => selector([("mode", "bus")]),
        CommuteMode::Streetcar => selector([("mode", "streetcar")]),
        CommuteMode::Rer => selector([("mode", "train_suburban")]),
        CommuteMode::Metro => selector([("mode", "subway")]),
        CommuteMode::Ferry => selector([("mode", "ferry")]),
    };
    Some(sel)
}

/// Annual commute emissions, extrapolated from respondents to all members.
pub fn compute_commute_emissions(
    responses: &[CommuteResponse],
    lab: &LabInfo,
    f: &FactorSet,
) -> Result<Vec<EmissionRecord>, EngineError> {
    let members = lab.total_members();
    if members == 0 {
        return Err(EngineError::ZeroMembers);
    }
    if responses.is_empty() {
        return Err(EngineError::NoResponses);
    }
    let scale = members as f64 / responses.len() as f64;
    let mut out = Vec::new();
    for (i, r) in responses.iter().enumerate() {
        for (j, leg) in r.legs.iter().enumerate() {
            let Some(sel) = commute_selector(leg.mode) else { continue };
            let factor = lookup(f, FactorCategory::TransportMode, &sel)?;
            check_unit(factor, ActivityUnit::Km)?;
            let annual_km = 2.0 * leg.one_way_km * r.days_per_week * r.weeks_per_year;
            let kg = annual_km * factor.total() * scale;
            push(&mut out, EmissionSource::Commutes, RegulatoryCategory::Commuting, kg, factor, format!("commute_responses[{i}].legs[{j}]"), None);
        }
    }
    Ok(out)
}

fn travel_selector(mode: TravelMode, haul: Option<HaulClass>, domestic: bool) -> Selector {
    match mode {
        TravelMode::Plane => selector([("mode", "plane"), ("haul", haul.unwrap_or(HaulClass::Short).as_str())]),
        TravelMode::Train => selector([("mode", "train"), ("zone", if domestic { "france" } else { "international" })]),
        TravelMode::Rer => selector([("mode", "train_suburban")]),
        TravelMode::Car | TravelMode::Taxi => selector([("mode", "car")]),
        TravelMode::Bus => selector([("mode", "bus")]),
        TravelMode::Streetcar => selector([("mode", "streetcar")]),
        TravelMode::Metro => selector([("mode", "subway")]),
        TravelMode::Ferry => selector([("mode", "ferry")]),
    }
}

/// Business-travel records, one per leg, tagged with breakdown dimensions.
pub fn compute_travel_emissions(
    trips: &[Trip],
    f: &FactorSet,
    cfg: &RouteCorrection,
) -> Result<Vec<EmissionRecord>, EngineError> {
    let mut out = Vec::new();
    for (i, trip) in trips.iter().enumerate() {
        for (j, leg) in trip.legs.iter().enumerate() {
            let haul = (leg.mode == TravelMode::Plane).then(|| cfg.classify_haul(leg.corrected_km));
            let domestic = leg.from_country == "FR" && leg.to_country == "FR";
            let factor = lookup(f, FactorCategory::TransportMode, &travel_selector(leg.mode, haul, domestic))?;
            check_unit(factor, ActivityUnit::Km)?;
            let distance = if leg.round_trip { leg.corrected_km * 2.0 } else { leg.corrected_km };
            let mut kg = distance * factor.total();
            if leg.mode.needs_occupancy() {
                let occupancy = leg.car_occupancy.unwrap_or(1).max(1);
                kg /= f64::from(occupancy);
            }
            let dims = TravelDimensions { purpose: trip.purpose, status: trip.status, mode: leg.mode, haul };
            push(&mut out, EmissionSource::ProfessionalTravel, RegulatoryCategory::BusinessTravel, kg, factor, format!("trips[{i}].legs[{j}]"), Some(dims));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::VehicleKind;
    use crate::geodesy::{great_circle_km, GeoPoint};
    use crate::inventory::{CommuteLeg, FuelQuantity, FuelUse, MemberStatus, RefrigerantLeak, TravelLeg, TravelPurpose};
    use std::collections::BTreeMap;

    /// Small set with the round numbers used in the examples below.
    fn round_factors() -> FactorSet {
        let doc = r#"{"version":"t","gwp":{"CO2":1,"CH4":25,"N2O":298,"R32":675,"CF4":7390,"SF6":22800},"factors":[
          {"id":"e","category":"electricity","selector":{"zone":"france"},"unit":"kWh","use_phase_value":0.06,"manufacturing_value":0,"relative_uncertainty":0.1},
          {"id":"h","category":"heat_network","selector":{"network":"default"},"unit":"kWh","use_phase_value":0.1,"manufacturing_value":0,"relative_uncertainty":0.1},
          {"id":"g","category":"stationary_combustion","selector":{"fuel":"natural_gas"},"unit":"kWh","use_phase_value":0.2,"manufacturing_value":0,"relative_uncertainty":0.05},
          {"id":"r","category":"refrigerant_gwp","selector":{"gas":"R32"},"unit":"kg","use_phase_value":675,"manufacturing_value":0,"relative_uncertainty":0.3},
          {"id":"d","category":"vehicle","selector":{"kind":"car","fuel":"diesel"},"unit":"vehicle_km","use_phase_value":0.2,"manufacturing_value":0.05,"relative_uncertainty":0.2},
          {"id":"ev","category":"vehicle","selector":{"kind":"car","fuel":"electric"},"unit":"vehicle_km","use_phase_value":0.02,"manufacturing_value":0.08,"relative_uncertainty":0.2},
          {"id":"df","category":"vehicle","selector":{"kind":"car","fuel":"diesel","basis":"fuel"},"unit":"kg","use_phase_value":3.75,"manufacturing_value":0,"relative_uncertainty":0.1},
          {"id":"bh","category":"vehicle","selector":{"kind":"boat","fuel":"diesel","basis":"hours"},"unit":"hour","use_phase_value":90,"manufacturing_value":3,"relative_uncertainty":0.5},
          {"id":"car","category":"transport_mode","selector":{"mode":"car"},"unit":"vehicle_km","use_phase_value":0.2,"manufacturing_value":0,"relative_uncertainty":0.2},
          {"id":"tr","category":"transport_mode","selector":{"mode":"train","zone":"france"},"unit":"passenger_km","use_phase_value":0.01,"manufacturing_value":0,"relative_uncertainty":0.2},
          {"id":"ps","category":"transport_mode","selector":{"mode":"plane","haul":"short"},"unit":"passenger_km","use_phase_value":0.25,"manufacturing_value":0,"relative_uncertainty":0.2},
          {"id":"pm","category":"transport_mode","selector":{"mode":"plane","haul":"medium"},"unit":"passenger_km","use_phase_value":0.18,"manufacturing_value":0,"relative_uncertainty":0.2},
          {"id":"pl","category":"transport_mode","selector":{"mode":"plane","haul":"long"},"unit":"passenger_km","use_phase_value":0.15,"manufacturing_value":0,"relative_uncertainty":0.2}
        ]}"#;
        FactorSet::load(doc.as_bytes()).unwrap()
    }

    fn building() -> Building {
        Building {
            name: "b".into(),
            floor_area_m2: 1000.0,
            occupied_share: 1.0,
            electricity_kwh: 0.0,
            self_generated_kwh: 0.0,
            heat_network_kwh_pci: 0.0,
            fuel_combustion: vec![],
            refrigerant_leaks: vec![],
        }
    }

    fn lab(members: u32) -> LabInfo {
        LabInfo { name: "l".into(), year: 2019, members: BTreeMap::from([(MemberStatus::Researcher, members)]) }
    }

    fn leg(mode: TravelMode, corrected_km: f64, round_trip: bool, car_occupancy: Option<u32>) -> TravelLeg {
        let p = GeoPoint::new(43.6, 1.44).unwrap();
        TravelLeg {
            mode,
            departure_date: None,
            from_city: String::new(),
            from_country: "FR".into(),
            from: p,
            to_city: String::new(),
            to_country: "FR".into(),
            to: p,
            great_circle_km: corrected_km,
            corrected_km,
            round_trip,
            car_occupancy,
        }
    }

    fn trip(legs: Vec<TravelLeg>) -> Trip {
        Trip { trip_number: 1, legs, purpose: TravelPurpose::Conference, status: Some(MemberStatus::Researcher) }
    }

    #[test]
    fn electricity_record() {
        let mut b = building();
        b.electricity_kwh = 120_000.0;
        b.self_generated_kwh = 5_000.0;
        let r = compute_building_emissions(&b, &round_factors()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].category, RegulatoryCategory::PurchasedElectricity);
        assert!((r[0].co2e_kg - 7200.0).abs() < 1e-9);
        assert!((r[0].uncertainty_kg - 720.0).abs() < 1e-9);
    }

    #[test]
    fn refrigerant_record() {
        let mut b = building();
        b.refrigerant_leaks.push(RefrigerantLeak { gas: "R32".into(), kg: 0.3 });
        let r = compute_building_emissions(&b, &round_factors()).unwrap();
        assert_eq!(r[0].category, RegulatoryCategory::Fugitive);
        assert_eq!(r[0].source, EmissionSource::Refrigerants);
        assert!((r[0].co2e_kg - 202.5).abs() < 1e-9);
    }

    #[test]
    fn heat_and_fuel_prorated() {
        let mut b = building();
        b.occupied_share = 0.6;
        b.heat_network_kwh_pci = 200_000.0;
        b.fuel_combustion.push(FuelUse { fuel: "natural_gas".into(), quantity: 1000.0, unit: ActivityUnit::KWh });
        let r = compute_building_emissions(&b, &round_factors()).unwrap();
        assert_eq!(r[0].category, RegulatoryCategory::PurchasedHeat);
        assert!((r[0].co2e_kg - 12_000.0).abs() < 1e-9);
        assert_eq!(r[1].category, RegulatoryCategory::StationaryCombustion);
        assert!((r[1].co2e_kg - 120.0).abs() < 1e-9);
    }

    #[test]
    fn fuel_unit_mismatch() {
        let mut b = building();
        b.fuel_combustion.push(FuelUse { fuel: "natural_gas".into(), quantity: 10.0, unit: ActivityUnit::Kg });
        assert!(matches!(compute_building_emissions(&b, &round_factors()), Err(EngineError::UnitMismatch { .. })));
    }

    #[test]
    fn empty_building() {
        assert!(compute_building_emissions(&building(), &round_factors()).unwrap().is_empty());
    }

    #[test]
    fn missing_gas() {
        let mut b = building();
        b.refrigerant_leaks.push(RefrigerantLeak { gas: "R22".into(), kg: 1.0 });
        let err = compute_building_emissions(&b, &round_factors()).unwrap_err();
        assert!(err.to_string().contains("R22"), "{err}");
    }

    fn vehicle(fuel: Fuel, km: f64) -> LabVehicle {
        LabVehicle {
            name: "v".into(),
            kind: VehicleKind::Car,
            fuel,
            annual_distance_km: Some(km),
            annual_fuel: None,
            hours_of_operation: None,
        }
    }

    #[test]
    fn diesel_car() {
        let r = compute_vehicle_emissions(&vehicle(Fuel::Diesel, 12_000.0), &round_factors()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].category, RegulatoryCategory::MobileCombustion);
        assert!((r[0].co2e_kg - 2400.0).abs() < 1e-9);
        assert_eq!(r[1].category, RegulatoryCategory::FixedAssets);
        assert!((r[1].co2e_kg - 600.0).abs() < 1e-9);
    }

    #[test]
    fn electric_car_only_manufacturing() {
        let r = compute_vehicle_emissions(&vehicle(Fuel::Electric, 1000.0), &round_factors()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].category, RegulatoryCategory::FixedAssets);
        assert!((r[0].co2e_kg - 80.0).abs() < 1e-9);
    }

    #[test]
    fn other_bases() {
        let mut v = vehicle(Fuel::Diesel, 0.0);
        v.annual_distance_km = None;
        v.annual_fuel = Some(FuelQuantity { quantity: 100.0, unit: ActivityUnit::Kg });
        let r = compute_vehicle_emissions(&v, &round_factors()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].co2e_kg - 375.0).abs() < 1e-9);

        let boat = LabVehicle {
            name: "boat".into(),
            kind: VehicleKind::Boat,
            fuel: Fuel::Diesel,
            annual_distance_km: None,
            annual_fuel: None,
            hours_of_operation: Some(10.0),
        };
        let r = compute_vehicle_emissions(&boat, &round_factors()).unwrap();
        assert_eq!(r.iter().map(|r| r.co2e_kg).collect::<Vec<_>>(), [900.0, 30.0]);
    }

    #[test]
    fn zero_km_and_hydrogen() {
        assert!(compute_vehicle_emissions(&vehicle(Fuel::Diesel, 0.0), &round_factors()).unwrap().is_empty());
        let err = compute_vehicle_emissions(&vehicle(Fuel::Hydrogen, 100.0), &FactorSet::bundled()).unwrap_err();
        assert!(matches!(err, EngineError::MissingFactor { .. }), "{err}");
    }

    fn response(mode: CommuteMode, km: f64) -> CommuteResponse {
        CommuteResponse {
            status: MemberStatus::PhdPostdoc,
            legs: vec![CommuteLeg { mode, one_way_km: km }],
            days_per_week: 4.0,
            weeks_per_year: 44.0,
        }
    }

    #[test]
    fn commute_formula_and_scaling() {
        let f = round_factors();
        let r = compute_commute_emissions(&[response(CommuteMode::Car, 10.0)], &lab(1), &f).unwrap();
        assert!((r[0].co2e_kg - 704.0).abs() < 1e-9);
        assert_eq!(r[0].category, RegulatoryCategory::Commuting);

        let responses = vec![response(CommuteMode::Car, 10.0); 40];
        let r = compute_commute_emissions(&responses, &lab(80), &f).unwrap();
        assert_eq!(r.len(), 40);
        assert!((r[0].co2e_kg - 1408.0).abs() < 1e-9);
    }

    #[test]
    fn walkers_count_as_respondents() {
        let f = round_factors();
        let responses = [response(CommuteMode::Walk, 1.0), response(CommuteMode::Car, 10.0)];
        let r = compute_commute_emissions(&responses, &lab(2), &f).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].co2e_kg - 704.0).abs() < 1e-9);
        assert!(compute_commute_emissions(&responses[..1], &lab(2), &f).unwrap().is_empty());
    }

    #[test]
    fn commute_errors() {
        let f = round_factors();
        assert_eq!(compute_commute_emissions(&[], &lab(3), &f).unwrap_err(), EngineError::NoResponses);
        assert_eq!(
            compute_commute_emissions(&[response(CommuteMode::Car, 1.0)], &lab(0), &f).unwrap_err(),
            EngineError::ZeroMembers
        );
    }

    #[test]
    fn train_round_trip() {
        let r = compute_travel_emissions(&[trip(vec![leg(TravelMode::Train, 120.0, true, None)])], &round_factors(), &RouteCorrection::default())
            .unwrap();
        assert!((r[0].co2e_kg - 2.4).abs() < 1e-12);
        assert_eq!(r[0].category, RegulatoryCategory::BusinessTravel);
        let dims = r[0].dimensions.unwrap();
        assert_eq!(dims.purpose, TravelPurpose::Conference);
        assert_eq!(dims.haul, None);
    }

    #[test]
    fn car_occupancy_divides() {
        let r = compute_travel_emissions(&[trip(vec![leg(TravelMode::Car, 130.0, false, Some(2))])], &round_factors(), &RouteCorrection::default())
            .unwrap();
        assert!((r[0].co2e_kg - 13.0).abs() < 1e-12);
    }

    #[test]
    fn long_haul_to_new_york() {
        let toulouse = GeoPoint::new(43.60426, 1.44367).unwrap();
        let new_york = GeoPoint::new(40.71427, -74.00597).unwrap();
        let gc = great_circle_km(toulouse, new_york);
        assert!((gc - 6_000.0).abs() < 300.0, "{gc}");
        let cfg = RouteCorrection::default();
        let mut l = leg(TravelMode::Plane, cfg.corrected_distance(TravelMode::Plane, gc), false, None);
        l.to_country = "US".into();
        let r = compute_travel_emissions(&[trip(vec![l])], &round_factors(), &cfg).unwrap();
        assert_eq!(r[0].dimensions.unwrap().haul, Some(HaulClass::Long));
        assert_eq!(r[0].factor_id.as_deref(), Some("pl"));
    }

    #[test]
    fn international_train_uses_its_own_factor() {
        let mut l = leg(TravelMode::Train, 100.0, false, None);
        l.to_country = "DE".into();
        let err = compute_travel_emissions(&[trip(vec![l.clone()])], &round_factors(), &RouteCorrection::default()).unwrap_err();
        assert!(err.to_string().contains("zone=international"), "{err}");
        let r = compute_travel_emissions(&[trip(vec![l])], &FactorSet::bundled(), &RouteCorrection::default()).unwrap();
        assert_eq!(r[0].factor_id.as_deref(), Some("tm-train-international"));
    }
}
