//! Professional-travel TSV: one line per leg, grouped into trips by trip number.

use std::collections::HashMap;

use chrono::NaiveDate;

use super::gazetteer::Gazetteer;
use super::{decode, IngestError, RowError};
use crate::geodesy::{great_circle_km, RouteCorrection};
use crate::inventory::{MemberStatus, TravelLeg, TravelMode, TravelPurpose, Trip};

pub const TRAVEL_HEADER: [&str; 11] = [
    "Trip number",
    "Departure date",
    "Departure city",
    "Departure country",
    "Destination city",
    "Destination country",
    "Travel mode",
    "Number of people in the car",
    "One way / return",
    "Travel purpose",
    "Agent status",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RawTravelRow {
    pub trip_number: u32,
    pub departure_date: NaiveDate,
    pub departure_city: String,
    pub departure_country: String,
    pub destination_city: String,
    pub destination_country: String,
    pub mode: TravelMode,
    pub car_occupancy: Option<u32>,
    pub round_trip: bool,
    pub purpose: Option<TravelPurpose>,
    pub status: Option<MemberStatus>,
    pub source_line: usize,
}

/// Parses `dd/mm/yyyy`; one-digit day and month are tolerated.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let mut parts = s.trim().split('/');
    let (d, m, y) = (parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() || d.is_empty() || d.len() > 2 || m.is_empty() || m.len() > 2 || y.len() != 4 {
        return None;
    }
    if ![d, m, y].iter().all(|p| p.bytes().all(|b| b.is_ascii_digit())) {
        return None;
    }
    NaiveDate::from_ymd_opt(y.parse().ok()?, m.parse().ok()?, d.parse().ok()?)
}

fn parse_round_trip(s: &str) -> Option<bool> {
    match s.trim().to_ascii_uppercase().as_str() {
        "OUI" => Some(true),
        "NON" => Some(false),
        _ => None,
    }
}

fn parse_row(fields: &[&str], line: usize) -> Result<RawTravelRow, String> {
    if !(9..=11).contains(&fields.len()) {
        return Err(format!("expected 11 tab-separated columns, found {}", fields.len()));
    }
    let field = |i: usize| fields.get(i).map(|s| s.trim()).unwrap_or("");

    let trip_number = match field(0).parse::<u32>() {
        Ok(n) if n > 0 => n,
        _ => return Err(format!("bad trip number '{}', expected a positive integer", field(0))),
    };
    let departure_date =
        parse_date(field(1)).ok_or_else(|| format!("bad date format '{}', expected dd/mm/yyyy", field(1)))?;
    for (i, what) in [(2, "departure city"), (3, "departure country"), (4, "destination city"), (5, "destination country")] {
        if field(i).is_empty() {
            return Err(format!("missing {what}"));
        }
    }
    let mode = TravelMode::from_label(field(6))
        .ok_or_else(|| format!("unknown travel mode '{}', allowed: {}", field(6), TravelMode::allowed()))?;
    let car_occupancy = match (mode.needs_occupancy(), field(7)) {
        (true, "") => return Err(format!("number of people in the vehicle is required for mode {mode}")),
        (true, s) => match s.parse::<u32>() {
            Ok(n) if n > 0 => Some(n),
            _ => return Err(format!("bad number of people '{s}', expected a positive integer")),
        },
        (false, "") => None,
        (false, s) => return Err(format!("number of people '{s}' given for mode {mode}; only Voiture and Taxi take one")),
    };
    let round_trip =
        parse_round_trip(field(8)).ok_or_else(|| format!("bad one way / return value '{}', expected OUI or NON", field(8)))?;
    let purpose = match field(9) {
        "" => None,
        s => Some(
            TravelPurpose::from_label(s)
                .filter(|p| *p != TravelPurpose::Unknown)
                .ok_or_else(|| format!("unknown travel purpose '{s}', allowed: {}", purpose_labels()))?,
        ),
    };
    let status = match field(10) {
        "" => None,
        s => Some(
            MemberStatus::from_label(s)
                .ok_or_else(|| format!("unknown agent status '{s}', allowed: {}", MemberStatus::allowed()))?,
        ),
    };
    Ok(RawTravelRow {
        trip_number,
        departure_date,
        departure_city: field(2).to_owned(),
        departure_country: field(3).to_owned(),
        destination_city: field(4).to_owned(),
        destination_country: field(5).to_owned(),
        mode,
        car_occupancy,
        round_trip,
        purpose,
        status,
        source_line: line,
    })
}

fn purpose_labels() -> String {
    TravelPurpose::ALL
        .iter()
        .filter(|p| **p != TravelPurpose::Unknown)
        .map(|p| p.label())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Parses a travel export. Bad rows become [`RowError`]s and never abort the batch.
///
/// The first non-blank line is treated as a header when its date column does
/// not parse and its trip-number column is not an integer. Blank lines are
/// ignored.
pub fn parse_travel_tsv(document: &[u8]) -> Result<(Vec<RawTravelRow>, Vec<RowError>), IngestError> {
    let text = decode(document)?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut first = true;
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if std::mem::take(&mut first) && is_header(&fields) {
            continue;
        }
        match parse_row(&fields, i + 1) {
            Ok(row) => rows.push(row),
            Err(reason) => errors.push(RowError { line: i + 1, reason }),
        }
    }
    Ok((rows, errors))
}

fn is_header(fields: &[&str]) -> bool {
    let date_ok = fields.get(1).and_then(|s| parse_date(s)).is_some();
    let number_ok = fields.first().is_some_and(|s| s.trim().parse::<u64>().is_ok());
    !date_ok && !number_ok
}

/// Writes rows in the import format, header first.
pub fn write_travel_tsv(rows: &[RawTravelRow]) -> String {
    let mut out = TRAVEL_HEADER.join("\t");
    out.push('\n');
    for r in rows {
        let cols = [
            r.trip_number.to_string(),
            r.departure_date.format("%d/%m/%Y").to_string(),
            r.departure_city.clone(),
            r.departure_country.clone(),
            r.destination_city.clone(),
            r.destination_country.clone(),
            r.mode.label().to_owned(),
            r.car_occupancy.map(|n| n.to_string()).unwrap_or_default(),
            if r.round_trip { "OUI" } else { "NON" }.to_owned(),
            r.purpose.map(|p| p.label().to_owned()).unwrap_or_default(),
            r.status.map(|s| s.label().to_owned()).unwrap_or_default(),
        ];
        out.push_str(&cols.join("\t"));
        out.push('\n');
    }
    out
}

/// Result of grouping rows into trips.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalizedTravel {
    pub trips: Vec<Trip>,
    pub errors: Vec<RowError>,
    /// Non-fatal inconsistencies, such as mixed purposes within a trip.
    pub warnings: Vec<RowError>,
}

impl NormalizedTravel {
    pub fn leg_count(&self) -> usize {
        self.trips.iter().map(|t| t.legs.len()).sum()
    }
}

/// Groups rows by trip number in order of first appearance and resolves each
/// leg's endpoints. Purpose and status come from the first row of a trip.
pub fn normalize_trips(rows: &[RawTravelRow], gaz: &Gazetteer, cfg: &RouteCorrection) -> NormalizedTravel {
    let mut out = NormalizedTravel::default();
    let mut order: Vec<u32> = Vec::new();
    let mut groups: HashMap<u32, Vec<&RawTravelRow>> = HashMap::new();
    for r in rows {
        groups
            .entry(r.trip_number)
            .or_insert_with(|| {
                order.push(r.trip_number);
                Vec::new()
            })
            .push(r);
    }

    for number in order {
        let group = &groups[&number];
        let head = group[0];
        for r in &group[1..] {
            if r.purpose != head.purpose {
                out.warnings.push(RowError {
                    line: r.source_line,
                    reason: format!("trip {number} mixes travel purposes; keeping the first leg's value"),
                });
            }
            if r.status != head.status {
                out.warnings.push(RowError {
                    line: r.source_line,
                    reason: format!("trip {number} mixes agent statuses; keeping the first leg's value"),
                });
            }
        }
        let mut legs = Vec::with_capacity(group.len());
        for r in group {
            let from = gaz.resolve(&r.departure_city, &r.departure_country);
            let to = gaz.resolve(&r.destination_city, &r.destination_country);
            match (from, to) {
                (Ok(from), Ok(to)) => {
                    let gc = great_circle_km(from.point, to.point);
                    legs.push(TravelLeg {
                        mode: r.mode,
                        departure_date: Some(r.departure_date),
                        from_city: r.departure_city.clone(),
                        from_country: from.country,
                        from: from.point,
                        to_city: r.destination_city.clone(),
                        to_country: to.country,
                        to: to.point,
                        great_circle_km: gc,
                        corrected_km: cfg.corrected_distance(r.mode, gc),
                        round_trip: r.round_trip,
                        car_occupancy: r.car_occupancy,
                    });
                }
                (Err(e), _) | (_, Err(e)) => out.errors.push(RowError { line: r.source_line, reason: e.to_string() }),
            }
        }
        if !legs.is_empty() {
            out.trips.push(Trip {
                trip_number: number,
                legs,
                purpose: head.purpose.unwrap_or_default(),
                status: head.status,
            });
        }
    }
    out
}
