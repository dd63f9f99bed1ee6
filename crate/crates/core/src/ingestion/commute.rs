//! Commute survey CSV.
//!
//! Columns: `status, mode1, km1, mode2, km2, mode3, km3, days_per_week,
//! weeks_per_year`. Distances are one-way and respondent-reported; blank mode
//! slots are skipped.

use super::{decode, IngestError, RowError};
use crate::inventory::{CommuteLeg, CommuteMode, CommuteResponse, MemberStatus};

pub const COMMUTE_HEADER: [&str; 9] =
    ["status", "mode1", "km1", "mode2", "km2", "mode3", "km3", "days_per_week", "weeks_per_year"];

const MAX_LEGS: usize = 3;

fn number(s: &str, what: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("bad {what} '{}', expected a number", s.trim()))
}

fn parse_record(rec: &csv::StringRecord) -> Result<CommuteResponse, String> {
    if rec.len() != COMMUTE_HEADER.len() {
        return Err(format!("expected {} comma-separated columns, found {}", COMMUTE_HEADER.len(), rec.len()));
    }
    let status = MemberStatus::from_label(&rec[0])
        .ok_or_else(|| format!("unknown status '{}', allowed: {}", rec[0].trim(), MemberStatus::allowed()))?;
    let mut legs = Vec::new();
    for slot in 0..MAX_LEGS {
        let (mode, km) = (rec[1 + 2 * slot].trim(), rec[2 + 2 * slot].trim());
        if mode.is_empty() {
            if !km.is_empty() {
                return Err(format!("distance given for empty mode slot {}", slot + 1));
            }
            continue;
        }
        let mode = CommuteMode::from_label(mode)
            .ok_or_else(|| format!("unknown commute mode '{mode}', allowed: {}", CommuteMode::allowed()))?;
        let one_way_km = number(km, &format!("km{}", slot + 1))?;
        if one_way_km <= 0.0 {
            return Err(format!("km{} must be > 0", slot + 1));
        }
        legs.push(CommuteLeg { mode, one_way_km });
    }
    if legs.is_empty() {
        return Err("no commute leg given".into());
    }
    let days_per_week = number(&rec[7], "days_per_week")?;
    if !(0.0..=7.0).contains(&days_per_week) {
        return Err(format!("days_per_week {days_per_week} outside [0, 7]"));
    }
    let weeks_per_year = number(&rec[8], "weeks_per_year")?;
    if !(0.0..=52.0).contains(&weeks_per_year) {
        return Err(format!("weeks_per_year {weeks_per_year} outside [0, 52]"));
    }
    Ok(CommuteResponse { status, legs, days_per_week, weeks_per_year })
}

/// Parses a commute survey export with per-row error recovery.
///
/// A first record whose first column reads `status` is taken as the header.
pub fn parse_commute_csv(document: &[u8]) -> Result<(Vec<CommuteResponse>, Vec<RowError>), IngestError> {
    let text = decode(document)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut responses = Vec::new();
    let mut errors = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut first = true;
    loop {
        let line = reader.position().line() as usize;
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map(|p| p.line() as usize).unwrap_or(line);
                if record.iter().all(|f| f.trim().is_empty()) {
                    continue;
                }
                if std::mem::take(&mut first) && record[0].trim().eq_ignore_ascii_case("status") {
                    continue;
                }
                match parse_record(&record) {
                    Ok(r) => responses.push(r),
                    Err(reason) => errors.push(RowError { line, reason }),
                }
            }
            Err(e) => {
                first = false;
                errors.push(RowError { line, reason: e.to_string() });
            }
        }
    }
    Ok((responses, errors))
}

/// Writes responses in the import format. Responses with more than three
/// legs cannot be represented and are rejected.
pub fn write_commute_csv(responses: &[CommuteResponse]) -> Result<String, IngestError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| IngestError::Write(e.to_string());
    w.write_record(COMMUTE_HEADER).map_err(io)?;
    for (i, r) in responses.iter().enumerate() {
        if r.legs.len() > MAX_LEGS {
            return Err(IngestError::Write(format!("response {i} has {} legs, at most {MAX_LEGS} fit", r.legs.len())));
        }
        let mut cols = vec![r.status.label().to_owned()];
        for slot in 0..MAX_LEGS {
            match r.legs.get(slot) {
                Some(l) => {
                    cols.push(l.mode.label().to_owned());
                    cols.push(l.one_way_km.to_string());
                }
                None => cols.extend([String::new(), String::new()]),
            }
        }
        cols.push(r.days_per_week.to_string());
        cols.push(r.weeks_per_year.to_string());
        w.write_record(&cols).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| IngestError::Write(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| IngestError::Write(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_car_leg() {
        let (r, e) = parse_commute_csv(b"Doc-Post doc,Voiture,10,,,,,4,44").unwrap();
        assert!(e.is_empty(), "{e:?}");
        assert_eq!(
            r,
            vec![CommuteResponse {
                status: MemberStatus::PhdPostdoc,
                legs: vec![CommuteLeg { mode: CommuteMode::Car, one_way_km: 10.0 }],
                days_per_week: 4.0,
                weeks_per_year: 44.0,
            }]
        );
    }

    #[test]
    fn out_of_range_days() {
        let (r, e) = parse_commute_csv(b"status,mode1,km1,mode2,km2,mode3,km3,days_per_week,weeks_per_year\nITA,Bus,5,,,,,9,44\n")
            .unwrap();
        assert!(r.is_empty());
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].line, 2);
        assert!(e[0].reason.contains("days_per_week"));
    }

    #[test]
    fn header_only() {
        let doc = format!("{}\n", COMMUTE_HEADER.join(","));
        assert_eq!(parse_commute_csv(doc.as_bytes()).unwrap(), (vec![], vec![]));
        assert_eq!(parse_commute_csv(b"").unwrap(), (vec![], vec![]));
    }

    #[test]
    fn multimodal_and_quoted() {
        let doc = "status,mode1,km1,mode2,km2,mode3,km3,days_per_week,weeks_per_year\n\
                   \"Personne invitée\",Vélo,2.5,RER,18,Marche,0.5,5,40\n";
        let (r, e) = parse_commute_csv(doc.as_bytes()).unwrap();
        assert!(e.is_empty(), "{e:?}");
        assert_eq!(r[0].legs.len(), 3);
        assert_eq!(r[0].legs[1].mode, CommuteMode::Rer);
        assert_eq!(r[0].legs[2].mode, CommuteMode::Walk);
    }

    #[test]
    fn row_errors_do_not_abort() {
        let doc = "ITA,Bus,5,,,,,4,44\nITA,Bus,abc,,,,,4,44\nITA,,,,,,,4,44\nITA,Bus,5,,,,\nNobody,Bus,5,,,,,4,44\nITA,Bus,5,,,,,4,53\nITA,Bus,-1,,,,,4,44\nITA,Tramway,3,,,,,4,44\n";
        let (r, e) = parse_commute_csv(doc.as_bytes()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(e.iter().map(|e| e.line).collect::<Vec<_>>(), [2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn too_many_legs_cannot_be_written() {
        let leg = CommuteLeg { mode: CommuteMode::Walk, one_way_km: 1.0 };
        let r = CommuteResponse { status: MemberStatus::Guest, legs: vec![leg; 4], days_per_week: 1.0, weeks_per_year: 1.0 };
        assert!(write_commute_csv(&[r]).is_err());
    }
}
