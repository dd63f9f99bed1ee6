//! Offline city and country lookup.
//!
//! Cities are read from a six-column TSV (`name, asciiname, country_code,
//! latitude, longitude, population`) or from a raw GeoNames dump
//! (`cities15000.txt` style, 19 columns). Country names come from a separate
//! table of ISO 3166 codes with English and French names plus aliases.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::geodesy::GeoPoint;
use crate::text::fold;

pub const BUNDLED_GAZETTEER: &str = include_str!("../../data/gazetteer.tsv");
pub const BUNDLED_COUNTRIES: &str = include_str!("../../data/countries.tsv");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GazetteerError {
    #[error("gazetteer line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaceError {
    #[error("unknown place '{city}' in {country}")]
    UnknownPlace { city: String, country: String },
    #[error("unknown country '{0}'")]
    UnknownCountry(String),
    #[error("ambiguous country '{name}': matches {candidates}")]
    AmbiguousCountry { name: String, candidates: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GazetteerEntry {
    pub name: String,
    pub country: String,
    pub point: GeoPoint,
    pub population: u64,
}

/// A city resolved to coordinates and an ISO 3166 alpha-2 country code.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPlace {
    pub name: String,
    pub country: String,
    pub point: GeoPoint,
}

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    cities: HashMap<(String, String), GazetteerEntry>,
    codes: BTreeSet<String>,
    country_names: BTreeMap<String, BTreeSet<String>>,
}

impl Gazetteer {
    /// Bundled extract of about five thousand cities.
    pub fn bundled() -> Self {
        let mut g = Gazetteer::default();
        g.add_countries(BUNDLED_COUNTRIES).expect("bundled country table is valid");
        g.add_cities(BUNDLED_GAZETTEER).expect("bundled gazetteer is valid");
        g
    }

    /// Bundled country table with cities taken from `cities_tsv`.
    pub fn with_cities(cities_tsv: &str) -> Result<Self, GazetteerError> {
        let mut g = Gazetteer::default();
        g.add_countries(BUNDLED_COUNTRIES)?;
        g.add_cities(cities_tsv)?;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.cities.values().map(|e| (&e.name, &e.country)).collect::<BTreeSet<_>>().len()
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    /// Adds rows from either supported city format. Duplicate names within a
    /// country keep the most populous entry.
    pub fn add_cities(&mut self, tsv: &str) -> Result<(), GazetteerError> {
        for (i, line) in tsv.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let (name, ascii, cc, lat, lon, pop) = match cols.len() {
                6 => (cols[0], cols[1], cols[2], cols[3], cols[4], cols[5]),
                n if n >= 15 => (cols[1], cols[2], cols[8], cols[4], cols[5], cols[14]),
                n => {
                    return Err(GazetteerError::Malformed { line: line_no, reason: format!("expected 6 columns, found {n}") })
                }
            };
            if line_no == 1 && cc == "country_code" {
                continue;
            }
            let bad = |what: &str| GazetteerError::Malformed { line: line_no, reason: format!("bad {what}") };
            let lat: f64 = lat.trim().parse().map_err(|_| bad("latitude"))?;
            let lon: f64 = lon.trim().parse().map_err(|_| bad("longitude"))?;
            let point = GeoPoint::new(lat, if lon == -180.0 { 180.0 } else { lon }).map_err(|_| bad("coordinates"))?;
            let population: u64 = if pop.trim().is_empty() { 0 } else { pop.trim().parse().map_err(|_| bad("population"))? };
            let country = cc.trim().to_ascii_uppercase();
            if country.len() != 2 {
                return Err(bad("country code"));
            }
            let entry = GazetteerEntry { name: name.trim().to_owned(), country: country.clone(), point, population };
            self.codes.insert(country.clone());
            for key in [fold(name), fold(ascii)] {
                if key.is_empty() {
                    continue;
                }
                let slot = (country.clone(), key);
                match self.cities.get(&slot) {
                    Some(existing) if existing.population >= population => {}
                    _ => {
                        self.cities.insert(slot, entry.clone());
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds rows of `code, name_en, name_fr, aliases` (aliases `|`-separated).
    pub fn add_countries(&mut self, tsv: &str) -> Result<(), GazetteerError> {
        for (i, line) in tsv.lines().enumerate() {
            if i == 0 && line.starts_with("code\t") || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 3 {
                return Err(GazetteerError::Malformed { line: i + 1, reason: "expected at least 3 columns".into() });
            }
            let code = cols[0].trim().to_ascii_uppercase();
            self.codes.insert(code.clone());
            let aliases = cols.get(3).map(|s| s.split('|').collect::<Vec<_>>()).unwrap_or_default();
            for name in [cols[1], cols[2]].into_iter().chain(aliases) {
                let key = fold(name);
                if !key.is_empty() {
                    self.country_names.entry(key).or_default().insert(code.clone());
                }
            }
        }
        Ok(())
    }

    /// Accepts an ISO 3166 alpha-2 code or an English/French country name.
    pub fn resolve_country(&self, country: &str) -> Result<String, PlaceError> {
        let trimmed = country.trim();
        if trimmed.len() == 2 && trimmed.chars().all(|c| c.is_ascii_alphabetic()) {
            let code = trimmed.to_ascii_uppercase();
            if self.codes.contains(&code) {
                return Ok(code);
            }
        }
        match self.country_names.get(&fold(trimmed)) {
            Some(codes) if codes.len() == 1 => Ok(codes.iter().next().cloned().unwrap_or_default()),
            Some(codes) => Err(PlaceError::AmbiguousCountry {
                name: trimmed.to_owned(),
                candidates: codes.iter().cloned().collect::<Vec<_>>().join(", "),
            }),
            None => Err(PlaceError::UnknownCountry(trimmed.to_owned())),
        }
    }

    pub fn resolve(&self, city: &str, country: &str) -> Result<ResolvedPlace, PlaceError> {
        let code = self.resolve_country(country)?;
        self.cities
            .get(&(code.clone(), fold(city)))
            .map(|e| ResolvedPlace { name: e.name.clone(), country: e.country.clone(), point: e.point })
            .ok_or_else(|| PlaceError::UnknownPlace { city: city.trim().to_owned(), country: code })
    }

    pub fn resolve_place(&self, city: &str, country: &str) -> Result<GeoPoint, PlaceError> {
        self.resolve(city, country).map(|p| p.point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toulouse() {
        let g = Gazetteer::bundled();
        let p = g.resolve_place("Toulouse", "FR").unwrap();
        assert!((p.latitude - 43.60).abs() < 0.01 && (p.longitude - 1.44).abs() < 0.01, "{p:?}");
        assert_eq!(g.resolve_place("toulouse ", "France").unwrap(), p);
        assert_eq!(g.resolve_place("TOULOUSE", "fr").unwrap(), p);
    }

    #[test]
    fn unknown_and_ambiguous() {
        let g = Gazetteer::bundled();
        assert!(matches!(g.resolve_place("Atlantis", "FR"), Err(PlaceError::UnknownPlace { .. })));
        assert!(matches!(g.resolve_place("Paris", "Narnia"), Err(PlaceError::UnknownCountry(_))));
        match g.resolve_place("Seoul", "Korea") {
            Err(PlaceError::AmbiguousCountry { candidates, .. }) => assert_eq!(candidates, "KP, KR"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn french_and_english_country_names() {
        let g = Gazetteer::bundled();
        assert_eq!(g.resolve_country("Allemagne").unwrap(), "DE");
        assert_eq!(g.resolve_country("Germany").unwrap(), "DE");
        assert_eq!(g.resolve_country("Etats-Unis").unwrap(), "US");
        assert_eq!(g.resolve_country("royaume uni").unwrap(), "GB");
    }

    #[test]
    fn accents_hyphens_and_exonyms() {
        let g = Gazetteer::bundled();
        let a = g.resolve_place("Saint-Étienne", "FR").unwrap();
        assert_eq!(g.resolve_place("saint etienne", "France").unwrap(), a);
        assert_eq!(g.resolve_place("New York", "US").unwrap(), g.resolve_place("New York City", "US").unwrap());
        assert_eq!(g.resolve_place("Londres", "Royaume-Uni").unwrap(), g.resolve_place("London", "GB").unwrap());
        assert_eq!(g.resolve_place("Munchen", "DE").unwrap(), g.resolve_place("Munich", "DE").unwrap());
    }

    #[test]
    fn ties_go_to_the_most_populous() {
        let cities = "name\tasciiname\tcountry_code\tlatitude\tlongitude\tpopulation\n\
                      Springfield\tSpringfield\tUS\t39.8\t-89.6\t114000\n\
                      Springfield\tSpringfield\tUS\t42.1\t-72.5\t155000\n\
                      Springfield\tSpringfield\tUS\t37.2\t-93.3\t169000\n";
        let g = Gazetteer::with_cities(cities).unwrap();
        assert_eq!(g.resolve_place("Springfield", "US").unwrap(), GeoPoint::new(37.2, -93.3).unwrap());
        // Paris FR is the city, not one of its arrondissements
        let b = Gazetteer::bundled();
        assert!((b.resolve_place("Paris", "FR").unwrap().latitude - 48.853).abs() < 1e-3);
    }

    #[test]
    fn geonames_dump_rows() {
        let row = "2972315\tToulouse\tToulouse\tTolosa\t43.60426\t1.44367\tP\tPPLA\tFR\t\t76\t31\t313\t31555\t433055\t\t146\tEurope/Paris\t2024-01-01";
        let g = Gazetteer::with_cities(row).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.resolve_place("toulouse", "FR").is_ok());
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(Gazetteer::with_cities("a\tb\tFR\tx\t1\t2").is_err());
        assert!(Gazetteer::with_cities("a\tb\tFR\t1").is_err());
        assert!(Gazetteer::with_cities("a\tb\tFR\t95\t1\t2").is_err());
    }

    #[test]
    fn bundled_size() {
        let g = Gazetteer::bundled();
        assert!(g.len() > 4000, "{}", g.len());
    }
}
