//! Great-circle distances, route correction and flight haul classes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inventory::TravelMode;

/// Mean Earth radius used for every distance.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub latitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Error, PartialEq)]
#[error("coordinates out of range: latitude {latitude}, longitude {longitude}")]
pub struct InvalidCoordinates {
    pub latitude: f64,
    pub longitude: f64,
}

impl GeoPoint {
    /// Latitude in [-90, 90], longitude in (-180, 180].
    pub fn new(latitude: f64, longitude: f64) -> Result<Self, InvalidCoordinates> {
        let p = GeoPoint { latitude, longitude };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(InvalidCoordinates { latitude, longitude })
        }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.latitude) && self.longitude > -180.0 && self.longitude <= 180.0
    }
}

/// Haversine distance on a sphere of radius [`EARTH_RADIUS_KM`].
pub fn great_circle_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.latitude.to_radians(), b.latitude.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.longitude - a.longitude).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    // rounding can push h a hair above 1 for antipodes
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaulClass {
    Short,
    Medium,
    Long,
}

impl HaulClass {
    pub fn as_str(self) -> &'static str {
        match self {
            HaulClass::Short => "short",
            HaulClass::Medium => "medium",
            HaulClass::Long => "long",
        }
    }
}

/// Multiplier and additive detour applied to a great-circle distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uplift {
    pub multiplier: f64,
    pub additive_km: f64,
}

impl Uplift {
    pub const fn new(multiplier: f64, additive_km: f64) -> Self {
        Uplift { multiplier, additive_km }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RouteCorrectionError {
    #[error("uplift for {0:?} must have multiplier >= 1 and additive_km >= 0")]
    BadUplift(TravelMode),
    #[error("haul thresholds must satisfy 0 < short_max_km < medium_max_km")]
    BadThresholds,
}

/// Per-mode route uplifts and flight haul thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RouteCorrection {
    pub uplifts: BTreeMap<TravelMode, Uplift>,
    pub short_max_km: f64,
    pub medium_max_km: f64,
}

impl Default for RouteCorrection {
    fn default() -> Self {
        let uplifts = TravelMode::ALL
            .iter()
            .map(|&m| {
                let u = match m {
                    TravelMode::Plane => Uplift::new(1.0, 95.0),
                    TravelMode::Train | TravelMode::Rer | TravelMode::Streetcar | TravelMode::Metro => {
                        Uplift::new(1.2, 0.0)
                    }
                    TravelMode::Car | TravelMode::Taxi | TravelMode::Bus => Uplift::new(1.3, 0.0),
                    TravelMode::Ferry => Uplift::new(1.0, 0.0),
                };
                (m, u)
            })
            .collect();
        RouteCorrection { uplifts, short_max_km: 1000.0, medium_max_km: 3500.0 }
    }
}

impl RouteCorrection {
    pub fn validate(&self) -> Result<(), RouteCorrectionError> {
        for (&mode, u) in &self.uplifts {
            if !(u.multiplier >= 1.0 && u.multiplier.is_finite() && u.additive_km >= 0.0 && u.additive_km.is_finite()) {
                return Err(RouteCorrectionError::BadUplift(mode));
            }
        }
        if !(self.short_max_km > 0.0 && self.short_max_km < self.medium_max_km && self.medium_max_km.is_finite()) {
            return Err(RouteCorrectionError::BadThresholds);
        }
        Ok(())
    }

    /// Uplift for `mode`; modes missing from an override keep the identity.
    pub fn uplift(&self, mode: TravelMode) -> Uplift {
        self.uplifts.get(&mode).copied().unwrap_or(Uplift::new(1.0, 0.0))
    }

    pub fn corrected_distance(&self, mode: TravelMode, gc_km: f64) -> f64 {
        let u = self.uplift(mode);
        gc_km * u.multiplier + u.additive_km
    }

    /// Boundary values belong to the lower class.
    pub fn classify_haul(&self, corrected_km: f64) -> HaulClass {
        if corrected_km <= self.short_max_km {
            HaulClass::Short
        } else if corrected_km <= self.medium_max_km {
            HaulClass::Medium
        } else {
            HaulClass::Long
        }
    }
}

/// [`RouteCorrection::corrected_distance`] with the default parameters.
pub fn corrected_distance(mode: TravelMode, gc_km: f64) -> f64 {
    RouteCorrection::default().corrected_distance(mode, gc_km)
}

pub fn classify_haul(corrected_km: f64, cfg: &RouteCorrection) -> HaulClass {
    cfg.classify_haul(corrected_km)
}
