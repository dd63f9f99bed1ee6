//! Parsers for imported activity files and place resolution.

pub mod commute;
pub mod gazetteer;
pub mod travel;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use commute::{parse_commute_csv, write_commute_csv};
pub use gazetteer::{Gazetteer, PlaceError, ResolvedPlace};
pub use travel::{normalize_trips, parse_travel_tsv, write_travel_tsv, NormalizedTravel, RawTravelRow};

/// A rejected input row. Line numbers are 1-based and count every physical line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("document is not valid UTF-8 (byte offset {0})")]
    Encoding(usize),
    #[error("cannot write document: {0}")]
    Write(String),
}

fn decode(document: &[u8]) -> Result<&str, IngestError> {
    let text = std::str::from_utf8(document).map_err(|e| IngestError::Encoding(e.valid_up_to()))?;
    Ok(text.strip_prefix('\u{feff}').unwrap_or(text))
}
