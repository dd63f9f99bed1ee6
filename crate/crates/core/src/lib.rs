//! Carbon-footprint estimation for research labs.
//!
//! Activity data (buildings, lab vehicles, commute surveys, professional
//! travel) is converted with a versioned emission-factor set into records
//! attributed to the 23 regulatory categories, then aggregated into the
//! regulatory table and the synthetic footprint.

pub mod demo;
pub mod engine;
pub mod factors;
pub mod geodesy;
pub mod ingestion;
pub mod inventory;
pub mod report;
pub mod sum;
pub mod text;
