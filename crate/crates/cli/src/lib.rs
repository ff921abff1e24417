//! Command-line front end: scenario files, trajectory files, transforms and
//! verification reports.

pub mod app;
pub mod config;
pub mod error;
pub mod files;
pub mod ini;
pub mod scenario;
pub mod transform;
pub mod verify;
