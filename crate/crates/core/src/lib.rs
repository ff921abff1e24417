//! Numerical laboratory for one-dimensional dispersive flows into the
//! two-sphere and conformal-chart Riemann surfaces, the parallel-frame
//! Hasimoto transform, and the reduced complex equations it produces.

pub mod complex;
pub mod error;
pub mod flows;
pub mod frame;
pub mod geometry;
pub mod grid;
pub mod integrate;
pub mod presets;
pub mod reduced;
pub mod verify;

pub use complex::{ComplexField, ComplexJet};
pub use error::{Error, Result};
pub use grid::{Boundary, CumulativeRule, Grid, GridSpec};
