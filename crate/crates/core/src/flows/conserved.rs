use serde::{Deserialize, Serialize};

use super::filament::FilamentState;
use crate::error::Result;
use crate::geometry::{pointwise_inner, MapField};

/// Snapshot diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    /// ∫ g(u_x, u_x) dx (for filaments, of the tangent map: ∫ |X_xx|² dx).
    pub energy: f64,
    /// max | |u| − 1 | (zero for chart maps).
    pub sphere_deviation: f64,
    /// max | |X_x| − 1 | for filaments.
    pub arc_length_deviation: Option<f64>,
}

pub fn conserved_quantities(u: &MapField) -> Result<ConservedQuantities> {
    let ux = u.velocity()?;
    let density = pointwise_inner(u, &ux, &ux)?;
    Ok(ConservedQuantities {
        energy: u.grid().integrate(&density),
        sphere_deviation: u.sphere_deviation(),
        arc_length_deviation: None,
    })
}

pub fn filament_conserved_quantities(x: &FilamentState) -> Result<ConservedQuantities> {
    let d = x.derivatives(2)?;
    let density: Vec<f64> = d[1].iter().map(|v| v.norm_squared()).collect();
    Ok(ConservedQuantities {
        energy: x.grid().integrate(&density),
        sphere_deviation: 0.0,
        arc_length_deviation: Some(d[0].iter().map(|t| (t.norm() - 1.0).abs()).fold(0.0, f64::max)),
    })
}
