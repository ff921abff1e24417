//! Geometric dispersive flows: right-hand sides, filament form, time
//! integration and conserved quantities.

mod conserved;
mod evolve;
mod filament;
mod params;
mod rhs;

pub use conserved::{conserved_quantities, filament_conserved_quantities, ConservedQuantities};
pub use evolve::{evolve, evolve_filament, EvolutionConfig, FilamentTrajectory, Projection, Scheme, Trajectory};
pub use filament::{rhs_filament_fourth, rhs_filament_third, FilamentState, ARC_LENGTH_TOLERANCE};
pub use params::{coefficient_map_f, coefficient_map_fm, FlowKind, FlowParams};
pub use rhs::{
    map_rhs, rhs_fourth_order, rhs_fourth_order_extrinsic, rhs_third_order, rhs_third_order_extrinsic,
};
