//! Parallel moving frames, generalized Hasimoto coordinates (q, p), the gauge
//! function α, Frenet data and the classical Hasimoto map.

mod frenet;
mod gauge;
mod hasimoto;
mod parallel;

pub use crate::complex::{ComplexField, ComplexJet};
pub use frenet::{classical_hasimoto, frenet_frame, frenet_frame_with, FrenetData, FRENET_EPSILON};
pub use gauge::{
    alpha_profile, alpha_profile_with, boundary_density_fourth, boundary_density_third, estimate_a,
    gauge_phase_removal, left_rotation_rate, GaugeEstimate, PhaseProfile,
};
pub use hasimoto::{hasimoto_p, hasimoto_q, p_from_q_fourth, p_from_q_third, tower_jet};
pub use parallel::{frame_components, parallel_frame, parallel_frame_projected, FrameField, TransportMethod};
