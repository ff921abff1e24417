//! Verification harness: residuals of the transformed equations along
//! geometric trajectories, co-evolution at constant curvature, refinement
//! studies and invariant reports.

mod commutation;
mod convergence;
mod invariants;
mod report;
mod residual;
mod scenarios;

pub use commutation::{commutation_error, commutation_error_with, CONSTANT_CURVATURE_TOLERANCE};
pub use convergence::{convergence_study, observed_orders, refinement_levels, RefinementLevel, ROUND_OFF_FLOOR};
pub use invariants::{filament_invariant_report, invariant_report};
pub use report::{Check, HypothesisFlags, NormSeries, ObservedOrders, OrderStatus, ScalarSeries, VerificationReport};
pub use residual::{
    default_reference, residual_t3rd, residual_t3rd_with, residual_t4th, residual_t4th_with, ResidualOptions,
    IDENTITY_TOLERANCE,
};
pub use scenarios::{commutation_convergence, residual_convergence, ResidualStudy, DEFAULT_EVAL_POINTS, REFINEMENT_BAND};
