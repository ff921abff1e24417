use super::report::VerificationReport;
use super::residual::{default_reference, TransformDiagnostics};
use crate::error::Result;
use crate::flows::{FilamentTrajectory, Trajectory};
use crate::frame::{hasimoto_q, parallel_frame_projected};

/// Energy drift, sphere deviation and the per-slice transform identities of
/// a map trajectory.
pub fn invariant_report(trajectory: &Trajectory) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("invariants");
    report.drifts.insert("energy_drift".into(), trajectory.energy_drift());
    let sphere = trajectory.diagnostics.iter().map(|d| d.sphere_deviation).fold(0.0, f64::max);
    report.drifts.insert("sphere_deviation".into(), sphere);
    let reference = default_reference(&trajectory.states[0]);
    let mut diag = TransformDiagnostics::default();
    for u in &trajectory.states {
        let frame = parallel_frame_projected(u, reference)?;
        diag.add(&frame, &hasimoto_q(&frame)?)?;
    }
    diag.record(&mut report);
    report.validate()?;
    Ok(report)
}

/// The map-trajectory report of the tangent indicatrix plus arc-length drift.
pub fn filament_invariant_report(trajectory: &FilamentTrajectory) -> Result<VerificationReport> {
    let mut report = invariant_report(&trajectory.tangent_trajectory()?)?;
    report.scenario = "filament_invariants".into();
    let e0 = trajectory.diagnostics[0].energy;
    let scale = if e0 == 0.0 { 1.0 } else { e0 };
    let drift = trajectory.diagnostics.iter().map(|d| (d.energy - e0).abs() / scale).fold(0.0, f64::max);
    report.drifts.insert("energy_drift".into(), drift);
    let arc = trajectory.diagnostics.iter().filter_map(|d| d.arc_length_deviation).fold(0.0, f64::max);
    report.drifts.insert("arc_length_deviation".into(), arc);
    report.validate()?;
    Ok(report)
}
