//! Co-evolution at constant curvature: transform-then-evolve against
//! evolve-then-transform.

use super::report::{NormSeries, VerificationReport};
use super::residual::{default_reference, margin_flags, norms, Order, ResidualOptions, TransformDiagnostics};
use crate::error::{Error, Result};
use crate::flows::{evolve, EvolutionConfig, FlowParams};
use crate::frame::{hasimoto_q, parallel_frame_projected};
use crate::geometry::MapField;
use crate::grid::CumulativeRule;
use crate::reduced::{evolve_reduced, CurvatureTrace};

/// Tolerance for deciding that κ is constant along the initial data.
pub const CONSTANT_CURVATURE_TOLERANCE: f64 = 1e-12;

/// Path A evolves u and transforms each snapshot; path B transforms u0 and
/// evolves the reduced equation with the constant curvature of the target.
pub fn commutation_error(u0: &MapField, params: &FlowParams, config: &EvolutionConfig) -> Result<VerificationReport> {
    commutation_error_with(u0, params, config, &ResidualOptions::default())
}

pub fn commutation_error_with(
    u0: &MapField,
    params: &FlowParams,
    config: &EvolutionConfig,
    opts: &ResidualOptions,
) -> Result<VerificationReport> {
    let trace = CurvatureTrace::along(u0)?;
    let k0 = trace.kappa[0];
    if trace.kappa.iter().any(|k| (k - k0).abs() > CONSTANT_CURVATURE_TOLERANCE) {
        return Err(Error::Config("commutation check needs a constant-curvature target".into()));
    }
    let order = Order::of(params);
    let rparams = order.reduced(Some(k0), CumulativeRule::Trapezoid);
    let reference = opts.reference.unwrap_or_else(|| default_reference(u0));

    let path_a = evolve(u0, params, config)?;
    let mut diag = TransformDiagnostics::default();
    let mut q_a = Vec::with_capacity(path_a.len());
    for u in &path_a.states {
        let frame = parallel_frame_projected(u, reference)?;
        let q = hasimoto_q(&frame)?;
        diag.add(&frame, &q)?;
        q_a.push(q);
    }
    let path_b = evolve_reduced(&q_a[0], &rparams, config)?;
    if path_b.times.len() != path_a.times.len() {
        return Err(Error::Range("paths produced different snapshot schedules".into()));
    }

    let grid = u0.grid();
    let mut mismatch = NormSeries::new("mismatch");
    for ((t, a), b) in path_a.times.iter().zip(&q_a).zip(&path_b.states) {
        let d = a.difference(b)?;
        let (l2, li) = norms(grid, d.values());
        mismatch.push(*t, l2, li);
    }
    let mut report = VerificationReport::new("commutation");
    let states: Vec<&MapField> = path_a.states.iter().collect();
    report.flags = Some(margin_flags(&states, opts.margin_width, opts.margin_tolerance, 0.0));
    report.drifts.insert("final_mismatch_l2".into(), *mismatch.l2.last().expect("non-empty"));
    report.drifts.insert("final_mismatch_linf".into(), *mismatch.linf.last().expect("non-empty"));
    report.drifts.insert("reduced_mass_drift".into(), path_b.mass_drift());
    report.drifts.insert("energy_drift".into(), path_a.energy_drift());
    report.series.push(mismatch);
    diag.record(&mut report);
    report.validate()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ChartMetric, MetricPreset};
    use crate::grid::Grid;
    use crate::presets::{bump_chart, constant_sphere, BumpParams};
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    #[test]
    fn constant_data_agree_exactly() {
        let g = Grid::periodic(32, 0.0, 2.0 * PI).unwrap();
        let u0 = constant_sphere(&g, Vector3::new(0.0, 0.0, 1.0)).unwrap();
        let p = FlowParams::schrodinger_map();
        let r = commutation_error(&u0, &p, &EvolutionConfig::new(1e-3, 0.01)).unwrap();
        assert_eq!(r.series("mismatch").unwrap().max_linf(), 0.0);
    }

    #[test]
    fn nonconstant_curvature_is_rejected() {
        let g = Grid::periodic(64, 0.0, 2.0 * PI).unwrap();
        let m = ChartMetric::preset(MetricPreset::Perturbed { epsilon: 0.2 });
        let u0 = bump_chart(&g, m, &BumpParams::default()).unwrap();
        let p = FlowParams::schrodinger_map();
        assert!(matches!(commutation_error(&u0, &p, &EvolutionConfig::new(1e-3, 0.01)), Err(Error::Config(_))));
    }
}
