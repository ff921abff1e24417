//! Refinement studies of the residual and commutation checks.

use super::commutation::commutation_error_with;
use super::convergence::{observed_orders, RefinementLevel, ROUND_OFF_FLOOR};
use super::report::VerificationReport;
use super::residual::{residual_t3rd_with, residual_t4th_with, Order, ResidualOptions};
use crate::error::{Error, Result};
use crate::flows::{evolve, EvolutionConfig, FlowParams};
use crate::geometry::MapField;
use crate::grid::Grid;

/// Acceptance band for successive error ratios when dx and dt are halved
/// under fourth-order schemes.
pub const REFINEMENT_BAND: (f64, f64) = (8.0, 32.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStudy {
    pub params: FlowParams,
    pub t_final: f64,
    /// Steps between snapshots, the same on every level.
    pub stride: usize,
    /// Times at which the residual is compared; `None` uses up to
    /// `DEFAULT_EVAL_POINTS` evenly spread interior snapshots of the coarsest level.
    pub eval_times: Option<Vec<f64>>,
    pub options: ResidualOptions,
}

impl ResidualStudy {
    pub fn new(params: FlowParams, t_final: f64, stride: usize) -> Self {
        Self { params, t_final, stride, eval_times: None, options: ResidualOptions::default() }
    }
}

/// Steps that divide the horizon exactly while keeping the level-to-level
/// ratios of the requested steps, so snapshot times coincide across levels.
fn aligned_steps(levels: &[RefinementLevel], t_final: f64) -> Vec<f64> {
    let base = (t_final / levels[0].dt).ceil().max(1.0);
    levels.iter().map(|l| t_final / (base * (levels[0].dt / l.dt)).round()).collect()
}

/// Number of comparison times picked when none are given.
pub const DEFAULT_EVAL_POINTS: usize = 5;

fn coarse_interior_times(times: &[f64]) -> Vec<f64> {
    if times.len() < 5 {
        return Vec::new();
    }
    let inner = &times[2..times.len() - 2];
    if inner.len() <= DEFAULT_EVAL_POINTS {
        return inner.to_vec();
    }
    (0..DEFAULT_EVAL_POINTS)
        .map(|k| inner[k * (inner.len() - 1) / (DEFAULT_EVAL_POINTS - 1)])
        .collect()
}

fn finish(mut report: VerificationReport, names: &[&str], table: &[Vec<f64>]) -> Result<VerificationReport> {
    for (name, errors) in names.iter().zip(table) {
        report.orders.push(observed_orders(name, errors, ROUND_OFF_FLOOR)?);
    }
    for key in ["modulus_gap", "orthonormality_defect", "parallelism_defect"] {
        let worst = report.details.iter().filter_map(|d| d.drift(key)).fold(0.0, f64::max);
        report.drifts.insert(key.into(), worst);
    }
    let flags = report.details.iter().filter_map(|d| d.flags).fold(None, |acc: Option<super::report::HypothesisFlags>, f| {
        Some(match acc {
            None => f,
            Some(a) => super::report::HypothesisFlags {
                decay_margin_satisfied: a.decay_margin_satisfied && f.decay_margin_satisfied,
                gauge_uncertain: a.gauge_uncertain || f.gauge_uncertain,
                margin_deviation: a.margin_deviation.max(f.margin_deviation),
                gauge_constant: a.gauge_constant.max(f.gauge_constant),
            },
        })
    });
    report.flags = flags;
    report.validate()?;
    Ok(report)
}

/// Residual of the transformed equation on each level; the recorded error is
/// the largest norm over the comparison times.
pub fn residual_convergence<F>(
    scenario: &str,
    levels: &[RefinementLevel],
    study: &ResidualStudy,
    initial: F,
) -> Result<VerificationReport>
where
    F: Fn(&Grid) -> Result<MapField>,
{
    if levels.len() < 3 {
        return Err(Error::Config(format!("a convergence study needs at least 3 levels, got {}", levels.len())));
    }
    let names = ["residual_l2", "residual_linf", "compatibility_l2"];
    let mut table = vec![Vec::new(); names.len()];
    let mut report = VerificationReport::new(scenario);
    let mut eval = study.eval_times.clone();
    let dts = aligned_steps(levels, study.t_final);
    for (level, dt) in levels.iter().zip(dts) {
        let u0 = initial(&level.grid)?;
        let config = EvolutionConfig::new(dt, study.t_final).with_stride(study.stride);
        let tr = evolve(&u0, &study.params, &config)?;
        let times = eval.get_or_insert_with(|| coarse_interior_times(&tr.times)).clone();
        let opts = ResidualOptions { eval_times: Some(times), ..study.options.clone() };
        let r = match Order::of(&study.params) {
            Order::Third { .. } => residual_t3rd_with(&tr, &study.params, &opts)?,
            Order::Fourth { .. } => residual_t4th_with(&tr, &study.params, &opts)?,
        };
        let res = r.series("residual").expect("residual series");
        let compat = r.series("compatibility").expect("compatibility series");
        table[0].push(res.max_l2());
        table[1].push(res.max_linf());
        table[2].push(compat.max_l2());
        report.details.push(r);
    }
    finish(report, &names, &table)
}

/// Commutation mismatch at the final time on each level.
pub fn commutation_convergence<F>(
    scenario: &str,
    levels: &[RefinementLevel],
    params: &FlowParams,
    t_final: f64,
    initial: F,
) -> Result<VerificationReport>
where
    F: Fn(&Grid) -> Result<MapField>,
{
    if levels.len() < 3 {
        return Err(Error::Config(format!("a convergence study needs at least 3 levels, got {}", levels.len())));
    }
    let names = ["mismatch_l2", "mismatch_linf"];
    let mut table = vec![Vec::new(); names.len()];
    let mut report = VerificationReport::new(scenario);
    for (level, dt) in levels.iter().zip(aligned_steps(levels, t_final)) {
        let u0 = initial(&level.grid)?;
        let stride = ((t_final / dt).round() as usize).max(1);
        let config = EvolutionConfig::new(dt, t_final).with_stride(stride);
        let r = commutation_error_with(&u0, params, &config, &ResidualOptions::default())?;
        table[0].push(r.drift("final_mismatch_l2").expect("recorded"));
        table[1].push(r.drift("final_mismatch_linf").expect("recorded"));
        report.details.push(r);
    }
    finish(report, &names, &table)
}
