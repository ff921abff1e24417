//! Residual, invariant, commutation and refinement checks of a scenario.

use std::fmt::Write as _;
use std::path::Path;

use dispersive::flows::{evolve, EvolutionConfig, FlowKind, FlowParams, Trajectory};
use dispersive::geometry::MetricPreset;
use dispersive::verify::{
    commutation_error_with, filament_invariant_report, invariant_report, refinement_levels, residual_convergence,
    residual_t3rd_with, residual_t4th_with, HypothesisFlags, ResidualOptions, ResidualStudy, VerificationReport,
};
use dispersive::{Grid, GridSpec};
use serde::Serialize;

use crate::config::{ScenarioConfig, Target};
use crate::error::CliError;
use crate::files::{create_dir, read_trajectory, write_json, Run};
use crate::scenario::{self, Initial};

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub check: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub passed: bool,
    /// Trajectory source: `evolved` or the input directory.
    pub source: String,
    pub preset: String,
    pub flow: FlowParams,
    pub target: Target,
    pub grid: GridSpec,
    pub reports: Vec<VerificationReport>,
    pub skipped: Vec<Skipped>,
}

impl VerifyOutcome {
    pub fn report(&self, scenario: &str) -> Option<&VerificationReport> {
        self.reports.iter().find(|r| r.scenario == scenario)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "verification {}: {} from {} on {} points ({})\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.flow.kind.name(),
            self.preset,
            self.grid.n_points,
            self.source
        );
        for r in &self.reports {
            s.push_str(&r.summary());
        }
        for k in &self.skipped {
            let _ = writeln!(s, "skipped {}: {}", k.check, k.reason);
        }
        s
    }
}

fn fourth_order(params: &FlowParams) -> bool {
    params.as_map_flow().kind == FlowKind::FourthOrder
}

fn constant_curvature(target: &Target) -> bool {
    !matches!(target, Target::Chart { metric: MetricPreset::Perturbed { .. } })
}

/// Replaces the identity checks recorded at the library defaults by the configured ones.
fn identity_checks(report: &mut VerificationReport, tolerance: f64) {
    report.checks.retain(|c| c.name != "modulus_gap" && c.name != "orthonormality_defect");
    for key in ["modulus_gap", "orthonormality_defect"] {
        if let Some(v) = report.drift(key) {
            report.check_at_most(key, v, tolerance);
        }
    }
}

fn invariants(cfg: &ScenarioConfig, run: &Run) -> Result<VerificationReport, CliError> {
    let mut r = match run {
        Run::Map(tr) => invariant_report(tr)?,
        Run::Filament(tr) => filament_invariant_report(tr)?,
    };
    identity_checks(&mut r, cfg.verify.identity_tolerance);
    let drift = r.drift("energy_drift").unwrap_or(0.0);
    r.check_at_most("energy_drift", drift, cfg.verify.energy_tolerance);
    Ok(r)
}

fn residual_options(margin: f64) -> ResidualOptions {
    ResidualOptions { margin_width: margin, ..ResidualOptions::default() }
}

fn evolution(cfg: &ScenarioConfig, dt: f64, t_final: f64, stride: usize) -> EvolutionConfig {
    EvolutionConfig::new(dt, t_final).with_stride(stride).with_safety(1.0).with_projection(cfg.evolution.projection)
}

/// Folds per-window reports into one: series and scalars are concatenated,
/// drifts keep their maximum and flags combine conservatively.
fn merge(name: &str, parts: Vec<VerificationReport>) -> VerificationReport {
    let mut out = VerificationReport::new(name);
    for part in parts {
        for s in part.series {
            match out.series.iter_mut().find(|o| o.name == s.name) {
                Some(o) => {
                    o.times.extend(s.times);
                    o.l2.extend(s.l2);
                    o.linf.extend(s.linf);
                }
                None => out.series.push(s),
            }
        }
        for s in part.scalars {
            match out.scalars.iter_mut().find(|o| o.name == s.name) {
                Some(o) => {
                    o.times.extend(s.times);
                    o.values.extend(s.values);
                }
                None => out.scalars.push(s),
            }
        }
        for (k, v) in part.drifts {
            let e = out.drifts.entry(k).or_insert(v);
            *e = e.max(v);
        }
        out.flags = match (out.flags, part.flags) {
            (Some(a), Some(b)) => Some(HypothesisFlags {
                decay_margin_satisfied: a.decay_margin_satisfied && b.decay_margin_satisfied,
                gauge_uncertain: a.gauge_uncertain || b.gauge_uncertain,
                margin_deviation: a.margin_deviation.max(b.margin_deviation),
                gauge_constant: a.gauge_constant.max(b.gauge_constant),
            }),
            (a, b) => a.or(b),
        };
    }
    out
}

/// Snapshots at which residual windows start, spread over the trajectory.
fn window_starts(len: usize, windows: usize) -> Vec<usize> {
    let last = len.saturating_sub(1);
    let mut ks: Vec<usize> = (0..windows).map(|i| i * last / windows.max(1)).collect();
    ks.dedup();
    ks
}

/// Residual of the transformed equation on short windows of five snapshots,
/// each re-evolved from a stored snapshot with the trajectory's step.
fn residual(cfg: &ScenarioConfig, tr: &Trajectory, margin: f64) -> Result<VerificationReport, CliError> {
    let v = &cfg.verify;
    let opts = residual_options(margin);
    let span = 4 * v.residual_stride;
    let mut parts = Vec::new();
    for k in window_starts(tr.len(), v.residual_windows) {
        let mut w = evolve(&tr.states[k], &tr.params, &evolution(cfg, tr.dt, span as f64 * tr.dt, v.residual_stride))?;
        for t in w.times.iter_mut() {
            *t += tr.times[k];
        }
        let r = if fourth_order(&tr.params) {
            residual_t4th_with(&w, &tr.params, &opts)?
        } else {
            residual_t3rd_with(&w, &tr.params, &opts)?
        };
        parts.push(r);
    }
    let mut r = merge(if fourth_order(&tr.params) { "residual_t4th" } else { "residual_t3rd" }, parts);
    identity_checks(&mut r, v.identity_tolerance);
    let res = r.series("residual").expect("residual series");
    let rate = r.series("time_derivative").expect("time-derivative series");
    let relative = res.l2.iter().zip(&rate.l2).map(|(e, q)| e / q.max(1.0)).fold(0.0, f64::max);
    r.drifts.insert("relative_residual_l2".into(), relative);
    r.check_at_most("relative_residual_l2", relative, v.residual_tolerance);
    Ok(r)
}

fn commutation(cfg: &ScenarioConfig, tr: &Trajectory, margin: f64) -> Result<VerificationReport, CliError> {
    let t_final = cfg.verify.commutation_t_final;
    let steps = (t_final / tr.dt).ceil().max(1.0) as usize;
    let config = evolution(cfg, tr.dt, t_final, steps.div_ceil(10).max(1));
    let mut r = commutation_error_with(&tr.states[0], &tr.params, &config, &residual_options(margin))?;
    identity_checks(&mut r, cfg.verify.identity_tolerance);
    let relative = r.drift("final_mismatch_l2").unwrap_or(0.0) / initial_q_norm(tr).max(1.0);
    r.drifts.insert("relative_mismatch_l2".into(), relative);
    r.check_at_most("relative_mismatch_l2", relative, cfg.verify.commutation_tolerance);
    Ok(r)
}

/// L² norm of q(0), equal to the square root of the initial energy.
fn initial_q_norm(tr: &Trajectory) -> f64 {
    tr.diagnostics[0].energy.max(0.0).sqrt()
}

/// Refinement study of the configured scenario (independent of `verify.input`).
fn refinement(cfg: &ScenarioConfig) -> Result<VerificationReport, CliError> {
    let v = &cfg.verify;
    let grid = scenario::initial_data(cfg, &cfg.grid)?.grid().clone();
    let coarse = Grid::new(GridSpec { n_points: v.refinement_n0, ..grid.spec().clone() })?;
    let finest = coarse.refined(1 << (v.levels - 1))?;
    let dt0 = v.refinement_dt0.unwrap_or_else(|| scenario::step_for(cfg, &finest, None) * (1 << (v.levels - 1)) as f64);
    let levels = refinement_levels(&coarse, dt0, v.levels)?;
    let map_params = cfg.flow.as_map_flow();
    let mut study = ResidualStudy::new(map_params, v.refinement_t_final, v.refinement_stride);
    study.options = residual_options(cfg.margin);
    log::info!(
        "refinement: {} levels from {} points, dt0 {:.3e}, t_final {}",
        v.levels,
        v.refinement_n0,
        dt0,
        v.refinement_t_final
    );
    let mut r = residual_convergence("refinement", &levels, &study, |g| {
        match scenario::initial_data(cfg, g.spec()).map_err(|e| dispersive::Error::Config(e.to_string()))? {
            Initial::Map(u) => Ok(u),
            Initial::Filament(x) => x.tangent_map(),
        }
    })?;
    r.check_refinement("residual_l2", v.band.0, v.band.1)?;
    Ok(r)
}

/// Runs the enabled checks; writes report.json and summary.txt into `out`.
pub fn verify(cfg: &ScenarioConfig, out: &Path) -> Result<VerifyOutcome, CliError> {
    let (meta, run, source) = match &cfg.verify.input {
        Some(dir) => {
            let (meta, run) = read_trajectory(dir)?;
            (meta, run, dir.display().to_string())
        }
        None => {
            let (meta, run) = scenario::run(cfg)?;
            (meta, run, "evolved".to_string())
        }
    };
    let tangent;
    let tr = match &run {
        Run::Map(tr) => tr,
        Run::Filament(f) => {
            tangent = f.tangent_trajectory()?;
            &tangent
        }
    };

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    if cfg.verify.invariants {
        reports.push(invariants(cfg, &run)?);
    }
    if cfg.verify.residual {
        reports.push(residual(cfg, tr, meta.margin)?);
    }
    if cfg.verify.commutation {
        if constant_curvature(&meta.target) {
            reports.push(commutation(cfg, tr, meta.margin)?);
        } else {
            skipped.push(Skipped { check: "commutation".into(), reason: "target curvature is not constant".into() });
        }
    }
    if cfg.verify.refinement {
        reports.push(refinement(cfg)?);
    }
    let passed = reports.iter().all(VerificationReport::passed);
    let outcome = VerifyOutcome {
        passed,
        source,
        preset: meta.preset.clone(),
        flow: meta.flow,
        target: meta.target.clone(),
        grid: meta.grid.clone(),
        reports,
        skipped,
    };
    create_dir(out)?;
    write_json(&out.join(REPORT_FILE), &outcome)?;
    let path = out.join(SUMMARY_FILE);
    std::fs::write(&path, outcome.summary()).map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok(outcome)
}
