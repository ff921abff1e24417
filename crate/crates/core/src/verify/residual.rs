//! Residuals of the transformed equations along geometric trajectories.

use nalgebra::Vector3;
use num_complex::Complex64;

use super::report::{HypothesisFlags, NormSeries, ScalarSeries, VerificationReport};
use crate::complex::{ComplexField, ComplexJet};
use crate::error::{Error, Result};
use crate::flows::{FlowKind, FlowParams, Trajectory};
use crate::frame::{
    alpha_profile_with, boundary_density_fourth, boundary_density_third, hasimoto_q, left_rotation_rate,
    p_from_q_fourth, p_from_q_third, parallel_frame_projected, tower_jet, FrameField,
};
use crate::geometry::{pointwise_inner, MapField, Point, Tangent};
use crate::grid::{CumulativeRule, Grid};
use crate::reduced::{apply_gauge, reduced_rhs_jet, CurvatureTrace, ReducedParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance for the pointwise transform identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualOptions {
    /// Quadrature for the nonlocal brackets and α.
    pub rule: CumulativeRule,
    /// Width of the end intervals inspected for the decay margin.
    pub margin_width: f64,
    pub margin_tolerance: f64,
    /// Anchor reference; `None` picks a coordinate axis far from u(x_left).
    pub reference: Option<Tangent>,
    /// Restrict evaluation to these snapshot times.
    pub eval_times: Option<Vec<f64>>,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { rule: CumulativeRule::Cubic, margin_width: 0.5, margin_tolerance: 1e-10, reference: None, eval_times: None }
    }
}

/// Map-form coefficients of a flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Order {
    Third { a: f64, b: f64 },
    Fourth { a: f64, b: f64, c: f64 },
}

impl Order {
    pub(crate) fn of(params: &FlowParams) -> Self {
        let m = params.as_map_flow();
        match m.kind {
            FlowKind::FourthOrder | FlowKind::FilamentFourth => Order::Fourth { a: m.a, b: m.b, c: m.c },
            _ => Order::Third { a: m.a, b: m.b },
        }
    }

    fn depth(self) -> usize {
        match self {
            Order::Third { .. } => 3,
            Order::Fourth { .. } => 4,
        }
    }

    pub(crate) fn reduced(self, kappa: Option<f64>, rule: CumulativeRule) -> ReducedParams {
        let k = kappa.unwrap_or(1.0);
        let p = match self {
            Order::Third { a, b } if a == 0.0 && b == 0.0 && kappa.is_some() => ReducedParams::schrodinger_reduced(k),
            Order::Third { a, b } => ReducedParams::t3rd(a, b, k),
            Order::Fourth { a, b, c } => ReducedParams::t4th(a, b, c, k),
        };
        if kappa.is_some() {
            p
        } else {
            p.with_field(rule)
        }
    }

    fn density(self, jet: &ComplexJet) -> Result<Vec<f64>> {
        match self {
            Order::Third { a, .. } => boundary_density_third(jet, a),
            Order::Fourth { a, b, c } => boundary_density_fourth(jet, a, b, c),
        }
    }

    fn p_and_px(self, jet: &ComplexJet) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let n = jet.len();
        match self {
            Order::Third { a, b } => {
                let p = p_from_q_third(jet, a, b)?;
                let px = (0..n)
                    .map(|k| {
                        let (q0, q1, q2, q3) = (jet.q()[k], jet.level(1)[k], jet.level(2)[k], jet.level(3)[k]);
                        let m = q0.norm_sqr();
                        let mx = 2.0 * (q0.conj() * q1).re;
                        q3 * a + I * q2 + (q0 * mx + q1 * m) * b
                    })
                    .collect();
                Ok((p, px))
            }
            Order::Fourth { a, b, c } => {
                let p = p_from_q_fourth(jet, a, b, c)?;
                let px = (0..n)
                    .map(|k| {
                        let (q0, q1, q2, q4) = (jet.q()[k], jet.level(1)[k], jet.level(2)[k], jet.level(4)[k]);
                        let m = q0.norm_sqr();
                        let mx = 2.0 * (q0.conj() * q1).re;
                        let mxx = 2.0 * q1.norm_sqr() + 2.0 * (q0.conj() * q2).re;
                        let minus_i_px = q2 - q4 * a + (q1 * mx + q2 * m) * b + (q0 * mxx + q1 * mx) * (0.5 * c);
                        I * minus_i_px
                    })
                    .collect();
                Ok((p, px))
            }
        }
    }
}

/// A fixed anchor reference for `u`: the coordinate axis most nearly tangent
/// at the left end, ties going to z, then x (sphere), or the real direction (chart).
pub fn default_reference(u: &MapField) -> Tangent {
    match u.point(0) {
        Point::Sphere(p) => {
            let axes = [Vector3::z(), Vector3::x(), Vector3::y()];
            let best = axes
                .iter()
                .min_by(|a, b| a.dot(&p).abs().total_cmp(&b.dot(&p).abs()))
                .copied()
                .unwrap_or_else(Vector3::z);
            Tangent::Sphere(best)
        }
        Point::Chart(_) => Tangent::Chart(Complex64::new(1.0, 0.0)),
    }
}

pub(crate) fn norms(grid: &Grid, r: &[Complex64]) -> (f64, f64) {
    let sq: Vec<f64> = r.iter().map(|v| v.norm_sqr()).collect();
    (grid.integrate(&sq).max(0.0).sqrt(), r.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Largest ||q|² − g(u_x,u_x)| on a slice.
pub(crate) fn modulus_gap(frame: &FrameField, q: &ComplexField) -> Result<f64> {
    let u = frame.base();
    let ux = u.velocity()?;
    let g = pointwise_inner(u, &ux, &ux)?;
    Ok(q.values().iter().zip(&g).map(|(q, g)| (q.norm_sqr() - g).abs()).fold(0.0, f64::max))
}

/// Frame-derived data of one snapshot.
struct Slice {
    frame: FrameField,
    jet: ComplexJet,
    trace: CurvatureTrace,
}

/// Transform diagnostics accumulated over the slices that were built.
#[derive(Default)]
pub(crate) struct TransformDiagnostics {
    pub modulus_gap: f64,
    pub orthonormality: f64,
    pub parallelism: f64,
    pub renormalization: f64,
}

impl TransformDiagnostics {
    pub(crate) fn add(&mut self, frame: &FrameField, q: &ComplexField) -> Result<()> {
        self.modulus_gap = self.modulus_gap.max(modulus_gap(frame, q)?);
        self.orthonormality = self.orthonormality.max(frame.orthonormality_defect());
        self.parallelism = self.parallelism.max(frame.parallelism_defect()?);
        self.renormalization = self.renormalization.max(frame.renormalization());
        Ok(())
    }

    pub(crate) fn record(&self, report: &mut VerificationReport) {
        report.drifts.insert("modulus_gap".into(), self.modulus_gap);
        report.drifts.insert("orthonormality_defect".into(), self.orthonormality);
        report.drifts.insert("parallelism_defect".into(), self.parallelism);
        report.drifts.insert("frame_renormalization".into(), self.renormalization);
        report.check_at_most("modulus_gap", self.modulus_gap, IDENTITY_TOLERANCE);
        report.check_at_most("orthonormality_defect", self.orthonormality, IDENTITY_TOLERANCE);
    }
}

pub(crate) fn margin_flags(states: &[&MapField], width: f64, tolerance: f64, gauge: f64) -> HypothesisFlags {
    let dev = states.iter().map(|u| u.margin_deviation(width)).fold(0.0, f64::max);
    let ok = dev <= tolerance;
    HypothesisFlags { decay_margin_satisfied: ok, gauge_uncertain: !ok, margin_deviation: dev, gauge_constant: gauge }
}

/// Residual of the third-order transformed equation along a (pde3) trajectory.
pub fn residual_t3rd(trajectory: &Trajectory, params: &FlowParams) -> Result<VerificationReport> {
    residual_t3rd_with(trajectory, params, &ResidualOptions::default())
}

pub fn residual_t3rd_with(trajectory: &Trajectory, params: &FlowParams, opts: &ResidualOptions) -> Result<VerificationReport> {
    match Order::of(params) {
        o @ Order::Third { .. } => residual(trajectory, o, opts, "residual_t3rd"),
        _ => Err(Error::Config(format!("residual_t3rd needs a third-order flow, got {}", params.kind.name()))),
    }
}

/// Residual of the fourth-order transformed equation along a (pde4) trajectory.
pub fn residual_t4th(trajectory: &Trajectory, params: &FlowParams) -> Result<VerificationReport> {
    residual_t4th_with(trajectory, params, &ResidualOptions::default())
}

pub fn residual_t4th_with(trajectory: &Trajectory, params: &FlowParams, opts: &ResidualOptions) -> Result<VerificationReport> {
    match Order::of(params) {
        o @ Order::Fourth { .. } => residual(trajectory, o, opts, "residual_t4th"),
        _ => Err(Error::Config(format!("residual_t4th needs a fourth-order flow, got {}", params.kind.name()))),
    }
}

fn uniform_window(times: &[f64], j: usize) -> Option<f64> {
    if j < 2 || j + 2 >= times.len() {
        return None;
    }
    let d = times[j + 1] - times[j];
    let ok = (j - 2..j + 2).all(|k| ((times[k + 1] - times[k]) - d).abs() <= 1e-9 * d);
    (ok && d > 0.0).then_some(d)
}

fn residual(trajectory: &Trajectory, order: Order, opts: &ResidualOptions, name: &str) -> Result<VerificationReport> {
    let states = &trajectory.states;
    let times = &trajectory.times;
    let grid = trajectory.grid().clone();
    let reference = opts.reference.unwrap_or_else(|| default_reference(&states[0]));
    let rparams = order.reduced(None, opts.rule);

    let centres: Vec<(usize, f64)> = (0..times.len())
        .filter_map(|j| uniform_window(times, j).map(|d| (j, d)))
        .filter(|(j, _)| match &opts.eval_times {
            Some(ts) => ts.iter().any(|t| (t - times[*j]).abs() <= 1e-9 * t.abs().max(1e-12)),
            None => true,
        })
        .collect();
    if centres.is_empty() {
        return Err(Error::Config(
            "no evaluation time has two uniformly spaced snapshots on each side; lower the snapshot stride".into(),
        ));
    }

    let mut slices: Vec<Option<Slice>> = (0..states.len()).map(|_| None).collect();
    let mut diag = TransformDiagnostics::default();
    let mut build = |k: usize, slices: &mut Vec<Option<Slice>>| -> Result<()> {
        if slices[k].is_none() {
            let frame = parallel_frame_projected(&states[k], reference)?;
            let jet = tower_jet(&frame, order.depth())?;
            let trace = CurvatureTrace::along(&states[k])?;
            diag.add(&frame, &hasimoto_q(&frame)?)?;
            slices[k] = Some(Slice { frame, jet, trace });
        }
        Ok(())
    };

    let mut corrected = NormSeries::new("residual");
    let mut naive = NormSeries::new("residual_uncorrected");
    let mut compat = NormSeries::new("compatibility");
    let mut rate_norms = NormSeries::new("time_derivative");
    let mut gauge = ScalarSeries { name: "gauge_constant".into(), times: vec![], values: vec![] };
    let mut rotation = ScalarSeries { name: "rotation_rate".into(), times: vec![], values: vec![] };
    let mut used: Vec<&MapField> = Vec::new();

    for &(j, d) in &centres {
        for k in j - 2..=j + 2 {
            build(k, &mut slices)?;
        }
        let s = |k: usize| slices[k].as_ref().expect("built above");
        let q_at = |k: usize| s(k).jet.q();
        let n = grid.len();
        let q_t: Vec<Complex64> = (0..n)
            .map(|i| (q_at(j - 2)[i] - q_at(j - 1)[i] * 8.0 + q_at(j + 1)[i] * 8.0 - q_at(j + 2)[i]) / (12.0 * d))
            .collect();
        let r1 = left_rotation_rate(&s(j - 1).frame, &s(j + 1).frame, 2.0 * d)?;
        let r2 = left_rotation_rate(&s(j - 2).frame, &s(j + 2).frame, 4.0 * d)?;
        let rate = (4.0 * r1 - r2) / 3.0;

        let here = s(j);
        let q = q_at(j);
        let f = order.density(&here.jet)?;
        let a_eff = rate - here.trace.kappa[0] * f[0];

        let rhs = reduced_rhs_jet(&here.jet, &rparams, Some(&here.trace), &grid)?;
        let raw: Vec<Complex64> = q_t.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let mut rhs_g = rhs.clone();
        apply_gauge(&mut rhs_g, q, a_eff);
        let fixed: Vec<Complex64> = q_t.iter().zip(&rhs_g).map(|(a, b)| a - b).collect();

        let (p, px) = order.p_and_px(&here.jet)?;
        let qf = ComplexField::new(grid.clone(), q.to_vec())?;
        let alpha = alpha_profile_with(&qf, &p, &here.trace.kappa, rate, opts.rule)?;
        let ident: Vec<Complex64> =
            (0..n).map(|i| px[i] - q_t[i] - I * alpha.alpha[i] * q[i]).collect();

        let t = times[j];
        let (l2, li) = norms(&grid, &fixed);
        corrected.push(t, l2, li);
        let (l2, li) = norms(&grid, &raw);
        naive.push(t, l2, li);
        let (l2, li) = norms(&grid, &ident);
        compat.push(t, l2, li);
        let (l2, li) = norms(&grid, &q_t);
        rate_norms.push(t, l2, li);
        gauge.times.push(t);
        gauge.values.push(a_eff);
        rotation.times.push(t);
        rotation.values.push(rate);
        used.push(&states[j]);
    }

    let mut report = VerificationReport::new(name);
    let gmax = gauge.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    report.flags = Some(margin_flags(&used, opts.margin_width, opts.margin_tolerance, gmax));
    report.series = vec![corrected, naive, compat, rate_norms];
    report.scalars = vec![gauge, rotation];
    diag.record(&mut report);
    report.validate()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{evolve, EvolutionConfig};
    use crate::grid::Grid;
    use crate::presets::{constant_sphere, great_circle};
    use std::f64::consts::PI;

    #[test]
    fn constant_map_has_zero_residual() {
        let g = Grid::periodic(32, 0.0, 2.0 * PI).unwrap();
        let u0 = constant_sphere(&g, Vector3::new(0.0, 0.6, 0.8)).unwrap();
        let p = FlowParams::third_order(1.0, 0.5);
        let tr = evolve(&u0, &p, &EvolutionConfig::stable(&g, &p, 1e-3)).unwrap();
        let r = residual_t3rd(&tr, &p).unwrap();
        assert!(r.series("residual").unwrap().max_linf() == 0.0);
        assert!(r.passed());
        let flags = r.flags.unwrap();
        assert!(flags.decay_margin_satisfied && !flags.gauge_uncertain);
    }

    #[test]
    fn great_circle_exhibits_the_gauge_constant() {
        let g = Grid::periodic(64, 0.0, 2.0 * PI).unwrap();
        let u0 = great_circle(&g).unwrap();
        let p = FlowParams::schrodinger_map();
        let tr = evolve(&u0, &p, &EvolutionConfig::new(1e-3, 0.01)).unwrap();
        let r = residual_t3rd(&tr, &p).unwrap();
        let naive = r.series("residual_uncorrected").unwrap();
        assert!(naive.linf.iter().all(|v| (v - 0.5).abs() < 1e-9));
        assert!(r.series("residual").unwrap().max_linf() < 1e-9);
        assert!(r.scalar("gauge_constant").unwrap().values.iter().all(|a| (a - 0.5).abs() < 1e-9));
        assert!(r.flags.unwrap().gauge_uncertain);
    }

    #[test]
    fn wrong_order_is_a_config_error() {
        let g = Grid::periodic(32, 0.0, 2.0 * PI).unwrap();
        let u0 = great_circle(&g).unwrap();
        let p = FlowParams::fourth_order(0.1, 0.0, 0.0);
        let tr = evolve(&u0, &p, &EvolutionConfig::stable(&g, &p, 2e-3)).unwrap();
        assert!(matches!(residual_t3rd(&tr, &p), Err(Error::Config(_))));
        assert!(residual_t4th(&tr, &p).unwrap().series("residual").unwrap().max_linf() < 1e-9);
    }
}
