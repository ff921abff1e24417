//! The frame rotation rate α = g(∇_t e, Je) and the gauge constant A(t).
//!
//! α_x = −κ Im(q̄p). For the third- and fourth-order flows Im(q̄p) = −F_x with
//! a local density F, so on a truncated domain
//! α(x) = A_eff + κF − ∫_{x_left}^x κ_x F with A_eff = α(x_left) − κ(x_left)F(x_left).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::parallel::FrameField;
use crate::complex::{ComplexField, ComplexJet};
use crate::error::{Error, Result};
use crate::geometry::{FieldData, TargetSurface};
use crate::grid::CumulativeRule;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub alpha: Vec<f64>,
    /// The constant α(x_left).
    pub a: f64,
}

/// α = A + ∫_{x_left}^x −κ Im(q̄p) dx′ (trapezoid).
pub fn alpha_profile(q: &ComplexField, p: &[Complex64], kappa: &[f64], a: f64) -> Result<PhaseProfile> {
    alpha_profile_with(q, p, kappa, a, CumulativeRule::Trapezoid)
}

pub fn alpha_profile_with(
    q: &ComplexField,
    p: &[Complex64],
    kappa: &[f64],
    a: f64,
    rule: CumulativeRule,
) -> Result<PhaseProfile> {
    if p.len() != q.len() || kappa.len() != q.len() {
        return Err(Error::Domain("q, p and κ must share the grid".into()));
    }
    let density: Vec<f64> =
        (0..q.len()).map(|i| -kappa[i] * (q.values()[i].conj() * p[i]).im).collect();
    let alpha = q.grid().cumulative(&density, rule).into_iter().map(|v| v + a).collect();
    Ok(PhaseProfile { alpha, a })
}

/// F = −½|q|² − a Im(q̄q_x), with Im(q̄p) = −F_x for the third-order flow.
pub fn boundary_density_third(q: &ComplexJet, a: f64) -> Result<Vec<f64>> {
    q.require(1)?;
    Ok((0..q.len())
        .map(|k| {
            let (q0, q1) = (q.q()[k], q.level(1)[k]);
            -0.5 * q0.norm_sqr() - a * (q0.conj() * q1).im
        })
        .collect())
}

/// F = −½|q|² − ((b+c)/4)|q|⁴ + a Re(q̄q_xx) − (a/2)|q_x|², with Im(q̄p) = −F_x
/// for the fourth-order flow.
pub fn boundary_density_fourth(q: &ComplexJet, a: f64, b: f64, c: f64) -> Result<Vec<f64>> {
    q.require(2)?;
    Ok((0..q.len())
        .map(|k| {
            let (q0, q1, q2) = (q.q()[k], q.level(1)[k], q.level(2)[k]);
            let m = q0.norm_sqr();
            -0.5 * m - 0.25 * (b + c) * m * m + a * (q0.conj() * q2).re - 0.5 * a * q1.norm_sqr()
        })
        .collect())
}

/// Rotation rate α(x_left) = g(∇_t e, Je) at the left end, from two frames a
/// time `span` apart; second-order accurate at the midpoint time.
pub fn left_rotation_rate(earlier: &FrameField, later: &FrameField, span: f64) -> Result<f64> {
    if !(span != 0.0 && span.is_finite()) {
        return Err(Error::Domain("time separation must be non-zero".into()));
    }
    match (earlier.base().surface(), earlier.e().data(), later.e().data(), earlier.base().data(), later.base().data()) {
        (TargetSurface::UnitSphere, FieldData::Sphere(e0), FieldData::Sphere(e1), FieldData::Sphere(u0), FieldData::Sphere(u1)) => {
            let et = (e1[0] - e0[0]) / span;
            let u = (u0[0] + u1[0]).normalize();
            let e = (e0[0] + e1[0]).normalize();
            Ok(et.dot(&u.cross(&e)))
        }
        (TargetSurface::Chart(m), FieldData::Chart(z0), FieldData::Chart(z1), FieldData::Chart(w0), FieldData::Chart(w1)) => {
            let (za, zb) = (w0[0], w1[0]);
            let z = (za + zb) * 0.5;
            let zeta = (z0[0] + z1[0]) * 0.5;
            let zeta_t = (z1[0] - z0[0]) / span;
            let z_t = (zb - za) / span;
            let nabla = zeta_t + m.christoffel(z) * z_t * zeta;
            let l = m.lambda(z)?;
            Ok(l * (nabla * zeta.conj()).im / (l * zeta.norm_sqr()))
        }
        _ => Err(Error::Domain("frames do not share a representation".into())),
    }
}

/// A(t) from the left-boundary time difference of two frame slices.
pub fn estimate_a(earlier: &FrameField, later: &FrameField, dt: f64) -> Result<f64> {
    left_rotation_rate(earlier, later, dt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeEstimate {
    /// α(x_left).
    pub rotation_rate: f64,
    /// κ(x_left) F(x_left).
    pub boundary_term: f64,
}

impl GaugeEstimate {
    /// The constant that multiplies −iq in the transformed equation.
    pub fn effective(&self) -> f64 {
        self.rotation_rate - self.boundary_term
    }
}

/// Q = q exp(i∫₀ᵗ A dτ), with the integral over the sampled history
/// (trapezoid) ending at the last time.
pub fn gauge_phase_removal(q: &ComplexField, times: &[f64], a_history: &[f64]) -> Result<ComplexField> {
    if times.len() != a_history.len() || times.is_empty() {
        return Err(Error::Domain("A history must be sampled on the trajectory times".into()));
    }
    let phase: f64 = times.windows(2).zip(a_history.windows(2)).map(|(t, a)| 0.5 * (t[1] - t[0]) * (a[0] + a[1])).sum();
    Ok(q.scaled(Complex64::from_polar(1.0, phase)))
}
