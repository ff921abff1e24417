//! Stereographic projection from the north pole: z = (u₁ + i u₂) / (1 − u₃).
//!
//! The round chart λ = 4/(1+|z|²)² is the pull-back of the sphere metric.
//! Note the projection reverses orientation relative to J_u V = u × V: the
//! differential maps multiplication by i to −u×(·).

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};

const POLE_TOLERANCE: f64 = 1e-14;

pub fn chart_to_sphere(z: Complex64) -> Vector3<f64> {
    let r2 = z.norm_sqr();
    let d = 1.0 + r2;
    Vector3::new(2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d)
}

pub fn sphere_to_chart(u: Vector3<f64>) -> Result<Complex64> {
    let denom = 1.0 - u.z;
    if denom.abs() <= POLE_TOLERANCE {
        return Err(Error::Pole);
    }
    Ok(Complex64::new(u.x, u.y) / denom)
}

/// Differential of [`chart_to_sphere`] at `z` applied to chart components `v`.
pub fn chart_to_sphere_pushforward(z: Complex64, v: Complex64) -> Vector3<f64> {
    let (x, y) = (z.re, z.im);
    let d = 1.0 + x * x + y * y;
    let d2 = d * d;
    let du_dx = Vector3::new((2.0 * d - 4.0 * x * x) / d2, -4.0 * x * y / d2, 4.0 * x / d2);
    let du_dy = Vector3::new(-4.0 * x * y / d2, (2.0 * d - 4.0 * y * y) / d2, 4.0 * y / d2);
    du_dx * v.re + du_dy * v.im
}
