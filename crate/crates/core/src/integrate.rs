//! Classical fourth-order Runge–Kutta stepping and the explicit stability bound.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::FieldData;
use crate::grid::Grid;

/// Extent of the RK4 stability region along the imaginary axis (2√2).
pub const RK4_IMAGINARY_LIMIT: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Default fraction of the RK4 stability limit used for automatic time steps.
pub const DEFAULT_SAFETY: f64 = 0.5;

pub trait StateVector: Clone {
    /// self += alpha · x
    fn axpy(&mut self, alpha: f64, x: &Self);
    fn all_finite(&self) -> bool;
}

impl StateVector for Vec<Vector3<f64>> {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        for (a, b) in self.iter_mut().zip(x) {
            *a += b * alpha;
        }
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.iter().all(|c| c.is_finite()))
    }
}

impl StateVector for Vec<Complex64> {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        for (a, b) in self.iter_mut().zip(x) {
            *a += b * alpha;
        }
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl StateVector for FieldData {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        match (self, x) {
            (FieldData::Sphere(a), FieldData::Sphere(b)) => a.axpy(alpha, b),
            (FieldData::Chart(a), FieldData::Chart(b)) => a.axpy(alpha, b),
            _ => panic!("mismatched field representations in axpy"),
        }
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

/// One RK4 step. `stage_map` is applied to every intermediate stage state
/// (e.g. projection back onto the sphere); pass a no-op to disable.
pub fn rk4_step<S, F, P>(y: &S, dt: f64, mut rhs: F, mut stage_map: P) -> Result<S>
where
    S: StateVector,
    F: FnMut(&S) -> Result<S>,
    P: FnMut(&mut S),
{
    let k1 = rhs(y)?;
    let mut y2 = y.clone();
    y2.axpy(0.5 * dt, &k1);
    stage_map(&mut y2);
    let k2 = rhs(&y2)?;
    let mut y3 = y.clone();
    y3.axpy(0.5 * dt, &k2);
    stage_map(&mut y3);
    let k3 = rhs(&y3)?;
    let mut y4 = y.clone();
    y4.axpy(dt, &k3);
    stage_map(&mut y4);
    let k4 = rhs(&y4)?;
    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

/// Spectral-radius estimate Σ |c_p| k_max^p of a linear dispersive operator
/// Σ c_p ∂_x^p on `grid`.
pub fn spectral_radius(grid: &Grid, terms: &[(u32, f64)]) -> f64 {
    let k = grid.k_max();
    terms.iter().map(|&(p, c)| c.abs() * k.powi(p as i32)).sum()
}

/// Largest stable RK4 step for the dispersive operator described by `terms`,
/// scaled by `safety` ∈ (0, 1].
pub fn stable_dt(grid: &Grid, terms: &[(u32, f64)], safety: f64) -> f64 {
    let rho = spectral_radius(grid, terms);
    if rho == 0.0 {
        f64::INFINITY
    } else {
        safety * RK4_IMAGINARY_LIMIT / rho
    }
}

/// Splits `[0, t_final]` into whole steps no longer than `dt`.
pub fn step_plan(dt: f64, t_final: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::Config(format!("t_final must be non-negative, got {t_final}")));
    }
    let steps = ((t_final / dt) - 1e-9).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok((0, dt));
    }
    Ok((steps, t_final / steps as f64))
}
