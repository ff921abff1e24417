//! Parallel moving frames {e, Je} along a map slice.
//!
//! Sphere: e = cos φ f1 + sin φ f2 with the reference frame f1 = P_u c/|P_u c|,
//! f2 = u×f1 and φ_x = −(f1_x, f2), integrated with the fourth-order
//! cumulative rule. When no axis c keeps P_u c away from zero the transport
//! ODE e_x = −(e, u_x)u is integrated with RK4 instead. Chart: ζ_x + Γ z_x ζ = 0
//! solved as ζ = ζ0 exp(−∫Γ z_x).

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{apply_j_field, FieldData, MapField, Point, Tangent, TangentField, SPHERE_TOLERANCE};
use crate::grid::{CumulativeRule, Grid};

/// Largest |c·u| accepted for a reference axis before falling back to RK4 transport.
const AXIS_LIMIT: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportMethod {
    /// Quadrature of the connection form against a reference frame.
    Connection,
    /// RK4 integration of the transport ODE.
    Rk4,
    /// Closed-form chart solution.
    Chart,
}

#[derive(Debug, Clone)]
pub struct FrameField {
    base: MapField,
    e: TangentField,
    je: TangentField,
    anchor: Tangent,
    method: TransportMethod,
    renormalization: f64,
}

impl FrameField {
    pub fn base(&self) -> &MapField {
        &self.base
    }

    pub fn e(&self) -> &TangentField {
        &self.e
    }

    pub fn je(&self) -> &TangentField {
        &self.je
    }

    pub fn anchor(&self) -> Tangent {
        self.anchor
    }

    pub fn method(&self) -> TransportMethod {
        self.method
    }

    /// Largest pointwise correction applied by the final re-orthonormalization.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    /// max over the grid of |g(e,e) − 1|, |g(Je,Je) − 1| and |g(e,Je)|.
    pub fn orthonormality_defect(&self) -> f64 {
        let u = &self.base;
        let ee = crate::geometry::pointwise_inner(u, &self.e, &self.e);
        let ff = crate::geometry::pointwise_inner(u, &self.je, &self.je);
        let ef = crate::geometry::pointwise_inner(u, &self.e, &self.je);
        match (ee, ff, ef) {
            (Ok(ee), Ok(ff), Ok(ef)) => ee
                .iter()
                .zip(&ff)
                .zip(&ef)
                .map(|((a, b), c)| (a - 1.0).abs().max((b - 1.0).abs()).max(c.abs()))
                .fold(0.0, f64::max),
            _ => f64::INFINITY,
        }
    }

    /// max g-norm of ∇_x e, with e_x from fourth-order finite differences
    /// (the frame is not periodic on closed curves with holonomy).
    pub fn parallelism_defect(&self) -> Result<f64> {
        let g = self.base.grid();
        let n = g.len();
        let line = Grid::line(n, 0.0, (n - 1) as f64 * g.dx())?;
        match (self.base.data(), self.e.data()) {
            (FieldData::Sphere(u), FieldData::Sphere(e)) => {
                let ex = line.derivative_vec3(e, 1)?;
                Ok((0..n).map(|i| (ex[i] - u[i] * ex[i].dot(&u[i])).norm()).fold(0.0, f64::max))
            }
            (FieldData::Chart(z), FieldData::Chart(zeta)) => {
                let TargetChart(m) = chart_of(&self.base)?;
                let zx = line.derivative_complex(z, 1)?;
                let zetax = line.derivative_complex(zeta, 1)?;
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    let nabla = zetax[i] + m.christoffel(z[i]) * zx[i] * zeta[i];
                    worst = worst.max(m.lambda(z[i])?.sqrt() * nabla.norm());
                }
                Ok(worst)
            }
            _ => Err(Error::Domain("frame does not match its base".into())),
        }
    }
}

struct TargetChart<'a>(&'a crate::geometry::ChartMetric);

fn chart_of(u: &MapField) -> Result<TargetChart<'_>> {
    match u.surface() {
        crate::geometry::TargetSurface::Chart(m) => Ok(TargetChart(m)),
        _ => Err(Error::Domain("expected a chart map".into())),
    }
}

/// Parallel frame along `u` with e(x_left) = e0; e0 must be a unit tangent
/// vector at the first sample.
pub fn parallel_frame(u: &MapField, e0: Tangent) -> Result<FrameField> {
    match (u.data(), e0) {
        (FieldData::Sphere(p), Tangent::Sphere(e0)) => {
            if (e0.norm() - 1.0).abs() > SPHERE_TOLERANCE || e0.dot(&p[0]).abs() > SPHERE_TOLERANCE {
                return Err(Error::Domain("e0 must be a unit tangent vector at the left endpoint".into()));
            }
            sphere_frame(u, p, e0)
        }
        (FieldData::Chart(z), Tangent::Chart(zeta0)) => {
            let m = chart_of(u)?.0;
            let l0 = m.lambda(z[0])?;
            if (l0 * zeta0.norm_sqr() - 1.0).abs() > SPHERE_TOLERANCE {
                return Err(Error::Domain("e0 must have unit length in the chart metric".into()));
            }
            chart_frame(u, z, zeta0)
        }
        _ => Err(Error::Domain("anchor representation does not match the map".into())),
    }
}

/// Parallel frame anchored at the normalized tangential projection of a fixed
/// reference vector (sphere) or at a fixed chart direction (chart).
pub fn parallel_frame_projected(u: &MapField, reference: Tangent) -> Result<FrameField> {
    let e0 = match (u.point(0), reference) {
        (Point::Sphere(p), Tangent::Sphere(r)) => {
            let t = r - p * r.dot(&p);
            if t.norm() < 1e-8 {
                return Err(Error::Domain("reference vector is normal to the surface at the left endpoint".into()));
            }
            Tangent::Sphere(t.normalize())
        }
        (Point::Chart(z), Tangent::Chart(r)) => {
            if r.norm() == 0.0 {
                return Err(Error::Domain("reference direction is zero".into()));
            }
            let l = chart_of(u)?.0.lambda(z)?;
            Tangent::Chart(r / (r.norm() * l.sqrt()))
        }
        _ => return Err(Error::Domain("reference representation does not match the map".into())),
    };
    parallel_frame(u, e0)
}

fn candidate_axes() -> Vec<Vector3<f64>> {
    let mut axes = vec![Vector3::x(), Vector3::y(), Vector3::z()];
    for (a, b) in [(1.0, 1.0), (1.0, -1.0)] {
        axes.push(Vector3::new(a, b, 0.0).normalize());
        axes.push(Vector3::new(a, 0.0, b).normalize());
        axes.push(Vector3::new(0.0, a, b).normalize());
    }
    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        axes.push(Vector3::new(a, b, 1.0).normalize());
    }
    axes
}

fn sphere_frame(u: &MapField, p: &[Vector3<f64>], e0: Vector3<f64>) -> Result<FrameField> {
    let grid = u.grid();
    let (axis, worst) = candidate_axes()
        .into_iter()
        .map(|c| (c, p.iter().map(|v| c.dot(v).abs()).fold(0.0, f64::max)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty axis list");
    let (e, method) = if worst <= AXIS_LIMIT {
        (connection_transport(grid, p, axis, e0)?, TransportMethod::Connection)
    } else {
        (rk4_transport(grid, p, e0)?, TransportMethod::Rk4)
    };
    let mut renormalization: f64 = 0.0;
    let e: Vec<Vector3<f64>> = e
        .into_iter()
        .zip(p)
        .map(|(v, u)| {
            let t = v - u * v.dot(u);
            let t = t / t.norm();
            renormalization = renormalization.max((t - v).norm());
            t
        })
        .collect();
    if renormalization > 1e-6 {
        log::warn!("parallel frame re-orthonormalization moved e by up to {renormalization:.2e}");
    }
    finish(u, TangentField::sphere(e), Tangent::Sphere(e0), method, renormalization)
}

fn connection_transport(
    grid: &Grid,
    p: &[Vector3<f64>],
    axis: Vector3<f64>,
    e0: Vector3<f64>,
) -> Result<Vec<Vector3<f64>>> {
    let f1: Vec<Vector3<f64>> = p.iter().map(|u| (axis - u * axis.dot(u)).normalize()).collect();
    let f2: Vec<Vector3<f64>> = p.iter().zip(&f1).map(|(u, f)| u.cross(f)).collect();
    let f1x = grid.derivative_vec3(&f1, 1)?;
    let omega: Vec<f64> = f1x.iter().zip(&f2).map(|(a, b)| -a.dot(b)).collect();
    let phi = grid.cumulative(&omega, CumulativeRule::Cubic);
    let phi0 = e0.dot(&f2[0]).atan2(e0.dot(&f1[0]));
    Ok((0..p.len())
        .map(|i| {
            let (s, c) = (phi0 + phi[i]).sin_cos();
            f1[i] * c + f2[i] * s
        })
        .collect())
}

fn rk4_transport(grid: &Grid, p: &[Vector3<f64>], e0: Vector3<f64>) -> Result<Vec<Vector3<f64>>> {
    let px = grid.derivative_vec3(p, 1)?;
    let pm = grid.midpoints(p);
    let pxm = grid.midpoints(&px);
    let h = grid.dx();
    let f = |e: Vector3<f64>, u: Vector3<f64>, ux: Vector3<f64>| -u * e.dot(&ux);
    let mut out = Vec::with_capacity(p.len());
    let mut e = e0;
    out.push(e);
    for i in 0..p.len() - 1 {
        let k1 = f(e, p[i], px[i]);
        let k2 = f(e + k1 * (h / 2.0), pm[i], pxm[i]);
        let k3 = f(e + k2 * (h / 2.0), pm[i], pxm[i]);
        let k4 = f(e + k3 * h, p[i + 1], px[i + 1]);
        e += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        out.push(e);
    }
    Ok(out)
}

fn chart_frame(u: &MapField, z: &[Complex64], zeta0: Complex64) -> Result<FrameField> {
    let grid = u.grid();
    let m = chart_of(u)?.0;
    let zx = grid.derivative_complex(z, 1)?;
    let w: Vec<Complex64> = z.iter().zip(&zx).map(|(z, zx)| m.christoffel(*z) * zx).collect();
    let integral = grid.cumulative(&w, CumulativeRule::Cubic);
    let mut renormalization: f64 = 0.0;
    let mut zeta = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        let raw = zeta0 * (-integral[i]).exp();
        let scale = (m.lambda(z[i])?.sqrt() * raw.norm()).recip();
        renormalization = renormalization.max((scale - 1.0).abs());
        zeta.push(raw * scale);
    }
    finish(u, TangentField::chart(zeta), Tangent::Chart(zeta0), TransportMethod::Chart, renormalization)
}

fn finish(
    u: &MapField,
    e: TangentField,
    anchor: Tangent,
    method: TransportMethod,
    renormalization: f64,
) -> Result<FrameField> {
    let je = apply_j_field(u, &e)?;
    Ok(FrameField { base: u.clone(), e, je, anchor, method, renormalization })
}

/// Frame components g(V, e) + i g(V, Je) of a tangent field.
pub fn frame_components(frame: &FrameField, v: &TangentField) -> Result<Vec<Complex64>> {
    match (frame.base.surface(), frame.base.data(), frame.e.data(), v.data()) {
        (_, FieldData::Sphere(p), FieldData::Sphere(e), FieldData::Sphere(v)) => Ok((0..p.len())
            .map(|i| Complex64::new(v[i].dot(&e[i]), v[i].dot(&p[i].cross(&e[i]))))
            .collect()),
        (crate::geometry::TargetSurface::Chart(m), FieldData::Chart(z), FieldData::Chart(zeta), FieldData::Chart(v)) => {
            (0..z.len()).map(|i| Ok(v[i] * zeta[i].conj() * m.lambda(z[i])?)).collect()
        }
        _ => Err(Error::Domain("field representations do not match".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{chart_to_sphere, chart_to_sphere_pushforward, ChartMetric, MetricPreset};
    use std::f64::consts::PI;

    fn sup3(v: &[Vector3<f64>], w: &[Vector3<f64>]) -> f64 {
        v.iter().zip(w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn great_circle_normal_is_parallel() {
        let g = Grid::periodic(64, 0.0, 2.0 * PI).unwrap();
        let pts = g.coordinates().iter().map(|x| Vector3::new(x.cos(), x.sin(), 0.0)).collect();
        let u = MapField::sphere(g, pts).unwrap();
        let f = parallel_frame(&u, Tangent::Sphere(Vector3::z())).unwrap();
        assert!(sup3(f.e().as_sphere().unwrap(), &vec![Vector3::z(); 64]) < 1e-12);
        assert!(f.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn constant_map_frame_is_constant() {
        let g = Grid::periodic(16, 0.0, 1.0).unwrap();
        let p = Vector3::new(0.0, 0.6, 0.8);
        let e0 = Vector3::new(0.0, 0.8, -0.6);
        let u = MapField::sphere(g, vec![p; 16]).unwrap();
        let f = parallel_frame(&u, Tangent::Sphere(e0)).unwrap();
        assert!(sup3(f.e().as_sphere().unwrap(), &vec![e0; 16]) < 1e-14);
    }

    #[test]
    fn non_tangent_anchor_is_rejected() {
        let g = Grid::periodic(16, 0.0, 1.0).unwrap();
        let u = MapField::sphere(g, vec![Vector3::z(); 16]).unwrap();
        assert!(matches!(parallel_frame(&u, Tangent::Sphere(Vector3::z())), Err(Error::Domain(_))));
        assert!(matches!(
            parallel_frame(&u, Tangent::Sphere(Vector3::x() * 2.0)),
            Err(Error::Domain(_))
        ));
    }

    fn wiggle(n: usize) -> (Grid, Vec<Complex64>) {
        let g = Grid::periodic(n, 0.0, 2.0 * PI).unwrap();
        let z = g
            .coordinates()
            .iter()
            .map(|x| Complex64::new(0.3 + 0.5 * x.cos(), 0.2 * (2.0 * x).sin() + 0.4 * x.sin()))
            .collect();
        (g, z)
    }

    fn chart_sphere_mismatch(n: usize) -> (f64, f64) {
        let (g, z) = wiggle(n);
        let uc = MapField::chart(g.clone(), ChartMetric::preset(MetricPreset::Round), z.clone()).unwrap();
        let us = MapField::sphere(g, z.iter().map(|z| chart_to_sphere(*z)).collect()).unwrap();
        let zeta0 = Complex64::new(1.0, 0.0) / ChartMetric::preset(MetricPreset::Round).lambda(z[0]).unwrap().sqrt();
        let fc = parallel_frame(&uc, Tangent::Chart(zeta0)).unwrap();
        let e0 = chart_to_sphere_pushforward(z[0], zeta0);
        let fs = parallel_frame(&us, Tangent::Sphere(e0)).unwrap();
        let pushed: Vec<Vector3<f64>> =
            z.iter().zip(fc.e().as_chart().unwrap()).map(|(z, v)| chart_to_sphere_pushforward(*z, *v)).collect();
        (sup3(&pushed, fs.e().as_sphere().unwrap()), fc.renormalization())
    }

    #[test]
    fn chart_and_sphere_transport_agree() {
        let (coarse, _) = chart_sphere_mismatch(128);
        let (fine, renorm) = chart_sphere_mismatch(256);
        assert!(fine < 2e-7, "frames differ by {fine}");
        assert!(coarse / fine > 8.0, "ratio {}", coarse / fine);
        // the chart solution keeps λ|ζ|² = 1 up to quadrature error
        assert!(renorm < 1e-7);
    }

    #[test]
    fn doubled_chart_coefficient_fails_the_cross_check() {
        let (g, z) = wiggle(128);
        let m = ChartMetric::preset(MetricPreset::Round);
        let zx = g.derivative_complex(&z, 1).unwrap();
        let w: Vec<Complex64> = z.iter().zip(&zx).map(|(z, zx)| m.christoffel(*z) * zx * 2.0).collect();
        let integral = g.cumulative(&w, CumulativeRule::Cubic);
        let zeta0 = Complex64::new(1.0, 0.0) / m.lambda(z[0]).unwrap().sqrt();
        let pushed: Vec<Vector3<f64>> = z
            .iter()
            .zip(&integral)
            .map(|(z, i)| chart_to_sphere_pushforward(*z, zeta0 * (-i).exp()))
            .collect();
        let us = MapField::sphere(g, z.iter().map(|z| chart_to_sphere(*z)).collect()).unwrap();
        let fs = parallel_frame(&us, Tangent::Sphere(chart_to_sphere_pushforward(z[0], zeta0))).unwrap();
        assert!(sup3(&pushed, fs.e().as_sphere().unwrap()) > 1e-2);
    }

    #[test]
    fn rk4_fallback_matches_connection_transport() {
        let (g, z) = wiggle(256);
        let p: Vec<Vector3<f64>> = z.iter().map(|z| chart_to_sphere(*z)).collect();
        let u = MapField::sphere(g.clone(), p.clone()).unwrap();
        let e0 = (Vector3::x() - p[0] * p[0].x).normalize();
        let a = parallel_frame(&u, Tangent::Sphere(e0)).unwrap();
        assert_eq!(a.method(), TransportMethod::Connection);
        let b = rk4_transport(&g, &p, e0).unwrap();
        assert!(sup3(a.e().as_sphere().unwrap(), &b) < 1e-6);
    }

    #[test]
    fn parallelism_defect_shrinks_at_fourth_order() {
        let defect = |n: usize| {
            let (g, z) = wiggle(n);
            let u = MapField::sphere(g, z.iter().map(|z| chart_to_sphere(*z)).collect()).unwrap();
            let e0 = Tangent::Sphere(Vector3::x());
            parallel_frame_projected(&u, e0).unwrap().parallelism_defect().unwrap()
        };
        let ratio = defect(64) / defect(128);
        assert!(ratio > 10.0, "ratio {ratio}");
    }

    #[test]
    fn anchor_rotation_rotates_the_frame() {
        let (g, z) = wiggle(64);
        let u = MapField::sphere(g, z.iter().map(|z| chart_to_sphere(*z)).collect()).unwrap();
        let p0 = u.sphere_points().unwrap()[0];
        let e0 = (Vector3::x() - p0 * p0.x).normalize();
        let th: f64 = 0.7;
        let e0r = e0 * th.cos() + p0.cross(&e0) * th.sin();
        let a = parallel_frame(&u, Tangent::Sphere(e0)).unwrap();
        let b = parallel_frame(&u, Tangent::Sphere(e0r)).unwrap();
        let rotated: Vec<Vector3<f64>> = a
            .e()
            .as_sphere()
            .unwrap()
            .iter()
            .zip(a.je().as_sphere().unwrap())
            .map(|(e, je)| e * th.cos() + je * th.sin())
            .collect();
        assert!(sup3(&rotated, b.e().as_sphere().unwrap()) < 1e-14);
    }
}
