use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for sphere membership and tangency checks.
pub const SPHERE_TOLERANCE: f64 = 1e-10;

/// Conformal factor λ of a chart metric g = λ |dz|², with analytic derivatives.
///
/// `d_z` is ∂λ/∂z (so ∂λ/∂z̄ is its conjugate) and `d_z_dzbar` is ∂²λ/∂z∂z̄.
pub trait MetricDensity: Send + Sync + fmt::Debug {
    fn value(&self, z: Complex64) -> f64;
    fn d_z(&self, z: Complex64) -> Complex64;
    fn d_z_dzbar(&self, z: Complex64) -> f64;

    /// Christoffel symbol Γ = ∂_z log λ.
    fn log_d_z(&self, z: Complex64) -> Complex64 {
        self.d_z(z) / self.value(z)
    }

    /// ∂_z ∂_z̄ log λ.
    fn log_d_z_dzbar(&self, z: Complex64) -> f64 {
        let l = self.value(z);
        self.d_z_dzbar(z) / l - self.d_z(z).norm_sqr() / (l * l)
    }
}

/// Built-in conformal factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MetricPreset {
    /// λ = 1.
    Flat,
    /// λ = 4 / (1 + |z|²)², the round unit sphere in stereographic coordinates.
    Round,
    /// λ = 4 / (1 + |z|²)² · (1 + ε e^{−|z|²}); Gaussian curvature varies with z.
    Perturbed { epsilon: f64 },
}

impl MetricDensity for MetricPreset {
    fn value(&self, z: Complex64) -> f64 {
        match *self {
            MetricPreset::Flat => 1.0,
            MetricPreset::Round => round_value(z.norm_sqr()),
            MetricPreset::Perturbed { epsilon } => {
                let r2 = z.norm_sqr();
                round_value(r2) * (1.0 + epsilon * (-r2).exp())
            }
        }
    }

    fn d_z(&self, z: Complex64) -> Complex64 {
        match *self {
            MetricPreset::Flat => Complex64::new(0.0, 0.0),
            MetricPreset::Round => round_d_z(z),
            MetricPreset::Perturbed { epsilon } => {
                let r2 = z.norm_sqr();
                let e = (-r2).exp();
                let p = 1.0 + epsilon * e;
                let p_z = -z.conj() * (epsilon * e);
                round_d_z(z) * p + p_z * round_value(r2)
            }
        }
    }

    fn d_z_dzbar(&self, z: Complex64) -> f64 {
        match *self {
            MetricPreset::Flat => 0.0,
            MetricPreset::Round => round_d_z_dzbar(z.norm_sqr()),
            MetricPreset::Perturbed { epsilon } => {
                let r2 = z.norm_sqr();
                let e = (-r2).exp();
                let p = 1.0 + epsilon * e;
                let p_z = -z.conj() * (epsilon * e);
                let p_zz = epsilon * (r2 - 1.0) * e;
                let r_z = round_d_z(z);
                // R_z P_z̄ + R_z̄ P_z = 2 Re(R_z conj(P_z))
                round_d_z_dzbar(r2) * p + 2.0 * (r_z * p_z.conj()).re + round_value(r2) * p_zz
            }
        }
    }
}

fn round_value(r2: f64) -> f64 {
    4.0 / ((1.0 + r2) * (1.0 + r2))
}

fn round_d_z(z: Complex64) -> Complex64 {
    let d = 1.0 + z.norm_sqr();
    -z.conj() * (8.0 / (d * d * d))
}

fn round_d_z_dzbar(r2: f64) -> f64 {
    let d = 1.0 + r2;
    8.0 * (2.0 * r2 - 1.0) / d.powi(4)
}

/// A conformal chart target: a disc |z| < `max_modulus` carrying g = λ |dz|².
#[derive(Clone)]
pub struct ChartMetric {
    density: Arc<dyn MetricDensity>,
    max_modulus: f64,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric")
            .field("density", &self.density)
            .field("max_modulus", &self.max_modulus)
            .finish()
    }
}

impl ChartMetric {
    pub fn new(density: Arc<dyn MetricDensity>, max_modulus: f64) -> Self {
        Self { density, max_modulus }
    }

    pub fn preset(preset: MetricPreset) -> Self {
        Self::new(Arc::new(preset), 1e3)
    }

    pub fn density(&self) -> &dyn MetricDensity {
        self.density.as_ref()
    }

    pub fn max_modulus(&self) -> f64 {
        self.max_modulus
    }

    /// λ(z), failing if z is outside the working region or λ is not positive.
    pub fn lambda(&self, z: Complex64) -> Result<f64> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > self.max_modulus {
            return Err(Error::Range(format!(
                "chart point {z} outside the working region |z| <= {}",
                self.max_modulus
            )));
        }
        let l = self.density.value(z);
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Domain(format!("metric density λ({z}) = {l} is not positive")));
        }
        Ok(l)
    }

    pub fn christoffel(&self, z: Complex64) -> Complex64 {
        self.density.log_d_z(z)
    }

    /// κ = −(2/λ) ∂_z∂_z̄ log λ.
    pub fn gaussian_curvature(&self, z: Complex64) -> Result<f64> {
        let l = self.lambda(z)?;
        Ok(-2.0 / l * self.density.log_d_z_dzbar(z))
    }
}

/// Surface point: a unit 3-vector on the sphere or a chart coordinate z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Sphere(Vector3<f64>),
    Chart(Complex64),
}

/// Tangent vector: an ambient 3-vector orthogonal to the base point, or the
/// chart components V¹ + iV² of V¹∂₁ + V²∂₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tangent {
    Sphere(Vector3<f64>),
    Chart(Complex64),
}

#[derive(Debug, Clone)]
pub enum TargetSurface {
    UnitSphere,
    Chart(ChartMetric),
}

impl TargetSurface {
    pub fn chart(preset: MetricPreset) -> Self {
        TargetSurface::Chart(ChartMetric::preset(preset))
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, TargetSurface::UnitSphere)
    }

    pub fn check_point(&self, u: Point) -> Result<()> {
        match (self, u) {
            (TargetSurface::UnitSphere, Point::Sphere(p)) => {
                if (p.norm() - 1.0).abs() > SPHERE_TOLERANCE {
                    return Err(Error::Domain(format!("|u| = {} is not 1", p.norm())));
                }
                Ok(())
            }
            (TargetSurface::Chart(c), Point::Chart(z)) => c.lambda(z).map(|_| ()),
            _ => Err(mismatch()),
        }
    }

    fn check_tangent(&self, u: Point, v: Tangent) -> Result<()> {
        match (u, v) {
            (Point::Sphere(p), Tangent::Sphere(w)) => {
                let d = p.dot(&w);
                if d.abs() > SPHERE_TOLERANCE * (1.0 + w.norm()) {
                    return Err(Error::Domain(format!(
                        "vector is not tangent at u: (V, u) = {d:e}"
                    )));
                }
                Ok(())
            }
            (Point::Chart(_), Tangent::Chart(_)) => Ok(()),
            _ => Err(mismatch()),
        }
    }

    /// The complex structure: u × V on the sphere, multiplication by i in a chart.
    pub fn apply_j(&self, u: Point, v: Tangent) -> Result<Tangent> {
        self.check_tangent(u, v)?;
        Ok(match (u, v) {
            (Point::Sphere(p), Tangent::Sphere(w)) => Tangent::Sphere(p.cross(&w)),
            (Point::Chart(_), Tangent::Chart(w)) => Tangent::Chart(Complex64::i() * w),
            _ => unreachable!(),
        })
    }

    /// g_u(V, W).
    pub fn metric_inner(&self, u: Point, v: Tangent, w: Tangent) -> Result<f64> {
        self.check_tangent(u, v)?;
        self.check_tangent(u, w)?;
        match (self, u, v, w) {
            (TargetSurface::UnitSphere, Point::Sphere(_), Tangent::Sphere(a), Tangent::Sphere(b)) => {
                Ok(a.dot(&b))
            }
            (TargetSurface::Chart(c), Point::Chart(z), Tangent::Chart(a), Tangent::Chart(b)) => {
                Ok(c.lambda(z)? * (a * b.conj()).re)
            }
            _ => Err(mismatch()),
        }
    }

    pub fn gaussian_curvature(&self, u: Point) -> Result<f64> {
        match (self, u) {
            (TargetSurface::UnitSphere, Point::Sphere(_)) => Ok(1.0),
            (TargetSurface::Chart(c), Point::Chart(z)) => c.gaussian_curvature(z),
            _ => Err(mismatch()),
        }
    }
}

fn mismatch() -> Error {
    Error::Domain("point/vector representation does not match the target surface".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn j_on_sphere_is_cross_product() {
        let s = TargetSurface::UnitSphere;
        let u = Point::Sphere(Vector3::z());
        let jv = s.apply_j(u, Tangent::Sphere(Vector3::x())).unwrap();
        assert_eq!(jv, Tangent::Sphere(Vector3::y()));
        let jjv = s.apply_j(u, jv).unwrap();
        assert_eq!(jjv, Tangent::Sphere(-Vector3::x()));
    }

    #[test]
    fn j_in_chart_is_multiplication_by_i() {
        let s = TargetSurface::chart(MetricPreset::Round);
        let u = Point::Chart(c(0.3, -0.2));
        assert_eq!(s.apply_j(u, Tangent::Chart(c(1.0, 0.0))).unwrap(), Tangent::Chart(c(0.0, 1.0)));
    }

    #[test]
    fn non_tangent_vector_is_rejected() {
        let s = TargetSurface::UnitSphere;
        let r = s.apply_j(Point::Sphere(Vector3::z()), Tangent::Sphere(Vector3::new(1.0, 0.0, 0.5)));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn metric_examples() {
        let s = TargetSurface::UnitSphere;
        let v = Tangent::Sphere(Vector3::y());
        assert_eq!(s.metric_inner(Point::Sphere(Vector3::x()), v, v).unwrap(), 1.0);
        let ch = TargetSurface::chart(MetricPreset::Round);
        let one = Tangent::Chart(c(1.0, 0.0));
        assert!((ch.metric_inner(Point::Chart(c(0.0, 0.0)), one, one).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn j_is_an_isometry_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ch = TargetSurface::chart(MetricPreset::Perturbed { epsilon: 0.3 });
        let sp = TargetSurface::UnitSphere;
        for _ in 0..100 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let v = Tangent::Chart(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let w = Tangent::Chart(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let u = Point::Chart(z);
            let (jv, jw) = (ch.apply_j(u, v).unwrap(), ch.apply_j(u, w).unwrap());
            let g = ch.metric_inner(u, v, w).unwrap();
            assert!((ch.metric_inner(u, jv, jw).unwrap() - g).abs() <= 1e-12 * (1.0 + g.abs()));
            assert!(ch.metric_inner(u, v, jv).unwrap().abs() < 1e-12);

            let p = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                .normalize();
            let tang = |r: Vector3<f64>| r - p * p.dot(&r);
            let a = tang(Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.3));
            let b = tang(Vector3::new(0.2, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let u = Point::Sphere(p);
            let (ja, jb) = (
                sp.apply_j(u, Tangent::Sphere(a)).unwrap(),
                sp.apply_j(u, Tangent::Sphere(b)).unwrap(),
            );
            let g = a.dot(&b);
            assert!((sp.metric_inner(u, ja, jb).unwrap() - g).abs() <= 1e-12);
            assert!(sp.metric_inner(u, Tangent::Sphere(a), ja).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn round_chart_curvature_is_one() {
        let ch = ChartMetric::preset(MetricPreset::Round);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            assert!((ch.gaussian_curvature(z).unwrap() - 1.0).abs() < 1e-10);
        }
        let eps0 = ChartMetric::preset(MetricPreset::Perturbed { epsilon: 0.0 });
        assert!((eps0.gaussian_curvature(c(0.4, 0.1)).unwrap() - 1.0).abs() < 1e-12);
        let flat = ChartMetric::preset(MetricPreset::Flat);
        assert_eq!(flat.gaussian_curvature(c(0.4, 0.1)).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_curvature_matches_finite_difference_laplacian() {
        // κ = −Δ(log λ) / (2λ), with Δ evaluated by a 5-point stencil in (Re z, Im z).
        let m = MetricPreset::Perturbed { epsilon: 0.4 };
        let ch = ChartMetric::preset(m);
        let h = 1e-3;
        for &z in &[c(0.3, 0.5), c(-0.7, 0.1), c(0.0, 0.0), c(1.2, -0.8)] {
            let ll = |w: Complex64| m.value(w).ln();
            let lap = (ll(z + h) + ll(z - h) + ll(z + c(0.0, h)) + ll(z - c(0.0, h)) - 4.0 * ll(z)) / (h * h);
            let oracle = -lap / (2.0 * m.value(z));
            let k = ch.gaussian_curvature(z).unwrap();
            assert!((k - oracle).abs() < 1e-6, "z={z}: {k} vs {oracle}");
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let m = MetricPreset::Perturbed { epsilon: 0.25 };
        let h = 1e-5;
        for &z in &[c(0.3, 0.5), c(-0.7, 0.1), c(1.1, -0.4)] {
            let dx = (m.value(z + h) - m.value(z - h)) / (2.0 * h);
            let dy = (m.value(z + c(0.0, h)) - m.value(z - c(0.0, h))) / (2.0 * h);
            let dz = c(0.5 * dx, -0.5 * dy);
            assert!((m.d_z(z) - dz).norm() < 1e-8);
        }
    }

    #[test]
    fn nonpositive_density_is_a_domain_error() {
        let ch = ChartMetric::preset(MetricPreset::Perturbed { epsilon: -2.0 });
        assert!(matches!(ch.gaussian_curvature(c(0.0, 0.0)), Err(Error::Domain(_))));
    }
}
