use nalgebra::Vector3;
use num_complex::Complex64;

use super::surface::{ChartMetric, Point, Tangent, TargetSurface, SPHERE_TOLERANCE};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Grid samples of surface points or tangent vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Sphere(Vec<Vector3<f64>>),
    Chart(Vec<Complex64>),
}

impl FieldData {
    pub fn len(&self) -> usize {
        match self {
            FieldData::Sphere(v) => v.len(),
            FieldData::Chart(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        match self {
            FieldData::Sphere(v) => v.iter().all(|p| p.iter().all(|c| c.is_finite())),
            FieldData::Chart(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }

    pub fn zeros_like(&self) -> Self {
        match self {
            FieldData::Sphere(v) => FieldData::Sphere(vec![Vector3::zeros(); v.len()]),
            FieldData::Chart(v) => FieldData::Chart(vec![Complex64::new(0.0, 0.0); v.len()]),
        }
    }

    /// Largest component-wise distance between two fields of the same kind.
    pub fn max_distance(&self, other: &Self) -> f64 {
        match (self, other) {
            (FieldData::Sphere(a), FieldData::Sphere(b)) => {
                a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
            }
            (FieldData::Chart(a), FieldData::Chart(b)) => {
                a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        }
    }
}

/// A discretized map u: grid → target surface, with its x → −∞ anchor u*.
#[derive(Debug, Clone)]
pub struct MapField {
    grid: Grid,
    surface: TargetSurface,
    points: FieldData,
    base_point: Point,
}

impl MapField {
    pub fn new(grid: Grid, surface: TargetSurface, points: FieldData) -> Result<Self> {
        if points.len() != grid.len() {
            return Err(Error::Domain(format!(
                "{} points for a grid of {}",
                points.len(),
                grid.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::Domain("empty map".into()));
        }
        let base_point = match &points {
            FieldData::Sphere(p) => Point::Sphere(p[0]),
            FieldData::Chart(p) => Point::Chart(p[0]),
        };
        let field = Self { grid, surface, points, base_point };
        for i in 0..field.len() {
            field.surface.check_point(field.point(i))?;
        }
        Ok(field)
    }

    pub fn sphere(grid: Grid, points: Vec<Vector3<f64>>) -> Result<Self> {
        Self::new(grid, TargetSurface::UnitSphere, FieldData::Sphere(points))
    }

    pub fn chart(grid: Grid, metric: ChartMetric, points: Vec<Complex64>) -> Result<Self> {
        Self::new(grid, TargetSurface::Chart(metric), FieldData::Chart(points))
    }

    /// Builds a field without membership validation; used by the integrators,
    /// which check finiteness and project separately.
    pub(crate) fn from_parts_unchecked(grid: Grid, surface: TargetSurface, points: FieldData, base_point: Point) -> Self {
        Self { grid, surface, points, base_point }
    }

    pub fn with_base_point(mut self, base_point: Point) -> Result<Self> {
        self.surface.check_point(base_point)?;
        self.base_point = base_point;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn surface(&self) -> &TargetSurface {
        &self.surface
    }

    pub fn data(&self) -> &FieldData {
        &self.points
    }

    pub fn base_point(&self) -> Point {
        self.base_point
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point {
        match &self.points {
            FieldData::Sphere(p) => Point::Sphere(p[i]),
            FieldData::Chart(p) => Point::Chart(p[i]),
        }
    }

    pub fn sphere_points(&self) -> Option<&[Vector3<f64>]> {
        match &self.points {
            FieldData::Sphere(p) => Some(p),
            FieldData::Chart(_) => None,
        }
    }

    pub fn chart_points(&self) -> Option<&[Complex64]> {
        match &self.points {
            FieldData::Chart(p) => Some(p),
            FieldData::Sphere(_) => None,
        }
    }

    /// Same grid and surface, new samples.
    pub fn with_data(&self, points: FieldData) -> Result<Self> {
        let mut f = Self::new(self.grid.clone(), self.surface.clone(), points)?;
        f.base_point = self.base_point;
        Ok(f)
    }

    /// Renormalizes sphere points to unit length; charts are unchanged.
    pub fn project(&mut self) {
        if let FieldData::Sphere(p) = &mut self.points {
            for v in p.iter_mut() {
                *v /= v.norm();
            }
        }
    }

    /// max_i | |u_i| − 1 | for sphere maps, 0 for charts.
    pub fn sphere_deviation(&self) -> f64 {
        match &self.points {
            FieldData::Sphere(p) => p.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max),
            FieldData::Chart(_) => 0.0,
        }
    }

    /// Largest distance to the base point over the grid points within
    /// `width` of either end of the domain.
    pub fn margin_deviation(&self, width: f64) -> f64 {
        let g = &self.grid;
        let (lo, hi) = (g.spec().x_min + width, g.spec().x_max - width);
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            let x = g.x(i);
            if i != 0 && x > lo && x < hi {
                continue;
            }
            let d = match (self.point(i), self.base_point) {
                (Point::Sphere(a), Point::Sphere(b)) => (a - b).norm(),
                (Point::Chart(a), Point::Chart(b)) => (a - b).norm(),
                _ => f64::INFINITY,
            };
            worst = worst.max(d);
        }
        worst
    }

    /// Gaussian curvature sampled along the map.
    pub fn curvature_field(&self) -> Result<Vec<f64>> {
        (0..self.len()).map(|i| self.surface.gaussian_curvature(self.point(i))).collect()
    }

    /// The x-derivative u_x as a tangent field.
    pub fn velocity(&self) -> Result<TangentField> {
        Ok(TangentField::new(match &self.points {
            FieldData::Sphere(p) => FieldData::Sphere(self.grid.derivative_vec3(p, 1)?),
            FieldData::Chart(p) => FieldData::Chart(self.grid.derivative_complex(p, 1)?),
        }))
    }
}

/// Vector field along a map (u_x, u_t, ∇ derivatives, frame vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    data: FieldData,
}

impl TangentField {
    pub fn new(data: FieldData) -> Self {
        Self { data }
    }

    pub fn sphere(v: Vec<Vector3<f64>>) -> Self {
        Self::new(FieldData::Sphere(v))
    }

    pub fn chart(v: Vec<Complex64>) -> Self {
        Self::new(FieldData::Chart(v))
    }

    pub fn data(&self) -> &FieldData {
        &self.data
    }

    pub fn into_data(self) -> FieldData {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn at(&self, i: usize) -> Tangent {
        match &self.data {
            FieldData::Sphere(v) => Tangent::Sphere(v[i]),
            FieldData::Chart(v) => Tangent::Chart(v[i]),
        }
    }

    pub fn as_sphere(&self) -> Option<&[Vector3<f64>]> {
        match &self.data {
            FieldData::Sphere(v) => Some(v),
            FieldData::Chart(_) => None,
        }
    }

    pub fn as_chart(&self) -> Option<&[Complex64]> {
        match &self.data {
            FieldData::Chart(v) => Some(v),
            FieldData::Sphere(_) => None,
        }
    }

    /// max_i |(V_i, u_i)| on the sphere; 0 in a chart.
    pub fn tangency_defect(&self, u: &MapField) -> f64 {
        match (&self.data, u.data()) {
            (FieldData::Sphere(v), FieldData::Sphere(p)) => {
                v.iter().zip(p).map(|(a, b)| a.dot(b).abs()).fold(0.0, f64::max)
            }
            _ => 0.0,
        }
    }

    /// Largest pointwise g-norm of the field.
    pub fn max_norm(&self, u: &MapField) -> Result<f64> {
        let g = pointwise_inner(u, self, self)?;
        Ok(g.into_iter().fold(0.0, f64::max).sqrt())
    }
}

/// g_u(V, W) at every grid point.
pub fn pointwise_inner(u: &MapField, v: &TangentField, w: &TangentField) -> Result<Vec<f64>> {
    match (u.surface(), u.data(), v.data(), w.data()) {
        (TargetSurface::UnitSphere, FieldData::Sphere(_), FieldData::Sphere(a), FieldData::Sphere(b)) => {
            Ok(a.iter().zip(b).map(|(p, q)| p.dot(q)).collect())
        }
        (TargetSurface::Chart(m), FieldData::Chart(z), FieldData::Chart(a), FieldData::Chart(b)) => z
            .iter()
            .zip(a.iter().zip(b))
            .map(|(z, (p, q))| Ok(m.lambda(*z)? * (p * q.conj()).re))
            .collect(),
        _ => Err(Error::Domain("field representations do not match".into())),
    }
}

/// J_u V at every grid point (no tangency check; see [`TargetSurface::apply_j`]).
pub fn apply_j_field(u: &MapField, v: &TangentField) -> Result<TangentField> {
    match (u.data(), v.data()) {
        (FieldData::Sphere(p), FieldData::Sphere(a)) => {
            Ok(TangentField::sphere(p.iter().zip(a).map(|(p, a)| p.cross(a)).collect()))
        }
        (FieldData::Chart(_), FieldData::Chart(a)) => {
            Ok(TangentField::chart(a.iter().map(|a| Complex64::i() * a).collect()))
        }
        _ => Err(Error::Domain("field representations do not match".into())),
    }
}

/// Checks the sphere membership invariant for every sample.
pub fn check_on_sphere(points: &[Vector3<f64>]) -> Result<()> {
    match points.iter().position(|p| (p.norm() - 1.0).abs() > SPHERE_TOLERANCE) {
        Some(i) => Err(Error::Domain(format!("point {i} is off the unit sphere"))),
        None => Ok(()),
    }
}
