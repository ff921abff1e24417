//! Vortex filaments X(x) ∈ ℝ³ parametrized by arc length.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::MapField;
use crate::grid::Grid;

/// Largest accepted | |X_x| − 1 | for a new filament.
pub const ARC_LENGTH_TOLERANCE: f64 = 1e-6;

/// Filament samples. On periodic grids the curve may be quasi-periodic,
/// X(x + L) = X(x) + drift (a helix over whole turns, for instance).
#[derive(Debug, Clone, PartialEq)]
pub struct FilamentState {
    grid: Grid,
    positions: Vec<Vector3<f64>>,
    drift: Vector3<f64>,
}

impl FilamentState {
    pub fn new(grid: Grid, positions: Vec<Vector3<f64>>, drift: Vector3<f64>) -> Result<Self> {
        let state = Self::from_parts(grid, positions, drift)?;
        let dev = state.arc_length_deviation();
        if dev.is_nan() || dev > ARC_LENGTH_TOLERANCE {
            return Err(Error::Domain(format!(
                "filament is not parametrized by arc length (max | |X_x| - 1 | = {dev:.3e})"
            )));
        }
        Ok(state)
    }

    /// Closed filament (zero drift).
    pub fn closed(grid: Grid, positions: Vec<Vector3<f64>>) -> Result<Self> {
        Self::new(grid, positions, Vector3::zeros())
    }

    /// Structural checks only; the arc-length invariant is left to the caller.
    pub(crate) fn from_parts(grid: Grid, positions: Vec<Vector3<f64>>, drift: Vector3<f64>) -> Result<Self> {
        if positions.len() != grid.len() {
            return Err(Error::Domain(format!(
                "{} filament points for a grid of {}",
                positions.len(),
                grid.len()
            )));
        }
        if !grid.is_periodic() && drift != Vector3::zeros() {
            return Err(Error::Domain("drift is only meaningful on periodic grids".into()));
        }
        if positions.iter().chain(std::iter::once(&drift)).any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::Domain("non-finite filament coordinates".into()));
        }
        Ok(Self { grid, positions, drift })
    }

    /// Integrates a unit tangent field: X_x = T, X(x_min) = origin.
    pub fn from_tangent(grid: Grid, tangent: &[Vector3<f64>], origin: Vector3<f64>) -> Result<Self> {
        if tangent.len() != grid.len() {
            return Err(Error::Domain("tangent length does not match the grid".into()));
        }
        let xy: Vec<Complex64> = tangent.iter().map(|t| Complex64::new(t.x, t.y)).collect();
        let zz: Vec<Complex64> = tangent.iter().map(|t| Complex64::new(t.z, 0.0)).collect();
        let (fxy, mxy) = grid.antiderivative(&xy)?;
        let (fz, mz) = grid.antiderivative(&zz)?;
        let mean = Vector3::new(mxy.re, mxy.im, mz.re);
        let positions = (0..grid.len())
            .map(|i| {
                let s = grid.x(i) - grid.spec().x_min;
                origin + Vector3::new(fxy[i].re, fxy[i].im, fz[i].re) + mean * s
            })
            .collect();
        Self::new(grid.clone(), positions, mean * grid.length())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn drift(&self) -> Vector3<f64> {
        self.drift
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub(crate) fn with_positions(&self, positions: Vec<Vector3<f64>>) -> Self {
        Self { grid: self.grid.clone(), positions, drift: self.drift }
    }

    /// X_x, X_xx, …, up to `max_order` (≤ 4).
    pub fn derivatives(&self, max_order: usize) -> Result<Vec<Vec<Vector3<f64>>>> {
        derivatives_with_drift(&self.grid, &self.positions, self.drift, max_order)
    }

    /// T = X_x.
    pub fn tangent(&self) -> Vec<Vector3<f64>> {
        self.derivatives(1).expect("filament samples match the grid").remove(0)
    }

    /// max | |X_x| − 1 |.
    pub fn arc_length_deviation(&self) -> f64 {
        self.tangent().iter().map(|t| (t.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// The tangent indicatrix u = X_x / |X_x| as a sphere-valued map.
    pub fn tangent_map(&self) -> Result<MapField> {
        let t = self.tangent();
        if t.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::Domain("filament has a stationary point".into()));
        }
        MapField::sphere(self.grid.clone(), t.into_iter().map(|v| v.normalize()).collect())
    }
}

pub(crate) fn derivatives_with_drift(
    grid: &Grid,
    positions: &[Vector3<f64>],
    drift: Vector3<f64>,
    max_order: usize,
) -> Result<Vec<Vec<Vector3<f64>>>> {
    if drift == Vector3::zeros() {
        return grid.derivatives_vec3(positions, max_order);
    }
    let slope = drift / grid.length();
    let x0 = grid.spec().x_min;
    let periodic: Vec<Vector3<f64>> =
        positions.iter().enumerate().map(|(i, p)| p - slope * (grid.x(i) - x0)).collect();
    let mut d = grid.derivatives_vec3(&periodic, max_order)?;
    for v in d[0].iter_mut() {
        *v += slope;
    }
    Ok(d)
}

/// X_x×X_xx + a[X_xxx + (3/2)|X_xx|² X_x].
pub fn rhs_filament_third(x: &FilamentState, a: f64) -> Vec<Vector3<f64>> {
    let d = x.derivatives(3).expect("filament samples match the grid");
    third_from_derivatives(&d, a)
}

/// X_x×X_xx − C1 X_x×X_xxxx + C1 X_xx×X_xxx + (Cb − 2C1)|X_xx|² X_x×X_xx.
pub fn rhs_filament_fourth(x: &FilamentState, c1: f64, cb: f64) -> Vec<Vector3<f64>> {
    let d = x.derivatives(4).expect("filament samples match the grid");
    fourth_from_derivatives(&d, c1, cb)
}

pub(crate) fn third_from_derivatives(d: &[Vec<Vector3<f64>>], a: f64) -> Vec<Vector3<f64>> {
    (0..d[0].len())
        .map(|i| {
            let (x1, x2, x3) = (d[0][i], d[1][i], d[2][i]);
            x1.cross(&x2) + (x3 + x1 * (1.5 * x2.norm_squared())) * a
        })
        .collect()
}

pub(crate) fn fourth_from_derivatives(d: &[Vec<Vector3<f64>>], c1: f64, cb: f64) -> Vec<Vector3<f64>> {
    (0..d[0].len())
        .map(|i| {
            let (x1, x2, x3, x4) = (d[0][i], d[1][i], d[2][i], d[3][i]);
            let b = x1.cross(&x2);
            b - x1.cross(&x4) * c1 + x2.cross(&x3) * c1 + b * ((cb - 2.0 * c1) * x2.norm_squared())
        })
        .collect()
}
