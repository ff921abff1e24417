//! Initial-data presets.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::ComplexField;
use crate::error::{Error, Result};
use crate::flows::FilamentState;
use crate::geometry::{chart_to_sphere, ChartMetric, MapField};
use crate::grid::Grid;

/// Preset names with a one-line parameter description, in listing order.
pub const PRESETS: &[(&str, &str)] = &[
    ("constant_map", "u ≡ u*; params: point (sphere x,y,z or chart re,im)"),
    ("great_circle", "u = (cos x, sin x, 0), or z = e^{ix} in a chart; needs a 2π-periodic grid"),
    (
        "bump",
        "z = z* + amplitude·exp(−sigma(1 − cos(2π(x − center)/L))); params: amplitude=0.3, sigma=16, center=mid, z_star=0+0.5i",
    ),
    ("perturbed_geodesic", "u ∝ (cos x, sin x, epsilon·sin 2x); params: epsilon=0.1"),
    ("helix", "filament (r cos θx, r sin θx, hθx), θ = 1/√(r²+h²); params: radius=1, pitch=1, turns=1"),
    ("circle", "filament (cos x, sin x, 0); needs a 2π-periodic grid"),
    (
        "gaussian_filament",
        "filament bent by angle amplitude·exp(−(x−center)²/width²) with twist; params: amplitude=0.5, width=1, twist=0.5",
    ),
    ("random_bandlimited", "random complex field with modes |k| ≤ k_max; params: seed, k_max=4, amplitude=0.1"),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

fn require_two_pi(grid: &Grid, name: &str) -> Result<()> {
    let l = grid.length();
    let turns = l / (2.0 * std::f64::consts::PI);
    if !grid.is_periodic() || (turns - turns.round()).abs() > 1e-9 || turns.round() < 1.0 {
        return Err(Error::Config(format!("preset {name} needs a periodic grid whose length is a multiple of 2π")));
    }
    Ok(())
}

pub fn constant_sphere(grid: &Grid, point: Vector3<f64>) -> Result<MapField> {
    MapField::sphere(grid.clone(), vec![point; grid.len()])
}

pub fn constant_chart(grid: &Grid, metric: ChartMetric, point: Complex64) -> Result<MapField> {
    MapField::chart(grid.clone(), metric, vec![point; grid.len()])
}

pub fn great_circle(grid: &Grid) -> Result<MapField> {
    require_two_pi(grid, "great_circle")?;
    MapField::sphere(grid.clone(), grid.coordinates().iter().map(|x| Vector3::new(x.cos(), x.sin(), 0.0)).collect())
}

/// The equator |z| = 1, a unit-speed geodesic of the round chart.
pub fn great_circle_chart(grid: &Grid, metric: ChartMetric) -> Result<MapField> {
    require_two_pi(grid, "great_circle")?;
    MapField::chart(grid.clone(), metric, grid.coordinates().iter().map(|x| Complex64::from_polar(1.0, *x)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpParams {
    pub amplitude: f64,
    pub sigma: f64,
    /// Bump centre; `None` puts it in the middle of the domain.
    pub center: Option<f64>,
    pub z_star: Complex64,
}

impl Default for BumpParams {
    fn default() -> Self {
        Self { amplitude: 0.3, sigma: 16.0, center: None, z_star: Complex64::new(0.0, 0.5) }
    }
}

/// Chart coordinates of the bump; flat (equal to z*) near the ends.
pub fn bump_points(grid: &Grid, p: &BumpParams) -> Vec<Complex64> {
    let (x0, l) = (grid.spec().x_min, grid.length());
    let center = p.center.unwrap_or(x0 + 0.5 * l);
    grid.coordinates()
        .iter()
        .map(|x| {
            let s = 2.0 * std::f64::consts::PI * (x - center) / l;
            p.z_star + p.amplitude * (-p.sigma * (1.0 - s.cos())).exp()
        })
        .collect()
}

pub fn bump_chart(grid: &Grid, metric: ChartMetric, p: &BumpParams) -> Result<MapField> {
    MapField::chart(grid.clone(), metric, bump_points(grid, p))
}

/// The bump carried to the sphere by inverse stereographic projection.
pub fn bump_sphere(grid: &Grid, p: &BumpParams) -> Result<MapField> {
    MapField::sphere(grid.clone(), bump_points(grid, p).into_iter().map(chart_to_sphere).collect())
}

pub fn perturbed_geodesic(grid: &Grid, epsilon: f64) -> Result<MapField> {
    require_two_pi(grid, "perturbed_geodesic")?;
    MapField::sphere(
        grid.clone(),
        grid.coordinates()
            .iter()
            .map(|x| Vector3::new(x.cos(), x.sin(), epsilon * (2.0 * x).sin()).normalize())
            .collect(),
    )
}

/// Arc-length helix over whole turns on a periodic grid of `n` points.
pub fn helix(n: usize, radius: f64, pitch: f64, turns: usize) -> Result<FilamentState> {
    if turns == 0 || radius.is_nan() || radius <= 0.0 {
        return Err(Error::Config("helix needs radius > 0 and at least one turn".into()));
    }
    let c = (radius * radius + pitch * pitch).sqrt();
    let grid = Grid::periodic(n, 0.0, 2.0 * std::f64::consts::PI * c * turns as f64)?;
    let pts = grid
        .coordinates()
        .iter()
        .map(|s| {
            let th = s / c;
            Vector3::new(radius * th.cos(), radius * th.sin(), pitch * th)
        })
        .collect();
    let drift = Vector3::new(0.0, 0.0, 2.0 * std::f64::consts::PI * pitch * turns as f64);
    FilamentState::new(grid, pts, drift)
}

pub fn circle_filament(grid: &Grid) -> Result<FilamentState> {
    require_two_pi(grid, "circle")?;
    FilamentState::closed(grid.clone(), grid.coordinates().iter().map(|x| Vector3::new(x.cos(), x.sin(), 0.0)).collect())
}

/// A straight filament along e_x bent near `center`: the tangent leaves e_x
/// by the angle amplitude·exp(−(x − center)²/width²) in a plane turning with
/// rate `twist`.
pub fn gaussian_filament(grid: &Grid, amplitude: f64, width: f64, twist: f64) -> Result<FilamentState> {
    let center = grid.spec().x_min + 0.5 * grid.length();
    let tangent: Vec<Vector3<f64>> = grid
        .coordinates()
        .iter()
        .map(|x| {
            let s = x - center;
            let th = amplitude * (-(s * s) / (width * width)).exp();
            let ph = twist * s;
            Vector3::new(th.cos(), th.sin() * ph.cos(), th.sin() * ph.sin())
        })
        .collect();
    FilamentState::from_tangent(grid.clone(), &tangent, Vector3::zeros())
}

/// Random complex field with Fourier modes |k| ≤ k_max (in units of 2π/L),
/// normalized so that max|q| = amplitude. Identical seeds give identical fields.
pub fn random_bandlimited(grid: &Grid, seed: u64, k_max: usize, amplitude: f64) -> Result<ComplexField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 2.0 * std::f64::consts::PI / grid.length();
    let x0 = grid.spec().x_min;
    let kk = k_max as i64;
    let modes: Vec<(f64, Complex64)> = (-kk..=kk)
        .map(|k| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (k as f64 * scale, c)
        })
        .collect();
    let mut values: Vec<Complex64> = grid
        .coordinates()
        .iter()
        .map(|x| modes.iter().map(|(k, c)| c * Complex64::from_polar(1.0, k * (x - x0))).sum())
        .collect();
    let m = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if m > 0.0 {
        for v in values.iter_mut() {
            *v *= amplitude / m;
        }
    }
    ComplexField::new(grid.clone(), values)
}

/// Random band-limited sphere map: the stereographic image of z* + a random
/// band-limited field.
pub fn random_bandlimited_sphere(grid: &Grid, seed: u64, k_max: usize, amplitude: f64, z_star: Complex64) -> Result<MapField> {
    let q = random_bandlimited(grid, seed, k_max, amplitude)?;
    MapField::sphere(grid.clone(), q.values().iter().map(|z| chart_to_sphere(z_star + z)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bump_is_flat_at_the_seam() {
        let g = Grid::periodic(256, 0.0, 2.0 * PI).unwrap();
        let z = bump_points(&g, &BumpParams::default());
        assert!((z[0] - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        assert!((z[128] - Complex64::new(0.3, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn random_fields_are_reproducible() {
        let g = Grid::periodic(64, 0.0, 2.0 * PI).unwrap();
        let a = random_bandlimited(&g, 7, 4, 0.2).unwrap();
        let b = random_bandlimited(&g, 7, 4, 0.2).unwrap();
        let c = random_bandlimited(&g, 8, 4, 0.2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.linf_norm() - 0.2).abs() < 1e-14);
        assert!(g.tail_energy_fraction(a.values()).unwrap() < 1e-20);
    }

    #[test]
    fn filament_presets_are_arc_length() {
        assert!(helix(64, 1.0, 1.0, 1).unwrap().arc_length_deviation() < 1e-12);
        let g = Grid::periodic(256, -10.0, 10.0).unwrap();
        let f = gaussian_filament(&g, 0.5, 1.0, 0.5).unwrap();
        assert!(f.arc_length_deviation() < 1e-10);
        assert!(great_circle(&Grid::periodic(32, 0.0, 1.0).unwrap()).is_err());
    }
}
