//! Initial data, step selection and evolution for a configured scenario.

use dispersive::flows::{evolve, evolve_filament, EvolutionConfig, FilamentState};
use dispersive::geometry::{ChartMetric, MapField};
use dispersive::integrate::stable_dt;
use dispersive::presets::{
    bump_chart, bump_sphere, circle_filament, constant_chart, constant_sphere, gaussian_filament, great_circle,
    great_circle_chart, helix, perturbed_geodesic, random_bandlimited, random_bandlimited_sphere,
};
use dispersive::{Grid, GridSpec};
use nalgebra::Vector3;
use num_complex::Complex64;

use crate::config::{ConstantPoint, InitialData, ScenarioConfig, Target};
use crate::error::CliError;
use crate::files::{point_components, DataKind, Run, TrajectoryMeta};

/// Snapshots kept when the stride is automatic.
pub const AUTO_SNAPSHOTS: usize = 100;

pub enum Initial {
    Map(MapField),
    Filament(FilamentState),
}

impl Initial {
    pub fn grid(&self) -> &Grid {
        match self {
            Initial::Map(u) => u.grid(),
            Initial::Filament(x) => x.grid(),
        }
    }
}

fn metric_of(target: &Target) -> Option<ChartMetric> {
    match target {
        Target::Sphere => None,
        Target::Chart { metric } => Some(ChartMetric::preset(*metric)),
    }
}

fn unsupported(cfg: &ScenarioConfig) -> CliError {
    CliError::Config(format!("initial.preset: preset {} is not available on a chart target", cfg.initial.name()))
}

/// Map initial data on `grid` (also used for the refinement levels).
pub fn initial_map(cfg: &ScenarioConfig, grid: &Grid) -> Result<MapField, CliError> {
    let metric = metric_of(&cfg.target);
    let u = match (&cfg.initial, metric) {
        (InitialData::ConstantMap(p), None) => {
            let point = match p {
                Some(ConstantPoint::Sphere(v)) => *v,
                _ => Vector3::z(),
            };
            constant_sphere(grid, point)?
        }
        (InitialData::ConstantMap(p), Some(m)) => {
            let point = match p {
                Some(ConstantPoint::Chart(z)) => *z,
                _ => Complex64::new(0.0, 0.5),
            };
            constant_chart(grid, m, point)?
        }
        (InitialData::GreatCircle, None) => great_circle(grid)?,
        (InitialData::GreatCircle, Some(m)) => great_circle_chart(grid, m)?,
        (InitialData::Bump(b), None) => bump_sphere(grid, b)?,
        (InitialData::Bump(b), Some(m)) => bump_chart(grid, m, b)?,
        (InitialData::PerturbedGeodesic { epsilon }, None) => perturbed_geodesic(grid, *epsilon)?,
        (InitialData::RandomBandlimited { k_max, amplitude, z_star }, None) => {
            random_bandlimited_sphere(grid, cfg.seed, *k_max, *amplitude, *z_star)?
        }
        (InitialData::RandomBandlimited { k_max, amplitude, z_star }, Some(m)) => {
            let q = random_bandlimited(grid, cfg.seed, *k_max, *amplitude)?;
            MapField::chart(grid.clone(), m, q.values().iter().map(|z| z_star + z).collect())?
        }
        (InitialData::PerturbedGeodesic { .. }, Some(_)) => return Err(unsupported(cfg)),
        (InitialData::Helix { .. } | InitialData::Circle | InitialData::GaussianFilament { .. }, _) => {
            return Err(CliError::Config(format!("initial.preset: {} is filament data", cfg.initial.name())))
        }
    };
    Ok(u)
}

pub fn initial_data(cfg: &ScenarioConfig, spec: &GridSpec) -> Result<Initial, CliError> {
    Ok(match &cfg.initial {
        InitialData::Helix { radius, pitch, turns } => Initial::Filament(helix(spec.n_points, *radius, *pitch, *turns)?),
        InitialData::Circle => Initial::Filament(circle_filament(&Grid::new(spec.clone())?)?),
        InitialData::GaussianFilament { amplitude, width, twist } => {
            Initial::Filament(gaussian_filament(&Grid::new(spec.clone())?, *amplitude, *width, *twist)?)
        }
        _ => Initial::Map(initial_map(cfg, &Grid::new(spec.clone())?)?),
    })
}

/// Requested step: explicit, or the stability bound at the configured safety.
pub fn step_for(cfg: &ScenarioConfig, grid: &Grid, dt: Option<f64>) -> f64 {
    dt.unwrap_or_else(|| {
        let bound = stable_dt(grid, &cfg.flow.as_map_flow().stiffness_terms(), cfg.evolution.safety);
        if bound.is_finite() {
            bound
        } else {
            cfg.evolution.t_final
        }
    })
}

pub fn evolution_config(cfg: &ScenarioConfig, grid: &Grid) -> EvolutionConfig {
    let dt = step_for(cfg, grid, cfg.evolution.dt);
    let steps = (cfg.evolution.t_final / dt).ceil().max(1.0) as usize;
    let stride = cfg.evolution.stride.unwrap_or_else(|| steps.div_ceil(AUTO_SNAPSHOTS).max(1));
    EvolutionConfig::new(dt, cfg.evolution.t_final)
        .with_stride(stride)
        .with_safety(cfg.evolution.safety)
        .with_projection(cfg.evolution.projection)
}

/// Builds the initial data, evolves it and describes the result.
pub fn run(cfg: &ScenarioConfig) -> Result<(TrajectoryMeta, Run), CliError> {
    let initial = initial_data(cfg, &cfg.grid)?;
    let grid = initial.grid().clone();
    let config = evolution_config(cfg, &grid);
    let params = cfg.flow;
    log::info!(
        "evolving {} from {} on {} points: dt {:.3e}, t_final {}, stride {}",
        params.kind.name(),
        cfg.initial.name(),
        grid.len(),
        config.dt,
        config.t_final,
        config.snapshot_stride
    );
    let (run, kind, base_point, drift) = match &initial {
        Initial::Map(u0) => {
            let tr = evolve(u0, &params, &config)?;
            (Run::Map(tr), DataKind::Map, point_components(u0.base_point()), None)
        }
        Initial::Filament(x0) => {
            let tr = evolve_filament(x0, &params, &config)?;
            let base = point_components(x0.tangent_map()?.base_point());
            let d = x0.drift();
            (Run::Filament(tr), DataKind::Filament, base, Some([d.x, d.y, d.z]))
        }
    };
    let dt = match &run {
        Run::Map(t) => t.dt,
        Run::Filament(t) => t.dt,
    };
    let meta = TrajectoryMeta {
        kind,
        target: cfg.target.clone(),
        grid: grid.spec().clone(),
        flow: params,
        preset: cfg.initial.name().to_string(),
        seed: cfg.seed,
        dt,
        t_final: config.t_final,
        stride: config.snapshot_stride,
        margin: cfg.margin,
        base_point,
        drift,
    };
    Ok((meta, run))
}
