//! Method-of-lines time integration (classical RK4).

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::conserved::{conserved_quantities, filament_conserved_quantities, ConservedQuantities};
use super::filament::{derivatives_with_drift, fourth_from_derivatives, third_from_derivatives, FilamentState};
use super::params::{FlowKind, FlowParams};
use super::rhs::map_rhs_data;
use crate::error::{Error, Result};
use crate::geometry::{FieldData, MapField};
use crate::grid::Grid;
use crate::integrate::{rk4_step, stable_dt, step_plan, StateVector, DEFAULT_SAFETY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// Renormalize sphere points after every step.
    #[default]
    PerStep,
    /// Renormalize every RK stage as well.
    PerStage,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    /// Requested step; the actual step is shortened to land on `t_final`.
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub projection: Projection,
    /// Keep every `snapshot_stride`-th step (the initial and final states are always kept).
    pub snapshot_stride: usize,
    /// Fraction of the RK4 stability limit allowed.
    pub safety: f64,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            dt,
            t_final,
            scheme: Scheme::Rk4,
            projection: Projection::PerStep,
            snapshot_stride: 1,
            safety: DEFAULT_SAFETY,
        }
    }

    /// Largest step allowed by the stability bound for this grid and flow.
    pub fn stable(grid: &Grid, params: &FlowParams, t_final: f64) -> Self {
        Self::stable_for(grid, &params.stiffness_terms(), t_final)
    }

    /// Largest stable step for a linear principal part given as (order, coefficient) pairs.
    pub fn stable_for(grid: &Grid, terms: &[(u32, f64)], t_final: f64) -> Self {
        let dt = stable_dt(grid, terms, DEFAULT_SAFETY);
        Self::new(if dt.is_finite() { dt } else { t_final.max(f64::MIN_POSITIVE) }, t_final)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_projection(mut self, projection: Projection) -> Self {
        self.projection = projection;
        self
    }

    pub fn with_safety(mut self, safety: f64) -> Self {
        self.safety = safety;
        self
    }

    /// Number of steps and the step actually used; enforces the stability bound.
    pub fn plan(&self, grid: &Grid, params: &FlowParams) -> Result<(usize, f64)> {
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be at least 1".into()));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::Config(format!("safety must lie in (0, 1], got {}", self.safety)));
        }
        let (steps, dt) = step_plan(self.dt, self.t_final)?;
        let bound = stable_dt(grid, &params.stiffness_terms(), self.safety);
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt, bound });
        }
        Ok((steps, dt))
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MapField>,
    pub diagnostics: Vec<ConservedQuantities>,
    pub params: FlowParams,
    /// Step actually used.
    pub dt: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }

    pub fn final_state(&self) -> &MapField {
        self.states.last().expect("trajectories hold the initial state")
    }

    /// Largest relative drift of the energy from its initial value.
    pub fn energy_drift(&self) -> f64 {
        relative_drift(&self.diagnostics)
    }
}

#[derive(Debug, Clone)]
pub struct FilamentTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FilamentState>,
    pub diagnostics: Vec<ConservedQuantities>,
    pub params: FlowParams,
    pub dt: f64,
}

impl FilamentTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &FilamentState {
        self.states.last().expect("trajectories hold the initial state")
    }

    /// The tangent-indicatrix trajectory u = X_x (a map-flow trajectory of
    /// the mapped coefficients).
    pub fn tangent_trajectory(&self) -> Result<Trajectory> {
        let states = self.states.iter().map(|x| x.tangent_map()).collect::<Result<Vec<_>>>()?;
        let diagnostics = states.iter().map(conserved_quantities).collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            times: self.times.clone(),
            states,
            diagnostics,
            params: self.params.as_map_flow(),
            dt: self.dt,
        })
    }
}

fn relative_drift(d: &[ConservedQuantities]) -> f64 {
    let e0 = d[0].energy;
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    d.iter().map(|q| (q.energy - e0).abs() / scale).fold(0.0, f64::max)
}

fn normalize_sphere(s: &mut FieldData) {
    if let FieldData::Sphere(p) = s {
        for v in p.iter_mut() {
            *v /= v.norm();
        }
    }
}

/// Integrates a map flow (filament kinds evolve the tangent map u = X_x).
pub fn evolve(u0: &MapField, params: &FlowParams, config: &EvolutionConfig) -> Result<Trajectory> {
    params.validate()?;
    let grid = u0.grid().clone();
    let surface = u0.surface().clone();
    let map_params = params.as_map_flow();
    let (steps, dt) = config.plan(&grid, &map_params)?;
    let stage_projection = config.projection == Projection::PerStage;
    let step_projection = config.projection != Projection::Off;

    let mut times = vec![0.0];
    let mut states = vec![u0.clone()];
    let mut diagnostics = vec![conserved_quantities(u0)?];
    let mut y = u0.data().clone();
    for n in 0..steps {
        let t = n as f64 * dt;
        let next = rk4_step(
            &y,
            dt,
            |s: &FieldData| map_rhs_data(&grid, &surface, s, &map_params),
            |s: &mut FieldData| {
                if stage_projection {
                    normalize_sphere(s)
                }
            },
        );
        let mut next = next?;
        if !next.all_finite() {
            return Err(Error::BlowUp { last_valid_time: t });
        }
        if step_projection {
            normalize_sphere(&mut next);
        }
        y = next;
        if (n + 1) % config.snapshot_stride == 0 || n + 1 == steps {
            let snap = MapField::from_parts_unchecked(grid.clone(), surface.clone(), y.clone(), u0.base_point());
            diagnostics.push(conserved_quantities(&snap)?);
            states.push(snap);
            times.push(if n + 1 == steps { config.t_final } else { (n + 1) as f64 * dt });
        }
    }
    Ok(Trajectory { times, states, diagnostics, params: *params, dt })
}

/// Integrates a filament flow in position form. Projection does not apply.
pub fn evolve_filament(x0: &FilamentState, params: &FlowParams, config: &EvolutionConfig) -> Result<FilamentTrajectory> {
    params.validate()?;
    if !params.kind.is_filament() {
        return Err(Error::Config(format!("evolve_filament needs a filament flow, got {}", params.kind.name())));
    }
    let grid = x0.grid().clone();
    let drift: Vector3<f64> = x0.drift();
    let (steps, dt) = config.plan(&grid, params)?;
    let rhs = |s: &Vec<Vector3<f64>>| -> Result<Vec<Vector3<f64>>> {
        Ok(match params.kind {
            FlowKind::FilamentThird => third_from_derivatives(&derivatives_with_drift(&grid, s, drift, 3)?, params.a),
            _ => fourth_from_derivatives(&derivatives_with_drift(&grid, s, drift, 4)?, params.c1, params.cb),
        })
    };

    let mut times = vec![0.0];
    let mut states = vec![x0.clone()];
    let mut diagnostics = vec![filament_conserved_quantities(x0)?];
    let mut y = x0.positions().to_vec();
    for n in 0..steps {
        let next = rk4_step(&y, dt, rhs, |_| {})?;
        if !next.all_finite() {
            return Err(Error::BlowUp { last_valid_time: n as f64 * dt });
        }
        y = next;
        if (n + 1) % config.snapshot_stride == 0 || n + 1 == steps {
            let snap = x0.with_positions(y.clone());
            diagnostics.push(filament_conserved_quantities(&snap)?);
            states.push(snap);
            times.push(if n + 1 == steps { config.t_final } else { (n + 1) as f64 * dt });
        }
    }
    Ok(FilamentTrajectory { times, states, diagnostics, params: *params, dt })
}
