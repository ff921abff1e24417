use num_complex::Complex64;

use super::params::{KappaMode, ReducedParams};
use super::rhs::reduced_rhs;
use crate::complex::ComplexField;
use crate::error::{Error, Result};
use crate::flows::EvolutionConfig;
use crate::integrate::{rk4_step, stable_dt, step_plan, StateVector};

#[derive(Debug, Clone)]
pub struct ReducedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexField>,
    /// ∫|q|² per snapshot.
    pub mass: Vec<f64>,
    pub dt: f64,
}

impl ReducedTrajectory {
    pub fn final_state(&self) -> &ComplexField {
        self.states.last().expect("trajectories hold the initial state")
    }

    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        let scale = if m0 == 0.0 { 1.0 } else { m0 };
        self.mass.iter().map(|m| (m - m0).abs() / scale).fold(0.0, f64::max)
    }
}

/// RK4 evolution of a constant-curvature reduced equation.
pub fn evolve_reduced(q0: &ComplexField, params: &ReducedParams, config: &EvolutionConfig) -> Result<ReducedTrajectory> {
    params.validate()?;
    if params.kappa == KappaMode::Field {
        return Err(Error::Config(
            "evolve_reduced supports constant curvature only; sampled κ needs the geometric trajectory".into(),
        ));
    }
    if config.snapshot_stride == 0 {
        return Err(Error::Config("snapshot_stride must be at least 1".into()));
    }
    let grid = q0.grid().clone();
    let (steps, dt) = step_plan(config.dt, config.t_final)?;
    let bound = stable_dt(&grid, &params.stiffness_terms(), config.safety);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, bound });
    }
    let rhs = |s: &Vec<Complex64>| -> Result<Vec<Complex64>> {
        reduced_rhs(&ComplexField::from_parts_unchecked(grid.clone(), s.clone()), params, None)
    };
    let mut times = vec![0.0];
    let mut states = vec![q0.clone()];
    let mut mass = vec![q0.mass()];
    let mut y = q0.values().to_vec();
    for n in 0..steps {
        let next = rk4_step(&y, dt, rhs, |_| {})?;
        if !next.all_finite() {
            return Err(Error::BlowUp { last_valid_time: n as f64 * dt });
        }
        y = next;
        if (n + 1) % config.snapshot_stride == 0 || n + 1 == steps {
            let snap = ComplexField::from_parts_unchecked(grid.clone(), y.clone());
            mass.push(snap.mass());
            states.push(snap);
            times.push(if n + 1 == steps { config.t_final } else { (n + 1) as f64 * dt });
        }
    }
    Ok(ReducedTrajectory { times, states, mass, dt })
}
