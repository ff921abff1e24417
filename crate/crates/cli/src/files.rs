//! Trajectory files: `trajectory.csv`, `diagnostics.csv` and `scenario.json`.

use std::fs;
use std::path::{Path, PathBuf};

use dispersive::flows::{
    conserved_quantities, filament_conserved_quantities, ConservedQuantities, FilamentState, FilamentTrajectory,
    FlowParams, Trajectory,
};
use dispersive::geometry::{ChartMetric, MapField, Point};
use dispersive::{Grid, GridSpec};
use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Target;
use crate::error::CliError;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SCENARIO_FILE: &str = "scenario.json";

/// Round-trip exact decimal form of a double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    Map,
    Filament,
}

/// Everything besides the sampled values needed to rebuild a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub kind: DataKind,
    pub target: Target,
    pub grid: GridSpec,
    pub flow: FlowParams,
    pub preset: String,
    pub seed: u64,
    /// Step actually used.
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub margin: f64,
    /// Reference point for the margin checks: sphere x,y,z or chart re,im.
    pub base_point: Vec<f64>,
    /// X(x + L) − X(x) for filaments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<[f64; 3]>,
}

#[derive(Debug, Clone)]
pub enum Run {
    Map(Trajectory),
    Filament(FilamentTrajectory),
}

impl Run {
    pub fn times(&self) -> &[f64] {
        match self {
            Run::Map(t) => &t.times,
            Run::Filament(t) => &t.times,
        }
    }

    pub fn diagnostics(&self) -> &[ConservedQuantities] {
        match self {
            Run::Map(t) => &t.diagnostics,
            Run::Filament(t) => &t.diagnostics,
        }
    }

    pub fn grid(&self) -> &Grid {
        match self {
            Run::Map(t) => t.grid(),
            Run::Filament(t) => t.states[0].grid(),
        }
    }
}

pub fn point_components(p: Point) -> Vec<f64> {
    match p {
        Point::Sphere(v) => vec![v.x, v.y, v.z],
        Point::Chart(z) => vec![z.re, z.im],
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::io(path.display().to_string(), e)
}

fn input_err(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Input { path: path.display().to_string(), message: message.into() }
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| input_err(path, e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| input_err(path, e.to_string()))
}

/// CSV writer whose rows are floats in round-trip form.
pub struct Table {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Table {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, CliError> {
        let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
        let mut t = Self { path: path.to_path_buf(), writer: csv::Writer::from_writer(file) };
        t.writer.write_record(header).map_err(|e| t.err(e))?;
        Ok(t)
    }

    fn err(&self, e: csv::Error) -> CliError {
        input_err(&self.path, e.to_string())
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), CliError> {
        let r = self.writer.write_record(values.iter().map(|v| fmt_f64(*v)));
        r.map_err(|e| self.err(e))
    }

    /// Row whose trailing cells may be empty.
    pub fn row_opt(&mut self, values: &[Option<f64>]) -> Result<(), CliError> {
        let r = self.writer.write_record(values.iter().map(|v| v.map(fmt_f64).unwrap_or_default()));
        r.map_err(|e| self.err(e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(|e| io_err(&self.path, e))
    }
}

pub fn value_columns(meta: &TrajectoryMeta) -> &'static [&'static str] {
    match (meta.kind, &meta.target) {
        (DataKind::Filament, _) => &["X1", "X2", "X3"],
        (DataKind::Map, Target::Sphere) => &["u1", "u2", "u3"],
        (DataKind::Map, Target::Chart { .. }) => &["re", "im"],
    }
}

fn write_values(path: &Path, meta: &TrajectoryMeta, run: &Run) -> Result<(), CliError> {
    let mut header = vec!["t", "x"];
    header.extend_from_slice(value_columns(meta));
    let mut table = Table::create(path, &header)?;
    let xs = run.grid().coordinates();
    match run {
        Run::Map(tr) => {
            for (t, u) in tr.times.iter().zip(&tr.states) {
                for (i, x) in xs.iter().enumerate() {
                    let mut row = vec![*t, *x];
                    row.extend(point_components(u.point(i)));
                    table.row(&row)?;
                }
            }
        }
        Run::Filament(tr) => {
            for (t, s) in tr.times.iter().zip(&tr.states) {
                for (x, p) in xs.iter().zip(s.positions()) {
                    table.row(&[*t, *x, p.x, p.y, p.z])?;
                }
            }
        }
    }
    table.finish()
}

/// Writes the three trajectory files into `dir`.
pub fn write_trajectory(dir: &Path, meta: &TrajectoryMeta, run: &Run) -> Result<(), CliError> {
    create_dir(dir)?;
    write_values(&dir.join(TRAJECTORY_FILE), meta, run)?;
    let path = dir.join(DIAGNOSTICS_FILE);
    let mut table = Table::create(&path, &["t", "energy", "sphere_deviation", "arc_length_deviation"])?;
    for (t, d) in run.times().iter().zip(run.diagnostics()) {
        table.row_opt(&[Some(*t), Some(d.energy), Some(d.sphere_deviation), d.arc_length_deviation])?;
    }
    table.finish()?;
    write_json(&dir.join(SCENARIO_FILE), meta)
}

type Blocks = (Vec<f64>, Vec<Vec<Vec<f64>>>);

/// Snapshot blocks of the trajectory table: times and per-snapshot rows of values.
fn read_blocks(path: &Path, n: usize, xs: &[f64], width: usize) -> Result<Blocks, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| input_err(path, e.to_string()))?;
    let headers = reader.headers().map_err(|e| input_err(path, e.to_string()))?.clone();
    if headers.len() != width + 2 || &headers[0] != "t" || &headers[1] != "x" {
        return Err(input_err(path, format!("expected columns t, x and {width} values, got {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let mut times = Vec::new();
    let mut blocks: Vec<Vec<Vec<f64>>> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| input_err(path, format!("line {line}: {e}")))?;
        let vals = record
            .iter()
            .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| input_err(path, format!("line {line}: non-numeric or non-finite value")))?;
        if vals.len() != width + 2 {
            return Err(input_err(path, format!("line {line}: expected {} columns, got {}", width + 2, vals.len())));
        }
        let i = k % n;
        if i == 0 {
            times.push(vals[0]);
            blocks.push(Vec::with_capacity(n));
        }
        let t = *times.last().expect("pushed above");
        if vals[0] != t {
            return Err(input_err(path, format!("line {line}: snapshot at t = {t} has {i} rows, expected {n}")));
        }
        if (vals[1] - xs[i]).abs() > 1e-12 * xs[i].abs().max(1.0) {
            return Err(input_err(path, format!("line {line}: x = {} does not match grid point {i} ({})", vals[1], xs[i])));
        }
        blocks.last_mut().expect("pushed above").push(vals[2..].to_vec());
    }
    if blocks.is_empty() || blocks.last().is_some_and(|b| b.len() != n) {
        return Err(input_err(path, format!("expected whole snapshots of {n} rows")));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(input_err(path, "snapshot times must increase"));
    }
    Ok((times, blocks))
}

/// Reads a directory written by [`write_trajectory`]; diagnostics are recomputed.
pub fn read_trajectory(dir: &Path) -> Result<(TrajectoryMeta, Run), CliError> {
    let meta_path = dir.join(SCENARIO_FILE);
    let meta: TrajectoryMeta = read_json(&meta_path)?;
    let grid = Grid::new(meta.grid.clone()).map_err(|e| input_err(&meta_path, e.to_string()))?;
    let path = dir.join(TRAJECTORY_FILE);
    let width = value_columns(&meta).len();
    let (times, blocks) = read_blocks(&path, grid.len(), &grid.coordinates(), width)?;
    let bad = |what: &str, e: dispersive::Error| input_err(&path, format!("{what}: {e}"));
    let run = match meta.kind {
        DataKind::Map => {
            let base = match (&meta.target, meta.base_point.as_slice()) {
                (Target::Sphere, [x, y, z]) => Point::Sphere(Vector3::new(*x, *y, *z)),
                (Target::Chart { .. }, [re, im]) => Point::Chart(Complex64::new(*re, *im)),
                _ => return Err(input_err(&meta_path, "base_point does not match the target")),
            };
            let mut states = Vec::with_capacity(blocks.len());
            for (t, rows) in times.iter().zip(blocks) {
                let u = match &meta.target {
                    Target::Sphere => MapField::sphere(grid.clone(), rows.iter().map(|r| Vector3::new(r[0], r[1], r[2])).collect()),
                    Target::Chart { metric } => MapField::chart(
                        grid.clone(),
                        ChartMetric::preset(*metric),
                        rows.iter().map(|r| Complex64::new(r[0], r[1])).collect(),
                    ),
                };
                let u = u.and_then(|u| u.with_base_point(base)).map_err(|e| bad(&format!("snapshot t = {t}"), e))?;
                states.push(u);
            }
            let diagnostics = states.iter().map(conserved_quantities).collect::<Result<Vec<_>, _>>().map_err(|e| bad("diagnostics", e))?;
            Run::Map(Trajectory { times, states, diagnostics, params: meta.flow, dt: meta.dt })
        }
        DataKind::Filament => {
            let drift = meta.drift.map(Vector3::from).unwrap_or_else(Vector3::zeros);
            let mut states = Vec::with_capacity(blocks.len());
            for (t, rows) in times.iter().zip(blocks) {
                let pts = rows.iter().map(|r| Vector3::new(r[0], r[1], r[2])).collect();
                states.push(FilamentState::new(grid.clone(), pts, drift).map_err(|e| bad(&format!("snapshot t = {t}"), e))?);
            }
            let diagnostics =
                states.iter().map(filament_conserved_quantities).collect::<Result<Vec<_>, _>>().map_err(|e| bad("diagnostics", e))?;
            Run::Filament(FilamentTrajectory { times, states, diagnostics, params: meta.flow, dt: meta.dt })
        }
    };
    Ok((meta, run))
}
