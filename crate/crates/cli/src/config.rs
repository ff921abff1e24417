//! Scenario configuration: typed view of the INI keys with defaults.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;

use dispersive::flows::{coefficient_map_f, coefficient_map_fm, FlowKind, FlowParams, Projection};
use dispersive::geometry::MetricPreset;
use dispersive::presets::{preset_names, BumpParams};
use dispersive::{Boundary, GridSpec};
use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::ini::Ini;

/// Every accepted key, in documentation order.
pub const KEYS: &[(&str, &str)] = &[
    ("seed", "seed for randomized presets (default 0; --seed overrides)"),
    ("target.kind", "sphere | chart (default sphere)"),
    ("target.metric", "chart metric: flat | round | perturbed (default round)"),
    ("target.epsilon", "perturbed metric strength (default 0.2)"),
    ("grid.n", "number of points (default 256)"),
    ("grid.x_min", "left end (default 0)"),
    ("grid.length", "domain length; accepts multiples of pi such as 2pi (default 2pi)"),
    ("grid.boundary", "periodic | line (default periodic)"),
    ("grid.margin", "width of the end intervals checked for flatness (default 0.5)"),
    ("flow.kind", "schrodinger_map | third_order | fourth_order | filament_third | filament_fourth (default third_order)"),
    ("flow.a", "coefficient a (default 1 for third_order, 0 otherwise)"),
    ("flow.b", "coefficient b (default 0.5 for third_order, 0 otherwise)"),
    ("flow.c", "coefficient c (default 0)"),
    ("flow.c1", "filament constant C1; with flow.cb on a map kind selects a, b, c from C1, Cb"),
    ("flow.cb", "filament constant Cb"),
    ("flow.fm_a", "filament constant a; on third_order selects (a, a/2)"),
    ("evolution.dt", "time step or auto (default auto, the stability bound)"),
    ("evolution.t_final", "horizon (default 0.1)"),
    ("evolution.stride", "steps between snapshots or auto (default auto, about 100 snapshots)"),
    ("evolution.safety", "fraction of the stability bound (default 0.5)"),
    ("evolution.projection", "per_step | per_stage | off (default per_step)"),
    ("initial.preset", "initial-data preset (default bump); see `dispflow presets`"),
    ("initial.amplitude", "bump, gaussian_filament and random_bandlimited amplitude"),
    ("initial.sigma", "bump concentration (default 16)"),
    ("initial.center", "bump centre (default mid-domain)"),
    ("initial.z_star", "chart base value re,im (default 0,0.5)"),
    ("initial.point", "constant_map value: x,y,z on the sphere or re,im in a chart"),
    ("initial.epsilon", "perturbed_geodesic size (default 0.1)"),
    ("initial.radius", "helix radius (default 1)"),
    ("initial.pitch", "helix pitch (default 1)"),
    ("initial.turns", "helix turns (default 1)"),
    ("initial.width", "gaussian_filament width (default 1)"),
    ("initial.twist", "gaussian_filament twist (default 0.5)"),
    ("initial.k_max", "random_bandlimited highest mode (default 4)"),
    ("verify.input", "directory of an existing trajectory to verify instead of evolving"),
    ("verify.invariants", "energy drift and transform identities (default true)"),
    ("verify.residual", "residual of the transformed equation (default true)"),
    ("verify.residual_windows", "short windows re-evolved from stored snapshots for the residual (default 5)"),
    ("verify.residual_stride", "steps between the five snapshots of a residual window (default 1)"),
    ("verify.commutation", "co-evolution check, constant-curvature targets only (default true)"),
    ("verify.commutation_t_final", "co-evolution horizon (default min(t_final, 0.002))"),
    ("verify.refinement", "residual refinement study (default true)"),
    ("verify.levels", "refinement levels (default 3)"),
    ("verify.refinement_n0", "points on the coarsest level (default grid.n / 2)"),
    ("verify.refinement_dt0", "step on the coarsest level or auto (default auto)"),
    ("verify.refinement_t_final", "refinement horizon (default min(t_final, 0.002))"),
    ("verify.refinement_stride", "steps between refinement snapshots (default 20)"),
    ("verify.band_low", "lowest accepted error ratio (default 8)"),
    ("verify.band_high", "highest accepted error ratio (default 32)"),
    ("verify.identity_tolerance", "bound on |q|^2 - g(u_x,u_x) and frame orthonormality (default 1e-10)"),
    ("verify.energy_tolerance", "bound on the relative energy drift (default 1e-6)"),
    ("verify.residual_tolerance", "bound on residual L2 / max(L2 of q_t, 1) (default 1e-4)"),
    ("verify.commutation_tolerance", "bound on mismatch L2 / max(L2 of q(0), 1) at t_final (default 1e-4)"),
    ("output.dir", "output directory (default out)"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Sphere,
    Chart { metric: MetricPreset },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstantPoint {
    Sphere(Vector3<f64>),
    Chart(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    ConstantMap(Option<ConstantPoint>),
    GreatCircle,
    Bump(BumpParams),
    PerturbedGeodesic { epsilon: f64 },
    Helix { radius: f64, pitch: f64, turns: usize },
    Circle,
    GaussianFilament { amplitude: f64, width: f64, twist: f64 },
    RandomBandlimited { k_max: usize, amplitude: f64, z_star: Complex64 },
}

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            InitialData::ConstantMap(_) => "constant_map",
            InitialData::GreatCircle => "great_circle",
            InitialData::Bump(_) => "bump",
            InitialData::PerturbedGeodesic { .. } => "perturbed_geodesic",
            InitialData::Helix { .. } => "helix",
            InitialData::Circle => "circle",
            InitialData::GaussianFilament { .. } => "gaussian_filament",
            InitialData::RandomBandlimited { .. } => "random_bandlimited",
        }
    }

    pub fn is_filament(&self) -> bool {
        matches!(self, InitialData::Helix { .. } | InitialData::Circle | InitialData::GaussianFilament { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    /// `None` selects the stability bound.
    pub dt: Option<f64>,
    pub t_final: f64,
    /// `None` keeps about 100 snapshots.
    pub stride: Option<usize>,
    pub safety: f64,
    pub projection: Projection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub input: Option<PathBuf>,
    pub invariants: bool,
    pub residual: bool,
    pub residual_windows: usize,
    pub residual_stride: usize,
    pub commutation: bool,
    pub commutation_t_final: f64,
    pub refinement: bool,
    pub levels: usize,
    pub refinement_n0: usize,
    pub refinement_dt0: Option<f64>,
    pub refinement_t_final: f64,
    pub refinement_stride: usize,
    pub band: (f64, f64),
    pub identity_tolerance: f64,
    pub energy_tolerance: f64,
    pub residual_tolerance: f64,
    pub commutation_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub target: Target,
    pub grid: GridSpec,
    pub margin: f64,
    pub flow: FlowParams,
    pub evolution: Evolution,
    pub initial: InitialData,
    pub verify: VerifySettings,
    pub output_dir: PathBuf,
}

/// Typed reads that cite the key and its origin on failure.
struct Reader<'a> {
    ini: &'a Ini,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<(&str, String)> {
        self.ini.get(key).map(|(v, o)| (v, format!("{o}: {key}")))
    }

    fn parse<T>(&self, key: &str, default: T, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<T, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some((v, at)) => f(v).ok_or_else(|| CliError::Config(format!("{at}: expected {what}, got `{v}`"))),
        }
    }

    fn real(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.parse(key, default, "a finite number", parse_real)
    }

    fn opt_real(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.parse(key, None, "a finite number", |v| parse_real(v).map(Some))
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.real(key, default)?;
        self.require(key, v > 0.0, "must be positive")?;
        Ok(v)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.parse(key, default, "a non-negative integer", |v| v.parse().ok())
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool, CliError> {
        self.parse(key, default, "true or false", |v| match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Some(true),
            "false" | "no" | "off" | "0" => Some(false),
            _ => None,
        })
    }

    fn auto_or<T>(&self, key: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Option<T>, CliError> {
        self.parse(key, None, what, |v| if v == "auto" { Some(None) } else { f(v).map(Some) })
    }

    fn complex(&self, key: &str, default: Complex64) -> Result<Complex64, CliError> {
        self.parse(key, default, "re,im", |v| match parse_list(v)?.as_slice() {
            [re, im] => Some(Complex64::new(*re, *im)),
            _ => None,
        })
    }

    fn require(&self, key: &str, ok: bool, message: &str) -> Result<(), CliError> {
        if ok {
            return Ok(());
        }
        let at = self.raw(key).map_or_else(|| key.to_string(), |(_, at)| at);
        Err(CliError::Config(format!("{at}: {message}")))
    }
}

/// A number, optionally written as a multiple of pi (`pi`, `2pi`, `-0.5*pi`).
pub fn parse_real(v: &str) -> Option<f64> {
    let v = v.trim();
    let x = match v.strip_suffix("pi") {
        Some(prefix) => {
            let prefix = prefix.trim().trim_end_matches('*').trim();
            let factor = match prefix {
                "" | "+" => 1.0,
                "-" => -1.0,
                p => p.parse::<f64>().ok()?,
            };
            factor * PI
        }
        None => v.parse::<f64>().ok()?,
    };
    x.is_finite().then_some(x)
}

fn parse_list(v: &str) -> Option<Vec<f64>> {
    v.split(',').map(parse_real).collect()
}

impl ScenarioConfig {
    pub fn from_ini(ini: &Ini) -> Result<Self, CliError> {
        let known: BTreeSet<&str> = KEYS.iter().map(|(k, _)| *k).collect();
        for key in ini.keys() {
            if !known.contains(key) {
                let (_, origin) = ini.get(key).expect("listed key");
                return Err(CliError::Config(format!("{origin}: unknown key `{key}`")));
            }
        }
        let r = Reader { ini };

        let seed = r.parse("seed", 0u64, "a non-negative integer", |v| v.parse().ok())?;

        let target = match r.raw("target.kind").map(|(v, _)| v).unwrap_or("sphere") {
            "sphere" => Target::Sphere,
            "chart" => {
                let metric = match r.raw("target.metric").map(|(v, _)| v).unwrap_or("round") {
                    "flat" => MetricPreset::Flat,
                    "round" => MetricPreset::Round,
                    "perturbed" => MetricPreset::Perturbed { epsilon: r.real("target.epsilon", 0.2)? },
                    other => {
                        let at = r.raw("target.metric").expect("present").1;
                        return Err(CliError::Config(format!("{at}: unknown metric `{other}` (flat, round, perturbed)")));
                    }
                };
                Target::Chart { metric }
            }
            other => {
                let at = r.raw("target.kind").expect("present").1;
                return Err(CliError::Config(format!("{at}: unknown target `{other}` (sphere, chart)")));
            }
        };

        let n = r.count("grid.n", 256)?;
        r.require("grid.n", n >= 16, "needs at least 16 points")?;
        let x_min = r.real("grid.x_min", 0.0)?;
        let length = r.positive("grid.length", 2.0 * PI)?;
        let boundary = r.parse("grid.boundary", Boundary::Periodic, "periodic or line", |v| match v {
            "periodic" => Some(Boundary::Periodic),
            "line" | "line_truncated" => Some(Boundary::LineTruncated),
            _ => None,
        })?;
        let grid = GridSpec { n_points: n, x_min, x_max: x_min + length, boundary };
        let margin = r.real("grid.margin", 0.5)?;
        r.require("grid.margin", margin >= 0.0, "margin must be non-negative")?;

        let flow = read_flow(&r)?;

        let dt = r.auto_or("evolution.dt", "a positive number or auto", |v| parse_real(v).filter(|x| *x > 0.0))?;
        let t_final = r.positive("evolution.t_final", 0.1)?;
        let stride = r.auto_or("evolution.stride", "a positive integer or auto", |v| v.parse().ok().filter(|s| *s > 0))?;
        let safety = r.real("evolution.safety", 0.5)?;
        r.require("evolution.safety", safety > 0.0 && safety <= 1.0, "safety must lie in (0, 1]")?;
        let projection = r.parse("evolution.projection", Projection::PerStep, "per_step, per_stage or off", |v| match v {
            "per_step" => Some(Projection::PerStep),
            "per_stage" => Some(Projection::PerStage),
            "off" => Some(Projection::Off),
            _ => None,
        })?;
        let evolution = Evolution { dt, t_final, stride, safety, projection };

        let initial = read_initial(&r, &target)?;
        if initial.is_filament() != flow.kind.is_filament() {
            let at = r.raw("initial.preset").map_or_else(|| "initial.preset".to_string(), |(_, at)| at);
            let (what, need) = if initial.is_filament() { ("filament", "map") } else { ("map", "filament") };
            return Err(CliError::Config(format!(
                "{at}: preset {} is {what} data but flow.kind {} needs {need} data",
                initial.name(),
                flow.kind.name()
            )));
        }
        if initial.is_filament() {
            r.require("target.kind", target == Target::Sphere, "filament flows need a sphere target")?;
        }

        let levels = r.count("verify.levels", 3)?;
        r.require("verify.levels", levels >= 3, "a refinement study needs at least 3 levels")?;
        let refinement_n0 = r.count("verify.refinement_n0", (n / 2).max(16))?;
        r.require("verify.refinement_n0", refinement_n0 >= 16, "needs at least 16 points")?;
        let verify = VerifySettings {
            input: r.raw("verify.input").map(|(v, _)| PathBuf::from(v)),
            invariants: r.flag("verify.invariants", true)?,
            residual: r.flag("verify.residual", true)?,
            residual_windows: r.count("verify.residual_windows", 5)?,
            residual_stride: r.count("verify.residual_stride", 1)?,
            commutation: r.flag("verify.commutation", true)?,
            commutation_t_final: r.positive("verify.commutation_t_final", t_final.min(0.002))?,
            refinement: r.flag("verify.refinement", true)?,
            levels,
            refinement_n0,
            refinement_dt0: r.auto_or("verify.refinement_dt0", "a positive number or auto", |v| {
                parse_real(v).filter(|x| *x > 0.0)
            })?,
            refinement_t_final: r.positive("verify.refinement_t_final", t_final.min(0.002))?,
            refinement_stride: r.count("verify.refinement_stride", 20)?.max(1),
            band: (r.positive("verify.band_low", 8.0)?, r.positive("verify.band_high", 32.0)?),
            identity_tolerance: r.positive("verify.identity_tolerance", 1e-10)?,
            energy_tolerance: r.positive("verify.energy_tolerance", 1e-6)?,
            residual_tolerance: r.positive("verify.residual_tolerance", 1e-4)?,
            commutation_tolerance: r.positive("verify.commutation_tolerance", 1e-4)?,
        };
        r.require("verify.band_high", verify.band.0 < verify.band.1, "band_low must be below band_high")?;
        r.require("verify.residual_windows", verify.residual_windows >= 1, "needs at least one window")?;
        r.require("verify.residual_stride", verify.residual_stride >= 1, "must be at least 1")?;

        let output_dir = PathBuf::from(r.raw("output.dir").map(|(v, _)| v).unwrap_or("out"));
        Ok(Self { seed, target, grid, margin, flow, evolution, initial, verify, output_dir })
    }
}

fn read_flow(r: &Reader<'_>) -> Result<FlowParams, CliError> {
    let kind = match r.raw("flow.kind") {
        None => FlowKind::ThirdOrder,
        Some((v, at)) => FlowKind::parse(v).ok_or_else(|| {
            CliError::Config(format!(
                "{at}: unknown flow kind `{v}` (schrodinger_map, third_order, fourth_order, filament_third, filament_fourth)"
            ))
        })?,
    };
    let has = |k: &str| r.raw(k).is_some();
    let params = match kind {
        FlowKind::SchrodingerMap => FlowParams::schrodinger_map(),
        FlowKind::ThirdOrder if has("flow.fm_a") => {
            r.require("flow.a", !has("flow.a") && !has("flow.b"), "flow.fm_a cannot be combined with flow.a or flow.b")?;
            coefficient_map_fm(r.real("flow.fm_a", 0.0)?)
        }
        FlowKind::ThirdOrder => FlowParams::third_order(r.real("flow.a", 1.0)?, r.real("flow.b", 0.5)?),
        FlowKind::FourthOrder if has("flow.c1") || has("flow.cb") => {
            r.require(
                "flow.c1",
                !has("flow.a") && !has("flow.b") && !has("flow.c"),
                "flow.c1 and flow.cb cannot be combined with flow.a, flow.b or flow.c",
            )?;
            coefficient_map_f(r.real("flow.c1", 0.0)?, r.real("flow.cb", 0.0)?)
        }
        FlowKind::FourthOrder => FlowParams::fourth_order(r.real("flow.a", 0.0)?, r.real("flow.b", 0.0)?, r.real("flow.c", 0.0)?),
        FlowKind::FilamentThird => FlowParams::filament_third(r.real("flow.fm_a", r.real("flow.a", 0.0)?)?),
        FlowKind::FilamentFourth => FlowParams::filament_fourth(r.real("flow.c1", 0.0)?, r.real("flow.cb", 0.0)?),
    };
    params.validate().map_err(|e| CliError::Config(format!("flow: {e}")))?;
    Ok(params)
}

fn read_initial(r: &Reader<'_>, target: &Target) -> Result<InitialData, CliError> {
    let (name, at) = r.raw("initial.preset").unwrap_or(("bump", "initial.preset".to_string()));
    let z_star = r.complex("initial.z_star", Complex64::new(0.0, 0.5))?;
    Ok(match name {
        "constant_map" => {
            let point = r.parse("initial.point", None, "x,y,z or re,im", |v| match parse_list(v)?.as_slice() {
                [x, y, z] => Some(Some(ConstantPoint::Sphere(Vector3::new(*x, *y, *z)))),
                [re, im] => Some(Some(ConstantPoint::Chart(Complex64::new(*re, *im)))),
                _ => None,
            })?;
            let fits = match (&point, target) {
                (None, _) => true,
                (Some(ConstantPoint::Sphere(p)), Target::Sphere) => (p.norm() - 1.0).abs() <= 1e-12,
                (Some(ConstantPoint::Chart(_)), Target::Chart { .. }) => true,
                _ => false,
            };
            r.require("initial.point", fits, "needs a unit 3-vector on the sphere or re,im in a chart")?;
            InitialData::ConstantMap(point)
        }
        "great_circle" => InitialData::GreatCircle,
        "bump" => {
            let d = BumpParams::default();
            InitialData::Bump(BumpParams {
                amplitude: r.real("initial.amplitude", d.amplitude)?,
                sigma: r.positive("initial.sigma", d.sigma)?,
                center: r.opt_real("initial.center")?,
                z_star,
            })
        }
        "perturbed_geodesic" => InitialData::PerturbedGeodesic { epsilon: r.real("initial.epsilon", 0.1)? },
        "helix" => InitialData::Helix {
            radius: r.positive("initial.radius", 1.0)?,
            pitch: r.real("initial.pitch", 1.0)?,
            turns: r.count("initial.turns", 1)?,
        },
        "circle" => InitialData::Circle,
        "gaussian_filament" => InitialData::GaussianFilament {
            amplitude: r.real("initial.amplitude", 0.5)?,
            width: r.positive("initial.width", 1.0)?,
            twist: r.real("initial.twist", 0.5)?,
        },
        "random_bandlimited" => InitialData::RandomBandlimited {
            k_max: r.count("initial.k_max", 4)?,
            amplitude: r.real("initial.amplitude", 0.1)?,
            z_star,
        },
        other => {
            return Err(CliError::Config(format!(
                "{at}: unknown preset `{other}`; run `dispflow presets` for the list ({})",
                preset_names().join(", ")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<ScenarioConfig, CliError> {
        ScenarioConfig::from_ini(&Ini::parse(text)?)
    }

    #[test]
    fn defaults_describe_the_bump_scenario() {
        let c = cfg("").unwrap();
        assert_eq!(c.target, Target::Sphere);
        assert_eq!(c.grid.n_points, 256);
        assert!((c.grid.x_max - 2.0 * PI).abs() < 1e-15);
        assert_eq!(c.flow, FlowParams::third_order(1.0, 0.5));
        assert_eq!(c.initial, InitialData::Bump(BumpParams::default()));
        assert_eq!(c.evolution.dt, None);
        assert_eq!(c.evolution.t_final, 0.1);
    }

    #[test]
    fn pi_multiples() {
        assert_eq!(parse_real("2pi"), Some(2.0 * PI));
        assert_eq!(parse_real("-0.5*pi"), Some(-0.5 * PI));
        assert_eq!(parse_real("pi"), Some(PI));
        assert_eq!(parse_real("1e-3"), Some(1e-3));
        assert_eq!(parse_real("nan"), None);
        assert_eq!(parse_real("two"), None);
    }

    #[test]
    fn coefficient_maps() {
        let c = cfg("[flow]\nkind = third_order\nfm_a = 1\n").unwrap();
        assert_eq!(c.flow, coefficient_map_fm(1.0));
        let c = cfg("flow.kind = fourth_order\nflow.c1 = 0.05\nflow.cb = 0.1\n").unwrap();
        assert_eq!(c.flow, coefficient_map_f(0.05, 0.1));
        assert!(cfg("flow.fm_a = 1\nflow.a = 2\n").is_err());
    }

    #[test]
    fn errors_name_the_key_and_line() {
        let e = cfg("# x\nflow.kind = fifth_order\n").unwrap_err().to_string();
        assert!(e.contains("flow.kind") && e.contains("line 2") && e.contains("fifth_order"), "{e}");
        let e = cfg("grid.n = many\n").unwrap_err().to_string();
        assert!(e.contains("grid.n"), "{e}");
        let e = cfg("grid.spacing = 1\n").unwrap_err().to_string();
        assert!(e.contains("unknown key `grid.spacing`"), "{e}");
        let e = cfg("initial.preset = torus\n").unwrap_err().to_string();
        assert!(e.contains("dispflow presets"), "{e}");
        let e = cfg("grid.margin = -1\n").unwrap_err().to_string();
        assert!(e.contains("grid.margin"), "{e}");
    }

    #[test]
    fn preset_and_flow_must_agree() {
        let e = cfg("initial.preset = helix\n").unwrap_err().to_string();
        assert!(e.contains("filament"), "{e}");
        assert!(cfg("initial.preset = helix\nflow.kind = filament_third\nflow.fm_a = 1\n").is_ok());
        assert!(cfg("initial.preset = bump\nflow.kind = filament_third\n").is_err());
    }

    #[test]
    fn chart_targets() {
        let c = cfg("[target]\nkind = chart\nmetric = perturbed\nepsilon = 0.3\n").unwrap();
        assert_eq!(c.target, Target::Chart { metric: MetricPreset::Perturbed { epsilon: 0.3 } });
        assert!(cfg("target.kind = torus\n").is_err());
        assert!(cfg("target.kind = chart\ninitial.preset = constant_map\ninitial.point = 0,0,1\n").is_err());
    }
}
