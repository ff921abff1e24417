//! Target surfaces (unit sphere, conformal charts), maps into them and
//! covariant calculus along maps.

mod covariant;
mod field;
mod stereo;
mod surface;

pub use covariant::{
    covariant_derivative_x, covariant_jet, covariant_jet_closed, covariant_tower, covariant_tower_iterated,
    CovariantTower,
};
pub use field::{apply_j_field, check_on_sphere, pointwise_inner, FieldData, MapField, TangentField};
pub use stereo::{chart_to_sphere, chart_to_sphere_pushforward, sphere_to_chart};
pub use surface::{ChartMetric, MetricDensity, MetricPreset, Point, Tangent, TargetSurface, SPHERE_TOLERANCE};
