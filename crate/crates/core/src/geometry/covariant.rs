//! Covariant differentiation along maps.
//!
//! Sphere: ∇_x V = V_x + (V, u_x) u. Chart: ∇_x V = V_x + Γ(z) z_x V with
//! Γ = ∂_z log λ (the only nonzero Christoffel symbol of g = λ|dz|²).

use nalgebra::Vector3;
use num_complex::Complex64;

use super::field::{FieldData, MapField, TangentField};
use super::surface::TargetSurface;
use crate::error::{Error, Result};

/// Spectral tail fraction above which differentiation is reported as under-resolved.
const TAIL_WARNING: f64 = 1e-10;

/// ∇_x V along u.
pub fn covariant_derivative_x(u: &MapField, v: &TangentField) -> Result<TangentField> {
    warn_if_under_resolved(u, v);
    covariant_derivative_unchecked(u, v, None)
}

/// `u_x` may be supplied to skip recomputing it.
pub(crate) fn covariant_derivative_unchecked(
    u: &MapField,
    v: &TangentField,
    u_x: Option<&TangentField>,
) -> Result<TangentField> {
    let grid = u.grid();
    let owned;
    let u_x = match u_x {
        Some(ux) => ux,
        None => {
            owned = u.velocity()?;
            &owned
        }
    };
    match (u.surface(), u.data(), v.data(), u_x.data()) {
        (TargetSurface::UnitSphere, FieldData::Sphere(p), FieldData::Sphere(vv), FieldData::Sphere(ux)) => {
            let vx = grid.derivative_vec3(vv, 1)?;
            Ok(TangentField::sphere(
                (0..p.len()).map(|i| vx[i] + p[i] * vv[i].dot(&ux[i])).collect(),
            ))
        }
        (TargetSurface::Chart(m), FieldData::Chart(z), FieldData::Chart(vv), FieldData::Chart(zx)) => {
            let vx = grid.derivative_complex(vv, 1)?;
            Ok(TangentField::chart(
                (0..z.len()).map(|i| vx[i] + m.christoffel(z[i]) * zx[i] * vv[i]).collect(),
            ))
        }
        _ => Err(Error::Domain("field representations do not match".into())),
    }
}

fn warn_if_under_resolved(u: &MapField, v: &TangentField) {
    let grid = u.grid();
    let tail = match v.data() {
        FieldData::Sphere(vv) => (0..3)
            .filter_map(|c| {
                let comp: Vec<Complex64> = vv.iter().map(|x| Complex64::new(x[c], 0.0)).collect();
                grid.tail_energy_fraction(&comp)
            })
            .fold(0.0, f64::max),
        FieldData::Chart(vv) => grid.tail_energy_fraction(vv).unwrap_or(0.0),
    };
    if tail > TAIL_WARNING {
        log::warn!(
            "covariant derivative on an under-resolved field: {:.2e} of the spectral energy sits in the top quarter of wavenumbers",
            tail
        );
    }
}

/// u_x together with ∇_x u_x, ∇_x² u_x, ∇_x³ u_x.
#[derive(Debug, Clone)]
pub struct CovariantTower {
    pub u_x: TangentField,
    pub first: TangentField,
    pub second: TangentField,
    pub third: TangentField,
}

/// Covariant tower from closed forms on the sphere; by iteration in a chart.
pub fn covariant_tower(u: &MapField) -> Result<CovariantTower> {
    match u.data() {
        FieldData::Sphere(p) => {
            let d = u.grid().derivatives_vec3(p, 4)?;
            let (u1, u2, u3, u4) = (&d[0], &d[1], &d[2], &d[3]);
            let n = p.len();
            let mut first = Vec::with_capacity(n);
            let mut second = Vec::with_capacity(n);
            let mut third = Vec::with_capacity(n);
            for i in 0..n {
                let s = sphere_closed_forms(p[i], u1[i], u2[i], u3[i], u4[i]);
                first.push(s[0]);
                second.push(s[1]);
                third.push(s[2]);
            }
            Ok(CovariantTower {
                u_x: TangentField::sphere(u1.clone()),
                first: TangentField::sphere(first),
                second: TangentField::sphere(second),
                third: TangentField::sphere(third),
            })
        }
        FieldData::Chart(_) => covariant_tower_iterated(u),
    }
}

/// ∇u_x, ∇²u_x, ∇³u_x on the sphere from u and its first four x-derivatives.
pub(crate) fn sphere_closed_forms(
    u: Vector3<f64>,
    u1: Vector3<f64>,
    u2: Vector3<f64>,
    u3: Vector3<f64>,
    u4: Vector3<f64>,
) -> [Vector3<f64>; 3] {
    let s11 = u1.dot(&u1);
    let s21 = u2.dot(&u1);
    let s31 = u3.dot(&u1);
    let s22 = u2.dot(&u2);
    [
        u2 + u * s11,
        u3 + u * (3.0 * s21) + u1 * s11,
        u4 + u * (4.0 * s31 + 3.0 * s22 + s11 * s11) + u1 * (5.0 * s21) + u2 * s11,
    ]
}

/// The tower by repeated application of ∇_x (the independent route).
pub fn covariant_tower_iterated(u: &MapField) -> Result<CovariantTower> {
    let mut jet = covariant_jet(u, 3)?;
    let third = jet.pop().unwrap();
    let second = jet.pop().unwrap();
    let first = jet.pop().unwrap();
    let u_x = jet.pop().unwrap();
    Ok(CovariantTower { u_x, first, second, third })
}

/// `[u_x, ∇u_x, …, ∇^depth u_x]` by iterating ∇_x.
pub fn covariant_jet(u: &MapField, depth: usize) -> Result<Vec<TangentField>> {
    let u_x = u.velocity()?;
    let mut out = vec![u_x.clone()];
    for _ in 0..depth {
        let next = covariant_derivative_unchecked(u, out.last().unwrap(), Some(&u_x))?;
        out.push(next);
    }
    Ok(out)
}

/// `[u_x, ∇u_x, …, ∇^depth u_x]`, using the sphere closed forms up to order
/// three and iterating beyond.
pub fn covariant_jet_closed(u: &MapField, depth: usize) -> Result<Vec<TangentField>> {
    if !u.surface().is_sphere() {
        return covariant_jet(u, depth);
    }
    let t = covariant_tower(u)?;
    let u_x = t.u_x.clone();
    let mut out = vec![t.u_x, t.first, t.second, t.third];
    out.truncate(depth + 1);
    while out.len() < depth + 1 {
        let next = covariant_derivative_unchecked(u, out.last().unwrap(), Some(&u_x))?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::field::pointwise_inner;
    use crate::geometry::surface::{ChartMetric, MetricPreset};
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn circle(k: f64, n: usize) -> MapField {
        let g = Grid::periodic(n, 0.0, 2.0 * PI).unwrap();
        let pts = g.coordinates().iter().map(|x| Vector3::new((k * x).cos(), (k * x).sin(), 0.0)).collect();
        MapField::sphere(g, pts).unwrap()
    }

    fn max_norm(v: &TangentField) -> f64 {
        v.as_sphere().unwrap().iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn great_circle_is_a_geodesic() {
        for k in [1.0, 2.0] {
            let u = circle(k, 64);
            let ux = u.velocity().unwrap();
            assert!(max_norm(&covariant_derivative_x(&u, &ux).unwrap()) < 1e-11);
            let t = covariant_tower(&u).unwrap();
            assert!(max_norm(&t.first) < 1e-11);
            assert!(max_norm(&t.second) < 1e-10);
            assert!(max_norm(&t.third) < 1e-9);
        }
    }

    #[test]
    fn normal_vector_is_parallel_along_equator() {
        let u = circle(1.0, 32);
        let v = TangentField::sphere(vec![Vector3::z(); 32]);
        assert!(max_norm(&covariant_derivative_x(&u, &v).unwrap()) < 1e-13);
    }

    #[test]
    fn constant_map_tower_vanishes() {
        let g = Grid::periodic(32, 0.0, 1.0).unwrap();
        let p = Vector3::new(0.6, 0.0, 0.8);
        let u = MapField::sphere(g, vec![p; 32]).unwrap();
        let t = covariant_tower(&u).unwrap();
        for f in [&t.u_x, &t.first, &t.second, &t.third] {
            assert!(max_norm(f) < 1e-12);
        }
    }

    #[test]
    fn round_chart_equator_is_a_geodesic() {
        let g = Grid::periodic(64, 0.0, 2.0 * PI).unwrap();
        let z = g.coordinates().iter().map(|x| Complex64::from_polar(1.0, *x)).collect();
        let u = MapField::chart(g, ChartMetric::preset(MetricPreset::Round), z).unwrap();
        let t = covariant_tower(&u).unwrap();
        for f in [&t.first, &t.second, &t.third] {
            let m = f.as_chart().unwrap().iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(m < 1e-9, "{m}");
        }
        let speed = pointwise_inner(&u, &t.u_x, &t.u_x).unwrap();
        assert!(speed.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }
}
