//! Right-hand sides of the geometric flows, intrinsic (covariant) and, on
//! the sphere, extrinsic (ambient vector calculus) forms.

use nalgebra::Vector3;
use num_complex::Complex64;

use super::params::{FlowKind, FlowParams};
use crate::error::{Error, Result};
use crate::geometry::{ChartMetric, FieldData, MapField, TangentField, TargetSurface};
use crate::grid::Grid;

/// a∇_x²u_x + J_u∇_x u_x + b g(u_x,u_x) u_x.
pub fn rhs_third_order(u: &MapField, params: &FlowParams) -> Result<TangentField> {
    match params.kind {
        FlowKind::SchrodingerMap | FlowKind::ThirdOrder => {}
        other => {
            return Err(Error::Config(format!("rhs_third_order called with flow kind {}", other.name())))
        }
    }
    params.validate()?;
    third_order_data(u.grid(), u.surface(), u.data(), params.a, params.b).map(TangentField::new)
}

/// −aJ_u∇_x³u_x + {1 + b g(u_x,u_x)} J_u∇_x u_x + c g(∇_x u_x, u_x) J_u u_x.
pub fn rhs_fourth_order(u: &MapField, params: &FlowParams) -> Result<TangentField> {
    if params.kind != FlowKind::FourthOrder {
        return Err(Error::Config(format!(
            "rhs_fourth_order called with flow kind {}",
            params.kind.name()
        )));
    }
    params.validate()?;
    fourth_order_data(u.grid(), u.surface(), u.data(), params.a, params.b, params.c).map(TangentField::new)
}

/// Velocity u_t of any map flow (filament kinds use their map equivalent).
pub fn map_rhs(u: &MapField, params: &FlowParams) -> Result<TangentField> {
    map_rhs_data(u.grid(), u.surface(), u.data(), params).map(TangentField::new)
}

pub(crate) fn map_rhs_data(
    grid: &Grid,
    surface: &TargetSurface,
    data: &FieldData,
    params: &FlowParams,
) -> Result<FieldData> {
    let p = params.as_map_flow();
    match p.kind {
        FlowKind::SchrodingerMap | FlowKind::ThirdOrder => third_order_data(grid, surface, data, p.a, p.b),
        FlowKind::FourthOrder => fourth_order_data(grid, surface, data, p.a, p.b, p.c),
        FlowKind::FilamentThird | FlowKind::FilamentFourth => unreachable!("mapped above"),
    }
}

fn third_order_data(grid: &Grid, surface: &TargetSurface, data: &FieldData, a: f64, b: f64) -> Result<FieldData> {
    match (surface, data) {
        (TargetSurface::UnitSphere, FieldData::Sphere(p)) => {
            let d = grid.derivatives_vec3(p, 3)?;
            let (u1, u2, u3) = (&d[0], &d[1], &d[2]);
            Ok(FieldData::Sphere(
                (0..p.len())
                    .map(|i| {
                        let s11 = u1[i].dot(&u1[i]);
                        let s21 = u2[i].dot(&u1[i]);
                        let second = u3[i] + p[i] * (3.0 * s21) + u1[i] * s11;
                        second * a + p[i].cross(&u2[i]) + u1[i] * (b * s11)
                    })
                    .collect(),
            ))
        }
        (TargetSurface::Chart(m), FieldData::Chart(z)) => {
            let jet = chart_jet(grid, m, z, 2)?;
            let i = Complex64::i();
            Ok(FieldData::Chart(
                (0..z.len())
                    .map(|k| {
                        let g = jet.lambda[k] * jet.levels[0][k].norm_sqr();
                        jet.levels[2][k] * a + i * jet.levels[1][k] + jet.levels[0][k] * (b * g)
                    })
                    .collect(),
            ))
        }
        _ => Err(Error::Domain("map representation does not match the target surface".into())),
    }
}

fn fourth_order_data(
    grid: &Grid,
    surface: &TargetSurface,
    data: &FieldData,
    a: f64,
    b: f64,
    c: f64,
) -> Result<FieldData> {
    match (surface, data) {
        (TargetSurface::UnitSphere, FieldData::Sphere(p)) => {
            let d = grid.derivatives_vec3(p, 4)?;
            Ok(FieldData::Sphere(
                (0..p.len())
                    .map(|i| {
                        let (u1, u2, u3, u4) = (d[0][i], d[1][i], d[2][i], d[3][i]);
                        let s11 = u1.dot(&u1);
                        let s21 = u2.dot(&u1);
                        let s31 = u3.dot(&u1);
                        let s22 = u2.dot(&u2);
                        let third = u4 + p[i] * (4.0 * s31 + 3.0 * s22 + s11 * s11) + u1 * (5.0 * s21) + u2 * s11;
                        // g(∇u_x, u_x) = (u_xx, u_x) since (u, u_x) = 0
                        p[i].cross(&third) * (-a) + p[i].cross(&u2) * (1.0 + b * s11) + p[i].cross(&u1) * (c * s21)
                    })
                    .collect(),
            ))
        }
        (TargetSurface::Chart(m), FieldData::Chart(z)) => {
            let jet = chart_jet(grid, m, z, 3)?;
            let i = Complex64::i();
            Ok(FieldData::Chart(
                (0..z.len())
                    .map(|k| {
                        let l = jet.lambda[k];
                        let zx = jet.levels[0][k];
                        let g11 = l * zx.norm_sqr();
                        let g21 = l * (jet.levels[1][k] * zx.conj()).re;
                        i * (jet.levels[3][k] * (-a) + jet.levels[1][k] * (1.0 + b * g11) + zx * (c * g21))
                    })
                    .collect(),
            ))
        }
        _ => Err(Error::Domain("map representation does not match the target surface".into())),
    }
}

struct ChartJet {
    lambda: Vec<f64>,
    /// levels[k] = ∇_x^k z_x
    levels: Vec<Vec<Complex64>>,
}

fn chart_jet(grid: &Grid, m: &ChartMetric, z: &[Complex64], depth: usize) -> Result<ChartJet> {
    let lambda = z.iter().map(|z| m.lambda(*z)).collect::<Result<Vec<_>>>()?;
    let zx = grid.derivative_complex(z, 1)?;
    let conn: Vec<Complex64> = z.iter().zip(&zx).map(|(z, zx)| m.christoffel(*z) * zx).collect();
    let mut levels = vec![zx];
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let d = grid.derivative_complex(prev, 1)?;
        levels.push(d.iter().zip(prev).zip(&conn).map(|((d, v), w)| d + w * v).collect());
    }
    Ok(ChartJet { lambda, levels })
}

/// Sphere-only extrinsic velocity equation
/// u_t = u×u_xx + a{u_xxx + 3(u_xx,u_x)u + (3/2)|u_x|²u_x}; equals the
/// third-order flow with b = a/2.
pub fn rhs_third_order_extrinsic(u: &MapField, a: f64) -> Result<TangentField> {
    let p = u
        .sphere_points()
        .ok_or_else(|| Error::Domain("extrinsic form requires a sphere map".into()))?;
    let d = u.grid().derivatives_vec3(p, 3)?;
    Ok(TangentField::sphere(
        (0..p.len())
            .map(|i| {
                let (u1, u2, u3) = (d[0][i], d[1][i], d[2][i]);
                p[i].cross(&u2) + (u3 + p[i] * (3.0 * u2.dot(&u1)) + u1 * (1.5 * u1.dot(&u1))) * a
            })
            .collect(),
    ))
}

/// Sphere-only extrinsic velocity equation
/// u_t = u×u_xx − C1 u×u_xxxx + (Cb − 2C1)(|u_x|² u×u_x)_x,
/// with the last term differentiated on the grid as a product.
pub fn rhs_fourth_order_extrinsic(u: &MapField, c1: f64, cb: f64) -> Result<TangentField> {
    let p = u
        .sphere_points()
        .ok_or_else(|| Error::Domain("extrinsic form requires a sphere map".into()))?;
    let grid = u.grid();
    let d = grid.derivatives_vec3(p, 4)?;
    let product: Vec<Vector3<f64>> =
        (0..p.len()).map(|i| p[i].cross(&d[0][i]) * d[0][i].norm_squared()).collect();
    let product_x = grid.derivative_vec3(&product, 1)?;
    Ok(TangentField::sphere(
        (0..p.len())
            .map(|i| p[i].cross(&d[1][i]) - p[i].cross(&d[3][i]) * c1 + product_x[i] * (cb - 2.0 * c1))
            .collect(),
    ))
}
