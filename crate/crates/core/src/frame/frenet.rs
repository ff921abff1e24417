//! Frenet–Serret data of arc-length filaments and the classical Hasimoto map
//! ψ = κ exp(i∫τ).

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::complex::ComplexField;
use crate::error::{Error, Result};
use crate::flows::FilamentState;
use crate::grid::CumulativeRule;

/// Curvature threshold below which the normal and torsion are undefined.
pub const FRENET_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FrenetData {
    pub tangent: Vec<Vector3<f64>>,
    /// `None` where the curvature is at or below the threshold.
    pub normal: Vec<Option<Vector3<f64>>>,
    pub binormal: Vec<Option<Vector3<f64>>>,
    pub curvature: Vec<f64>,
    pub torsion: Vec<Option<f64>>,
}

impl FrenetData {
    /// Indices where the frame is undefined.
    pub fn undefined(&self) -> Vec<usize> {
        self.normal.iter().enumerate().filter(|(_, n)| n.is_none()).map(|(i, _)| i).collect()
    }
}

pub fn frenet_frame(x: &FilamentState) -> Result<FrenetData> {
    frenet_frame_with(x, FRENET_EPSILON)
}

pub fn frenet_frame_with(x: &FilamentState, epsilon: f64) -> Result<FrenetData> {
    let d = x.derivatives(3)?;
    let n = x.len();
    let mut out = FrenetData {
        tangent: d[0].clone(),
        normal: Vec::with_capacity(n),
        binormal: Vec::with_capacity(n),
        curvature: Vec::with_capacity(n),
        torsion: Vec::with_capacity(n),
    };
    for ((&t, &x2), &x3) in d[0].iter().zip(&d[1]).zip(&d[2]) {
        let k = x2.norm();
        out.curvature.push(k);
        if k > epsilon {
            let nv = x2 / k;
            out.normal.push(Some(nv));
            out.binormal.push(Some(t.cross(&nv)));
            out.torsion.push(Some(t.cross(&x2).dot(&x3) / (k * k)));
        } else {
            out.normal.push(None);
            out.binormal.push(None);
            out.torsion.push(None);
        }
    }
    if out.normal.iter().all(Option::is_none) {
        return Err(Error::FrameUndefined { threshold: epsilon, points: n });
    }
    Ok(out)
}

/// ψ = κ exp(i∫_{x_left}^x τ) with cumulative trapezoid; refuses curves with
/// any point of (numerically) vanishing curvature.
pub fn classical_hasimoto(x: &FilamentState) -> Result<ComplexField> {
    let f = frenet_frame(x)?;
    let bad = f.undefined().len();
    if bad > 0 {
        return Err(Error::FrameUndefined { threshold: FRENET_EPSILON, points: bad });
    }
    let tau: Vec<f64> = f.torsion.iter().map(|t| t.expect("checked above")).collect();
    let phase = x.grid().cumulative(&tau, CumulativeRule::Trapezoid);
    ComplexField::new(
        x.grid().clone(),
        f.curvature.iter().zip(&phase).map(|(k, p)| Complex64::from_polar(*k, *p)).collect(),
    )
}
