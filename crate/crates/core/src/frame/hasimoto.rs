//! Generalized Hasimoto coordinates: u_x = q₁e + q₂Je, u_t = p₁e + p₂Je.

use num_complex::Complex64;

use super::parallel::{frame_components, FrameField};
use crate::complex::{ComplexField, ComplexJet};
use crate::error::Result;
use crate::geometry::{covariant_jet_closed, TangentField};

/// q = g(u_x, e) + i g(u_x, Je).
pub fn hasimoto_q(frame: &FrameField) -> Result<ComplexField> {
    let u_x = frame.base().velocity()?;
    let q = frame_components(frame, &u_x)?;
    ComplexField::new(frame.base().grid().clone(), q)
}

/// p = g(u_t, e) + i g(u_t, Je).
pub fn hasimoto_p(u_t: &TangentField, frame: &FrameField) -> Result<ComplexField> {
    let p = frame_components(frame, u_t)?;
    ComplexField::new(frame.base().grid().clone(), p)
}

/// q and its x-derivatives as frame components of u_x, ∇u_x, …, ∇^depth u_x.
/// Since ∇_x e = 0 these equal ∂_x^k q, and unlike grid differentiation of q
/// they are unaffected by the holonomy jump of the frame across a periodic seam.
pub fn tower_jet(frame: &FrameField, depth: usize) -> Result<ComplexJet> {
    let tower = covariant_jet_closed(frame.base(), depth)?;
    let levels = tower.iter().map(|v| frame_components(frame, v)).collect::<Result<Vec<_>>>()?;
    ComplexJet::from_levels(levels)
}

/// p = a q_xx + i q_x + b|q|²q (needs jet depth 2).
pub fn p_from_q_third(q: &ComplexJet, a: f64, b: f64) -> Result<Vec<Complex64>> {
    q.require(2)?;
    let i = Complex64::i();
    Ok((0..q.len())
        .map(|k| {
            let (q0, q1, q2) = (q.q()[k], q.level(1)[k], q.level(2)[k]);
            q2 * a + i * q1 + q0 * (b * q0.norm_sqr())
        })
        .collect())
}

/// p = i{q_x − a q_xxx + b|q|²q_x + (c/2)(|q|²)_x q} (needs jet depth 3).
pub fn p_from_q_fourth(q: &ComplexJet, a: f64, b: f64, c: f64) -> Result<Vec<Complex64>> {
    q.require(3)?;
    let i = Complex64::i();
    Ok((0..q.len())
        .map(|k| {
            let (q0, q1, q3) = (q.q()[k], q.level(1)[k], q.level(3)[k]);
            let mod2_x = 2.0 * (q0.conj() * q1).re;
            i * (q1 - q3 * a + q1 * (b * q0.norm_sqr()) + q0 * (0.5 * c * mod2_x))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{rhs_fourth_order, rhs_third_order, FlowParams};
    use crate::frame::parallel::parallel_frame_projected;
    use crate::geometry::{chart_to_sphere, pointwise_inner, ChartMetric, MapField, MetricPreset, Tangent};
    use crate::grid::Grid;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    #[test]
    fn great_circle_has_q_minus_i() {
        let g = Grid::periodic(64, 0.0, 2.0 * PI).unwrap();
        let pts = g.coordinates().iter().map(|x| Vector3::new(x.cos(), x.sin(), 0.0)).collect();
        let u = MapField::sphere(g, pts).unwrap();
        let f = crate::frame::parallel_frame(&u, Tangent::Sphere(Vector3::z())).unwrap();
        let q = hasimoto_q(&f).unwrap();
        assert!(q.values().iter().all(|v| (v + Complex64::i()).norm() < 1e-12));
    }

    fn sample(chart: bool, n: usize) -> MapField {
        let g = Grid::periodic(n, 0.0, 2.0 * PI).unwrap();
        let z: Vec<Complex64> = g
            .coordinates()
            .iter()
            .map(|x| Complex64::new(0.2 + 0.6 * x.cos(), 0.3 * (2.0 * x).sin() - 0.5 * x.sin()))
            .collect();
        if chart {
            MapField::chart(g, ChartMetric::preset(MetricPreset::Perturbed { epsilon: 0.3 }), z).unwrap()
        } else {
            MapField::sphere(g, z.iter().map(|z| chart_to_sphere(*z)).collect()).unwrap()
        }
    }

    fn reference(chart: bool) -> Tangent {
        if chart {
            Tangent::Chart(Complex64::new(1.0, 0.0))
        } else {
            Tangent::Sphere(Vector3::x())
        }
    }

    #[test]
    fn modulus_identities() {
        for chart in [false, true] {
            let u = sample(chart, 128);
            let f = parallel_frame_projected(&u, reference(chart)).unwrap();
            let q = hasimoto_q(&f).unwrap();
            let ux = u.velocity().unwrap();
            let g = pointwise_inner(&u, &ux, &ux).unwrap();
            for (a, b) in q.values().iter().zip(&g) {
                assert!((a.norm_sqr() - b).abs() < 1e-10);
            }
            let ut = rhs_third_order(&u, &FlowParams::third_order(0.4, 0.3)).unwrap();
            let p = hasimoto_p(&ut, &f).unwrap();
            let gt = pointwise_inner(&u, &ut, &ut).unwrap();
            for (a, b) in p.values().iter().zip(&gt) {
                assert!((a.norm_sqr() - b).abs() < 1e-10 * (1.0 + b));
            }
        }
    }

    #[test]
    fn transformed_velocity_matches_p_from_q() {
        for chart in [false, true] {
            let u = sample(chart, 128);
            let f = parallel_frame_projected(&u, reference(chart)).unwrap();
            let jet = tower_jet(&f, 3).unwrap();
            let (a, b, c) = (0.7, -0.4, 0.9);
            let p3 = hasimoto_p(&rhs_third_order(&u, &FlowParams::third_order(a, b)).unwrap(), &f).unwrap();
            let p3q = p_from_q_third(&jet, a, b).unwrap();
            let p4 = hasimoto_p(&rhs_fourth_order(&u, &FlowParams::fourth_order(a, b, c)).unwrap(), &f).unwrap();
            let p4q = p_from_q_fourth(&jet, a, b, c).unwrap();
            for k in 0..u.len() {
                assert!((p3.values()[k] - p3q[k]).norm() < 1e-9 * (1.0 + p3q[k].norm()));
                assert!((p4.values()[k] - p4q[k]).norm() < 1e-9 * (1.0 + p4q[k].norm()));
            }
        }
    }

    #[test]
    fn tower_jet_matches_differentiated_q_on_open_curves() {
        let g = Grid::line(401, -4.0, 4.0).unwrap();
        let z: Vec<Complex64> =
            g.coordinates().iter().map(|x| Complex64::new(0.3 * (-x * x).exp(), 0.2 * x.tanh())).collect();
        let u = MapField::sphere(g, z.iter().map(|z| chart_to_sphere(*z)).collect()).unwrap();
        let f = parallel_frame_projected(&u, Tangent::Sphere(Vector3::x())).unwrap();
        let jet = tower_jet(&f, 2).unwrap();
        let fd = ComplexJet::from_field(&hasimoto_q(&f).unwrap(), 2).unwrap();
        for k in 0..=2 {
            let err = jet.level(k).iter().zip(fd.level(k)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-5, "level {k}: {err}");
        }
    }

    #[test]
    fn plane_wave_substitution() {
        let g = Grid::periodic(32, 0.0, 2.0 * PI).unwrap();
        let k = 2.0;
        let q = ComplexField::new(g.clone(), g.coordinates().iter().map(|x| Complex64::from_polar(1.0, k * x)).collect())
            .unwrap();
        let jet = ComplexJet::from_field(&q, 3).unwrap();
        let (a, b) = (0.5, 0.25);
        let p = p_from_q_third(&jet, a, b).unwrap();
        for (pv, qv) in p.iter().zip(q.values()) {
            assert!((pv - qv * (-a * k * k - k + b)).norm() < 1e-11);
        }
        // |q| constant: p = i(ik + a i k³) q
        let p4 = p_from_q_fourth(&jet, a, b, 0.3).unwrap();
        let factor = Complex64::i() * Complex64::i() * (k + a * k * k * k + b * k);
        for (pv, qv) in p4.iter().zip(q.values()) {
            assert!((pv - qv * factor).norm() < 1e-10);
        }
    }
}
