//! Reduced complex equations: NLS, Hirota, the fourth-order filament
//! reduction and the general third- and fourth-order reductions with their
//! curvature-dependent nonlocal brackets.

mod evolve;
mod params;
mod rhs;

pub use crate::complex::{ComplexField, ComplexJet};
pub use evolve::{evolve_reduced, ReducedTrajectory};
pub use params::{CurvatureTrace, KappaMode, ReducedKind, ReducedParams};
pub use rhs::{
    apply_gauge, nonlocal_accumulate, nonlocal_accumulate_with, reduced_rhs, reduced_rhs_jet, required_depth,
    rhs_fourth_reduced, rhs_fourth_reduced_products, rhs_hirota, rhs_nls, rhs_schrodinger_reduced, rhs_t3rd,
    rhs_t4th,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::flows::{coefficient_map_f, coefficient_map_fm, EvolutionConfig};
    use crate::grid::{CumulativeRule, Grid};
    use crate::presets::random_bandlimited;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn grid() -> Grid {
        Grid::periodic(32, 0.0, 2.0 * PI).unwrap()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn plane_wave(g: &Grid, amp: f64, k: f64) -> ComplexField {
        ComplexField::new(g.clone(), g.coordinates().iter().map(|x| Complex64::from_polar(amp, k * x)).collect()).unwrap()
    }

    #[test]
    fn third_order_reduction_specializes_to_hirota() {
        let g = grid();
        for seed in 0..5 {
            let q = random_bandlimited(&g, seed, 5, 0.8).unwrap();
            let jet = ComplexJet::from_field(&q, 4).unwrap();
            for a in [0.0, 0.3, -1.7] {
                let m = coefficient_map_fm(a);
                let lhs = rhs_t3rd(&jet, &ReducedParams::t3rd(m.a, m.b, 1.0), None, &g).unwrap();
                let rhs = rhs_hirota(&jet, a).unwrap();
                assert!(max_diff(&lhs, &rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn fourth_order_reduction_specializes_to_filament_reduction() {
        let g = grid();
        for seed in 0..5 {
            let q = random_bandlimited(&g, 10 + seed, 5, 0.8).unwrap();
            let jet = ComplexJet::from_field(&q, 4).unwrap();
            for (c1, cb) in [(0.0, 0.0), (0.2, 0.5), (-0.4, 1.3)] {
                let m = coefficient_map_f(c1, cb);
                let lhs = rhs_t4th(&jet, &ReducedParams::t4th(m.a, m.b, m.c, 1.0), None, &g).unwrap();
                let rhs = rhs_fourth_reduced(&jet, c1, cb).unwrap();
                assert!(max_diff(&lhs, &rhs) < 1e-11);
            }
        }
    }

    #[test]
    fn expanded_and_product_forms_agree() {
        let g = Grid::periodic(128, 0.0, 2.0 * PI).unwrap();
        let q = random_bandlimited(&g, 3, 4, 0.9).unwrap();
        let jet = ComplexJet::from_field(&q, 4).unwrap();
        let a = rhs_fourth_reduced(&jet, 0.3, 0.7).unwrap();
        let b = rhs_fourth_reduced_products(&q, 0.3, 0.7).unwrap();
        assert!(max_diff(&a, &b) < 1e-9);
    }

    #[test]
    fn lower_order_specializations() {
        let g = grid();
        let q = random_bandlimited(&g, 21, 5, 0.5).unwrap();
        let jet = ComplexJet::from_field(&q, 4).unwrap();
        let nls = rhs_nls(&jet).unwrap();
        assert!(max_diff(&rhs_hirota(&jet, 0.0).unwrap(), &nls) < 1e-14);
        assert!(max_diff(&rhs_fourth_reduced(&jet, 0.0, 0.0).unwrap(), &nls) < 1e-14);
        let s = rhs_schrodinger_reduced(&jet, &ReducedParams::schrodinger_reduced(1.0), None, &g).unwrap();
        assert!(max_diff(&s, &nls) < 1e-14);
        let t3 = rhs_t3rd(&jet, &ReducedParams::t3rd(0.0, 0.0, 1.0), None, &g).unwrap();
        assert!(max_diff(&t3, &nls) < 1e-14);
    }

    #[test]
    fn plane_wave_dispersion() {
        let g = grid();
        let (amp, k) = (0.7, 3.0);
        let q = plane_wave(&g, amp, k);
        let nls = reduced_rhs(&q, &ReducedParams::nls(), None).unwrap();
        let omega = k * k - amp * amp / 2.0;
        for (r, v) in nls.iter().zip(q.values()) {
            assert!((r - (-I * omega * v)).norm() < 1e-10);
        }
        let a = 0.4;
        let h = reduced_rhs(&q, &ReducedParams::hirota(a), None).unwrap();
        let omega = omega + a * (k.powi(3) - 1.5 * amp * amp * k);
        for (r, v) in h.iter().zip(q.values()) {
            assert!((r - (-I * omega * v)).norm() < 1e-9);
        }
    }

    #[test]
    fn hirota_standing_wave_is_exact() {
        let g = grid();
        let q0 = plane_wave(&g, 1.0, 1.0);
        let p = ReducedParams::hirota(1.0);
        let cfg = EvolutionConfig::stable_for(&g, &p.stiffness_terms(), 0.5);
        let tr = evolve_reduced(&q0, &p, &cfg).unwrap();
        assert!(max_diff(tr.final_state().values(), q0.values()) < 1e-10);
    }

    #[test]
    fn nls_plane_wave_phase_and_mass() {
        let g = grid();
        let (amp, k) = (0.5, 2.0);
        let q0 = plane_wave(&g, amp, k);
        let t = 0.3;
        let cfg = EvolutionConfig::new(1e-3, t);
        let tr = evolve_reduced(&q0, &ReducedParams::nls(), &cfg).unwrap();
        let rot = Complex64::from_polar(1.0, -(k * k - amp * amp / 2.0) * t);
        let expected: Vec<Complex64> = q0.values().iter().map(|v| v * rot).collect();
        assert!(max_diff(tr.final_state().values(), &expected) < 1e-9);

        let q1 = random_bandlimited(&g, 5, 3, 0.6).unwrap();
        let p = ReducedParams::hirota(0.5);
        let tr = evolve_reduced(&q1, &p, &EvolutionConfig::stable_for(&g, &p.stiffness_terms(), 0.1)).unwrap();
        assert!(tr.mass_drift() < 1e-8, "{}", tr.mass_drift());
    }

    #[test]
    fn t4th_with_flat_quartic_part() {
        let g = Grid::periodic(128, 0.0, 2.0 * PI).unwrap();
        let q = random_bandlimited(&g, 9, 4, 0.7).unwrap();
        let b = 0.6;
        let got = reduced_rhs(&q, &ReducedParams::t4th(0.0, b, 0.0, 1.0), None).unwrap();
        let v = q.values();
        let q_x = g.derivative_complex(v, 1).unwrap();
        let flux: Vec<Complex64> = v.iter().zip(&q_x).map(|(z, d)| d * z.norm_sqr()).collect();
        let flux_x = g.derivative_complex(&flux, 1).unwrap();
        let q_xx = g.derivative_complex(v, 2).unwrap();
        let oracle: Vec<Complex64> = (0..v.len())
            .map(|k| {
                let m = v[k].norm_sqr();
                I * q_xx[k] + I * b * flux_x[k] + I * 0.5 * m * v[k] + I * (0.25 * b * m * m) * v[k]
            })
            .collect();
        assert!(max_diff(&got, &oracle) < 1e-9);
    }

    #[test]
    fn nonlocal_terms_need_a_trace() {
        let g = grid();
        let q = random_bandlimited(&g, 1, 3, 0.4).unwrap();
        let p = ReducedParams::t3rd(0.2, 0.1, 1.0).with_field(CumulativeRule::Cubic);
        assert!(matches!(reduced_rhs(&q, &p, None), Err(Error::Config(_))));
        let mut bad = ReducedParams::t3rd(0.2, 0.1, 1.0);
        bad.nonlocal = true;
        assert!(matches!(reduced_rhs(&q, &bad, None), Err(Error::Config(_))));
        let trace = CurvatureTrace::constant(g.len(), 1.0);
        let with = reduced_rhs(&q, &p, Some(&trace)).unwrap();
        let without = reduced_rhs(&q, &ReducedParams::t3rd(0.2, 0.1, 1.0), None).unwrap();
        assert!(max_diff(&with, &without) < 1e-14);
        assert!(matches!(
            evolve_reduced(&q, &p, &EvolutionConfig::new(1e-3, 0.01)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn nonlocal_bracket_matches_closed_form() {
        let g = Grid::line(201, 0.0, 1.0).unwrap();
        let n = g.len();
        let q = ComplexField::new(g.clone(), vec![Complex64::new(0.0, 1.0); n]).unwrap();
        let xs = g.coordinates();
        let trace = CurvatureTrace { kappa: xs.iter().map(|x| 1.0 + x).collect(), kappa_x: vec![1.0; n] };
        let p = ReducedParams::schrodinger_reduced(1.0).with_field(CumulativeRule::Cubic);
        let got = reduced_rhs(&q, &p, Some(&trace)).unwrap();
        for (k, x) in xs.iter().enumerate() {
            let expected = I * (0.5 * (1.0 + x)) * I - I * (0.5 * x) * I;
            assert!((got[k] - expected).norm() < 1e-9);
        }
        let acc = nonlocal_accumulate(&g, &vec![2.0; n]);
        assert!((acc[n - 1] - 2.0).abs() < 1e-12 && acc[0] == 0.0);
    }

    #[test]
    fn gauge_term_rotates() {
        let q = vec![Complex64::new(1.0, 2.0)];
        let mut r = vec![Complex64::new(0.0, 0.0)];
        apply_gauge(&mut r, &q, 0.5);
        assert!((r[0] - (-I * 0.5 * q[0])).norm() < 1e-15);
    }

    #[test]
    fn kinds_round_trip() {
        for k in [
            ReducedKind::Nls,
            ReducedKind::Hirota,
            ReducedKind::FourthReduced,
            ReducedKind::T3rd,
            ReducedKind::T4th,
            ReducedKind::SchrodingerReduced,
        ] {
            assert_eq!(ReducedKind::parse(k.name()), Some(k));
        }
    }
}
