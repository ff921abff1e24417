//! Right-hand sides of the reduced complex equations. All products are
//! expanded into monomials of q, q̄ and their x-derivatives, so formulas that
//! agree algebraically agree to round-off on shared derivative fields.

use std::borrow::Cow;

use num_complex::Complex64;

use super::params::{CurvatureTrace, KappaMode, ReducedKind, ReducedParams};
use crate::complex::{ComplexField, ComplexJet};
use crate::error::{Error, Result};
use crate::grid::{CumulativeRule, Grid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Running integral ∫_{x_left}^x f dx′ (trapezoid); first entry zero.
pub fn nonlocal_accumulate(grid: &Grid, f: &[f64]) -> Vec<f64> {
    grid.cumulative(f, CumulativeRule::Trapezoid)
}

pub fn nonlocal_accumulate_with(grid: &Grid, f: &[f64], rule: CumulativeRule) -> Vec<f64> {
    grid.cumulative(f, rule)
}

/// iψ_xx + (i/2)|ψ|²ψ.
pub fn rhs_nls(q: &ComplexJet) -> Result<Vec<Complex64>> {
    q.require(2)?;
    Ok((0..q.len()).map(|k| nls_term(q, k)).collect())
}

fn nls_term(q: &ComplexJet, k: usize) -> Complex64 {
    let q0 = q.q()[k];
    I * q.level(2)[k] + I * 0.5 * q0.norm_sqr() * q0
}

/// iψ_xx + (i/2)|ψ|²ψ + a{ψ_xxx + (3/2)|ψ|²ψ_x}.
pub fn rhs_hirota(q: &ComplexJet, a: f64) -> Result<Vec<Complex64>> {
    q.require(3)?;
    Ok((0..q.len())
        .map(|k| {
            let q0 = q.q()[k];
            nls_term(q, k) + (q.level(3)[k] + q.level(1)[k] * (1.5 * q0.norm_sqr())) * a
        })
        .collect())
}

/// The fourth-order filament reduction, expanded:
/// iψ_xx + (i/2)|ψ|²ψ − iC1ψ_xxxx + i(2Cb − C1)|ψ|²ψ_xx + iCb ψ²ψ̄_xx
/// + i(2Cb − C1/2)ψ̄ψ_x² + i(4Cb + C1)ψ|ψ_x|² + (3/4)iCb|ψ|⁴ψ.
pub fn rhs_fourth_reduced(q: &ComplexJet, c1: f64, cb: f64) -> Result<Vec<Complex64>> {
    q.require(4)?;
    Ok((0..q.len())
        .map(|k| {
            let (q0, q1, q2, q4) = (q.q()[k], q.level(1)[k], q.level(2)[k], q.level(4)[k]);
            let m = q0.norm_sqr();
            nls_term(q, k)
                + I * (q4 * (-c1)
                    + q2 * (m * (2.0 * cb - c1))
                    + q0 * q0 * q2.conj() * cb
                    + q0.conj() * q1 * q1 * (2.0 * cb - 0.5 * c1)
                    + q0 * (q1.norm_sqr() * (4.0 * cb + c1))
                    + q0 * (0.75 * cb * m * m))
        })
        .collect())
}

/// The same equation with (|ψ|²)_xx and (|ψ|²ψ)_xx obtained by grid
/// differentiation of the products (independent route).
pub fn rhs_fourth_reduced_products(psi: &ComplexField, c1: f64, cb: f64) -> Result<Vec<Complex64>> {
    let g = psi.grid();
    let q = psi.values();
    let d = g.derivatives_complex(q, 4)?;
    let m: Vec<f64> = q.iter().map(|z| z.norm_sqr()).collect();
    let m_xx = g.derivative(&m, 2)?;
    let cubic: Vec<Complex64> = q.iter().zip(&m).map(|(z, m)| z * m).collect();
    let cubic_xx = g.derivative_complex(&cubic, 2)?;
    Ok((0..q.len())
        .map(|k| {
            let (q0, q1, q2, q4) = (q[k], d[0][k], d[1][k], d[3][k]);
            I * q2 + I * 0.5 * m[k] * q0
                - I * c1
                    * (q4 + (m[k] * q2 + q1 * q1 * q0.conj()) * 1.5
                        + q0 * (0.375 * m[k] * m[k] + 0.5 * m_xx[k]))
                + I * (cb + 0.5 * c1) * (cubic_xx[k] + cubic[k] * (0.75 * m[k]))
        })
        .collect())
}

/// κ samples and, when the nonlocal brackets are on, κ_x samples.
type KappaPair<'a> = (Cow<'a, [f64]>, Option<&'a [f64]>);

fn resolve_kappa<'a>(
    params: &ReducedParams,
    trace: Option<&'a CurvatureTrace>,
    n: usize,
) -> Result<KappaPair<'a>> {
    params.validate()?;
    match params.kappa {
        KappaMode::Constant { value } => Ok((Cow::Owned(vec![value; n]), None)),
        KappaMode::Field => {
            let t = trace.ok_or_else(|| {
                Error::Config(format!("{} with a curvature field needs a sampled κ along u", params.kind.name()))
            })?;
            if t.len() != n {
                return Err(Error::Domain("curvature trace does not match the field".into()));
            }
            Ok((Cow::Borrowed(&t.kappa), params.nonlocal.then_some(&t.kappa_x[..])))
        }
    }
}

/// General third-order reduction
/// q_t = aq_xxx + iq_xx + (aκ/2 + 2b)|q|²q_x − (aκ/2 − b)q²q̄_x
///       + ia[∫κ_x Im(qq̄_x)]q − (i/2)[∫κ_x|q|²]q + (i/2)κ|q|²q.
pub fn rhs_t3rd(q: &ComplexJet, params: &ReducedParams, trace: Option<&CurvatureTrace>, grid: &Grid) -> Result<Vec<Complex64>> {
    q.require(3)?;
    let n = q.len();
    let (a, b) = (params.a, params.b);
    let (kappa, kappa_x) = resolve_kappa(params, trace, n)?;
    let bracket = match kappa_x {
        Some(kx) => {
            let f: Vec<f64> = (0..n)
                .map(|k| {
                    let (q0, q1) = (q.q()[k], q.level(1)[k]);
                    kx[k] * (a * (q0 * q1.conj()).im - 0.5 * q0.norm_sqr())
                })
                .collect();
            Some(nonlocal_accumulate_with(grid, &f, params.rule))
        }
        None => None,
    };
    Ok((0..n)
        .map(|k| {
            let (q0, q1, q2, q3) = (q.q()[k], q.level(1)[k], q.level(2)[k], q.level(3)[k]);
            let m = q0.norm_sqr();
            let kk = kappa[k];
            let mut v = q3 * a + I * q2 + q1 * (m * (0.5 * a * kk + 2.0 * b)) - q0 * q0 * q1.conj() * (0.5 * a * kk - b)
                + I * (0.5 * kk * m) * q0;
            if let Some(br) = &bracket {
                v += I * br[k] * q0;
            }
            v
        })
        .collect())
}

/// General fourth-order reduction
/// q_t = −iaq_xxxx + iq_xx + i(b + c/2 − aκ/2)|q|²q_xx + i(c/2 − aκ/2)q²q̄_xx
///       + i(b + c/2)q̄q_x² + i(b + 3c/2 + aκ/2)q|q_x|² + (i/2)κ|q|²q
///       + i((b+c)/4)κ|q|⁴q
///       − i[∫κ_x{½|q|² + ((b+c)/4)|q|⁴ + (a/2)|q_x|² − (a/2)q_xxq̄ − (a/2)q̄_xxq}]q.
pub fn rhs_t4th(q: &ComplexJet, params: &ReducedParams, trace: Option<&CurvatureTrace>, grid: &Grid) -> Result<Vec<Complex64>> {
    q.require(4)?;
    let n = q.len();
    let (a, b, c) = (params.a, params.b, params.c);
    let (kappa, kappa_x) = resolve_kappa(params, trace, n)?;
    let bracket = match kappa_x {
        Some(kx) => {
            let f: Vec<f64> = (0..n)
                .map(|k| {
                    let (q0, q1, q2) = (q.q()[k], q.level(1)[k], q.level(2)[k]);
                    let m = q0.norm_sqr();
                    kx[k] * (0.5 * m + 0.25 * (b + c) * m * m + 0.5 * a * q1.norm_sqr() - a * (q2 * q0.conj()).re)
                })
                .collect();
            Some(nonlocal_accumulate_with(grid, &f, params.rule))
        }
        None => None,
    };
    Ok((0..n)
        .map(|k| {
            let (q0, q1, q2, q4) = (q.q()[k], q.level(1)[k], q.level(2)[k], q.level(4)[k]);
            let m = q0.norm_sqr();
            let kk = kappa[k];
            let mut v = -I * a * q4
                + I * q2
                + I * (b + 0.5 * c - 0.5 * a * kk) * m * q2
                + I * (0.5 * c - 0.5 * a * kk) * q0 * q0 * q2.conj()
                + I * (b + 0.5 * c) * q0.conj() * q1 * q1
                + I * (b + 1.5 * c + 0.5 * a * kk) * q1.norm_sqr() * q0
                + I * (0.5 * kk * m) * q0
                + I * (0.25 * (b + c) * kk * m * m) * q0;
            if let Some(br) = &bracket {
                v -= I * br[k] * q0;
            }
            v
        })
        .collect())
}

/// q_t = iq_xx + (i/2)κ|q|²q − (i/2)[∫|q|²κ_x]q.
pub fn rhs_schrodinger_reduced(
    q: &ComplexJet,
    params: &ReducedParams,
    trace: Option<&CurvatureTrace>,
    grid: &Grid,
) -> Result<Vec<Complex64>> {
    q.require(2)?;
    let n = q.len();
    let (kappa, kappa_x) = resolve_kappa(params, trace, n)?;
    let bracket = kappa_x.map(|kx| {
        let f: Vec<f64> = (0..n).map(|k| q.q()[k].norm_sqr() * kx[k]).collect();
        nonlocal_accumulate_with(grid, &f, params.rule)
    });
    Ok((0..n)
        .map(|k| {
            let q0 = q.q()[k];
            let mut v = I * q.level(2)[k] + I * (0.5 * kappa[k] * q0.norm_sqr()) * q0;
            if let Some(br) = &bracket {
                v -= I * (0.5 * br[k]) * q0;
            }
            v
        })
        .collect())
}

/// Adds the gauge term −iAq of the frame rotation at the left end.
pub fn apply_gauge(rhs: &mut [Complex64], q: &[Complex64], a: f64) {
    for (r, q) in rhs.iter_mut().zip(q) {
        *r -= I * a * q;
    }
}

/// Jet depth each kind needs.
pub fn required_depth(kind: ReducedKind) -> usize {
    match kind {
        ReducedKind::Nls | ReducedKind::SchrodingerReduced => 2,
        ReducedKind::Hirota | ReducedKind::T3rd => 3,
        ReducedKind::FourthReduced | ReducedKind::T4th => 4,
    }
}

/// Dispatches on `params.kind` with derivatives taken from `jet`.
pub fn reduced_rhs_jet(
    jet: &ComplexJet,
    params: &ReducedParams,
    trace: Option<&CurvatureTrace>,
    grid: &Grid,
) -> Result<Vec<Complex64>> {
    match params.kind {
        ReducedKind::Nls => rhs_nls(jet),
        ReducedKind::Hirota => rhs_hirota(jet, params.a),
        ReducedKind::FourthReduced => rhs_fourth_reduced(jet, params.c1, params.cb),
        ReducedKind::T3rd => rhs_t3rd(jet, params, trace, grid),
        ReducedKind::T4th => rhs_t4th(jet, params, trace, grid),
        ReducedKind::SchrodingerReduced => rhs_schrodinger_reduced(jet, params, trace, grid),
    }
}

/// Dispatches on `params.kind` with derivatives by grid differentiation of q.
pub fn reduced_rhs(q: &ComplexField, params: &ReducedParams, trace: Option<&CurvatureTrace>) -> Result<Vec<Complex64>> {
    let jet = ComplexJet::from_field(q, required_depth(params.kind))?;
    reduced_rhs_jet(&jet, params, trace, q.grid())
}
