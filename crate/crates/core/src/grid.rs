//! Uniform one-dimensional grids, spatial differentiation and quadrature.
//!
//! Periodic grids differentiate spectrally (FFT); truncated lines use
//! fourth-order finite differences with one-sided stencils near the ends.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest derivative order supported by [`Grid::derivative`].
pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// Formal accuracy of the finite-difference stencils.
pub const FD_ACCURACY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    LineTruncated,
}

/// Plain description of a grid; [`Grid`] adds the differentiation machinery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub boundary: Boundary,
}

impl GridSpec {
    pub fn periodic(n_points: usize, x_min: f64, x_max: f64) -> Self {
        Self { n_points, x_min, x_max, boundary: Boundary::Periodic }
    }

    pub fn line(n_points: usize, x_min: f64, x_max: f64) -> Self {
        Self { n_points, x_min, x_max, boundary: Boundary::LineTruncated }
    }

    pub fn dx(&self) -> f64 {
        let len = self.x_max - self.x_min;
        match self.boundary {
            Boundary::Periodic => len / self.n_points as f64,
            Boundary::LineTruncated => len / (self.n_points as f64 - 1.0),
        }
    }
}

/// Cumulative quadrature rules used for running integrals from the left end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulativeRule {
    /// Second order; first entry is exactly zero and constants integrate exactly.
    #[default]
    Trapezoid,
    /// Fourth order: each cell integrates the local cubic interpolant.
    Cubic,
}

#[derive(Clone)]
pub struct Grid {
    spec: GridSpec,
    ops: Arc<Ops>,
}

enum Ops {
    Spectral(SpectralOps),
    FiniteDifference(FdOps),
}

struct SpectralOps {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    nyquist: Option<usize>,
}

struct Stencil {
    start: usize,
    weights: Vec<f64>,
}

struct FdOps {
    // stencils[order - 1][i]
    stencils: Vec<Vec<Stencil>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        if !(spec.x_min.is_finite() && spec.x_max.is_finite()) || spec.x_max <= spec.x_min {
            return Err(Error::Config(format!(
                "grid domain [{}, {}] must be a finite interval with x_max > x_min",
                spec.x_min, spec.x_max
            )));
        }
        let ops = match spec.boundary {
            Boundary::Periodic => {
                if spec.n_points < 16 {
                    return Err(Error::Config(format!(
                        "spectral grids need n_points >= 16, got {}",
                        spec.n_points
                    )));
                }
                Ops::Spectral(SpectralOps::new(&spec))
            }
            Boundary::LineTruncated => {
                // widest one-sided stencil is order + accuracy = 8 points
                if spec.n_points < MAX_DERIVATIVE_ORDER + FD_ACCURACY + 1 {
                    return Err(Error::Config(format!(
                        "finite-difference grids need n_points >= {}, got {}",
                        MAX_DERIVATIVE_ORDER + FD_ACCURACY + 1,
                        spec.n_points
                    )));
                }
                Ops::FiniteDifference(FdOps::new(spec.n_points))
            }
        };
        Ok(Self { spec, ops: Arc::new(ops) })
    }

    pub fn periodic(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        Self::new(GridSpec::periodic(n_points, x_min, x_max))
    }

    pub fn line(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        Self::new(GridSpec::line(n_points, x_min, x_max))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.spec.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.spec.n_points == 0
    }

    pub fn boundary(&self) -> Boundary {
        self.spec.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.spec.boundary == Boundary::Periodic
    }

    pub fn dx(&self) -> f64 {
        self.spec.dx()
    }

    pub fn length(&self) -> f64 {
        self.spec.x_max - self.spec.x_min
    }

    pub fn x(&self, i: usize) -> f64 {
        self.spec.x_min + i as f64 * self.dx()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Largest resolved wavenumber, π/dx.
    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    /// A copy of this grid with the point count multiplied by `factor` (dx divided by it).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.n_points = match spec.boundary {
            Boundary::Periodic => spec.n_points * factor,
            Boundary::LineTruncated => (spec.n_points - 1) * factor + 1,
        };
        Self::new(spec)
    }

    fn check_order(order: usize) -> Result<()> {
        if order == 0 || order > MAX_DERIVATIVE_ORDER {
            return Err(Error::Unsupported(format!(
                "derivative order {order} (supported: 1..={MAX_DERIVATIVE_ORDER})"
            )));
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::Domain(format!(
                "field has {len} samples but the grid has {}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Derivatives of orders `1..=max_order` of a complex field.
    pub fn derivatives_complex(&self, f: &[Complex64], max_order: usize) -> Result<Vec<Vec<Complex64>>> {
        Self::check_order(max_order)?;
        self.check_len(f.len())?;
        Ok(match self.ops.as_ref() {
            Ops::Spectral(s) => s.derivatives(f, max_order),
            Ops::FiniteDifference(fd) => (1..=max_order)
                .map(|m| fd.apply(m, f, self.dx()))
                .collect(),
        })
    }

    pub fn derivative_complex(&self, f: &[Complex64], order: usize) -> Result<Vec<Complex64>> {
        Self::check_order(order)?;
        self.check_len(f.len())?;
        Ok(match self.ops.as_ref() {
            Ops::Spectral(s) => s.derivative(f, order),
            Ops::FiniteDifference(fd) => fd.apply(order, f, self.dx()),
        })
    }

    pub fn derivative(&self, f: &[f64], order: usize) -> Result<Vec<f64>> {
        Self::check_order(order)?;
        self.check_len(f.len())?;
        Ok(match self.ops.as_ref() {
            Ops::Spectral(s) => {
                let packed: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                s.derivative(&packed, order).into_iter().map(|c| c.re).collect()
            }
            Ops::FiniteDifference(fd) => fd.apply(order, f, self.dx()),
        })
    }

    /// Derivatives of orders `1..=max_order` of a vector field, component-wise.
    pub fn derivatives_vec3(&self, f: &[Vector3<f64>], max_order: usize) -> Result<Vec<Vec<Vector3<f64>>>> {
        Self::check_order(max_order)?;
        self.check_len(f.len())?;
        match self.ops.as_ref() {
            Ops::Spectral(s) => {
                // The spectral operator maps real fields to real fields, so two
                // components share one complex transform.
                let xy: Vec<Complex64> = f.iter().map(|v| Complex64::new(v.x, v.y)).collect();
                let zz: Vec<Complex64> = f.iter().map(|v| Complex64::new(v.z, 0.0)).collect();
                let dxy = s.derivatives(&xy, max_order);
                let dz = s.derivatives(&zz, max_order);
                Ok(dxy
                    .into_iter()
                    .zip(dz)
                    .map(|(a, b)| {
                        a.iter()
                            .zip(&b)
                            .map(|(p, q)| Vector3::new(p.re, p.im, q.re))
                            .collect()
                    })
                    .collect())
            }
            Ops::FiniteDifference(fd) => Ok((1..=max_order)
                .map(|m| fd.apply(m, f, self.dx()))
                .collect()),
        }
    }

    pub fn derivative_vec3(&self, f: &[Vector3<f64>], order: usize) -> Result<Vec<Vector3<f64>>> {
        Self::check_order(order)?;
        let mut all = self.derivatives_vec3(f, order)?;
        Ok(all.pop().expect("at least one order"))
    }

    /// ∫ f dx over the grid: rectangle rule on periodic grids (spectrally accurate), trapezoid on lines.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let dx = self.dx();
        match self.boundary() {
            Boundary::Periodic => f.iter().sum::<f64>() * dx,
            Boundary::LineTruncated => {
                let n = f.len();
                if n < 2 {
                    return 0.0;
                }
                dx * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1]))
            }
        }
    }

    /// Running integral from the left end; the first entry is zero. The
    /// integrand is not assumed periodic even on periodic grids.
    pub fn cumulative<T>(&self, f: &[T], rule: CumulativeRule) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        cumulative_uniform(f, self.dx(), rule)
    }

    /// Values halfway between consecutive grid points, `f(x_i + dx/2)` for
    /// `i in 0..n-1`, by local cubic interpolation.
    pub fn midpoints<T>(&self, f: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = f.len();
        let mut out = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n.saturating_sub(1) {
            let (start, w): (usize, [f64; 4]) = if i == 0 {
                (0, [5.0, 15.0, -5.0, 1.0])
            } else if i + 2 >= n {
                (n - 4, [1.0, -5.0, 15.0, 5.0])
            } else {
                (i - 1, [-1.0, 9.0, 9.0, -1.0])
            };
            let mut acc = T::default();
            for (k, wk) in w.iter().enumerate() {
                acc = acc + f[start + k] * (wk / 16.0);
            }
            out.push(acc);
        }
        out
    }

    /// Antiderivative F with F[0] = 0 and F_x = f − mean(f) on periodic grids
    /// (spectral), F_x = f on lines (fourth-order cumulative rule). Returns F
    /// and the subtracted mean (zero on lines).
    pub fn antiderivative(&self, f: &[Complex64]) -> Result<(Vec<Complex64>, Complex64)> {
        self.check_len(f.len())?;
        Ok(match self.ops.as_ref() {
            Ops::Spectral(s) => s.antiderivative(f),
            Ops::FiniteDifference(_) => (self.cumulative(f, CumulativeRule::Cubic), Complex64::new(0.0, 0.0)),
        })
    }

    /// Fraction of spectral energy in the top quarter of resolved wavenumbers.
    /// Only meaningful on periodic grids; returns `None` on lines.
    pub fn tail_energy_fraction(&self, f: &[Complex64]) -> Option<f64> {
        match self.ops.as_ref() {
            Ops::Spectral(s) => Some(s.tail_fraction(f)),
            Ops::FiniteDifference(_) => None,
        }
    }
}

pub(crate) fn cumulative_uniform<T>(f: &[T], dx: f64, rule: CumulativeRule) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = f.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(T::default());
    let mut acc = T::default();
    for i in 0..n - 1 {
        let cell = match rule {
            CumulativeRule::Trapezoid => (f[i] + f[i + 1]) * (0.5 * dx),
            CumulativeRule::Cubic if n < 4 => (f[i] + f[i + 1]) * (0.5 * dx),
            CumulativeRule::Cubic => {
                let (start, w): (usize, [f64; 4]) = if i == 0 {
                    (0, [9.0, 19.0, -5.0, 1.0])
                } else if i + 2 >= n {
                    (n - 4, [1.0, -5.0, 19.0, 9.0])
                } else {
                    (i - 1, [-1.0, 13.0, 13.0, -1.0])
                };
                let mut c = T::default();
                for (k, wk) in w.iter().enumerate() {
                    c = c + f[start + k] * (wk * dx / 24.0);
                }
                c
            }
        };
        acc = acc + cell;
        out.push(acc);
    }
    out
}

impl SpectralOps {
    fn new(spec: &GridSpec) -> Self {
        let n = spec.n_points;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scale = 2.0 * PI / (spec.x_max - spec.x_min);
        let wavenumbers = (0..n)
            .map(|j| {
                let signed = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                signed * scale
            })
            .collect();
        let nyquist = n.is_multiple_of(2).then_some(n / 2);
        Self { forward, inverse, wavenumbers, nyquist }
    }

    fn spectrum(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    fn apply_symbol(&self, spectrum: &[Complex64], order: usize) -> Vec<Complex64> {
        let n = spectrum.len();
        let norm = 1.0 / n as f64;
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .zip(&self.wavenumbers)
            .map(|(c, &k)| {
                let ik = Complex64::new(0.0, k);
                c * ik.powu(order as u32) * norm
            })
            .collect();
        if let Some(ny) = self.nyquist {
            if order % 2 == 1 {
                buf[ny] = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse.process(&mut buf);
        buf
    }

    fn derivative(&self, f: &[Complex64], order: usize) -> Vec<Complex64> {
        let s = self.spectrum(f);
        self.apply_symbol(&s, order)
    }

    fn derivatives(&self, f: &[Complex64], max_order: usize) -> Vec<Vec<Complex64>> {
        let s = self.spectrum(f);
        (1..=max_order).map(|m| self.apply_symbol(&s, m)).collect()
    }

    fn antiderivative(&self, f: &[Complex64]) -> (Vec<Complex64>, Complex64) {
        let n = f.len();
        let s = self.spectrum(f);
        let mean = s[0] / n as f64;
        let mut buf: Vec<Complex64> = s
            .iter()
            .zip(&self.wavenumbers)
            .enumerate()
            .map(|(j, (c, &k))| {
                if j == 0 || Some(j) == self.nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    c / Complex64::new(0.0, k) / n as f64
                }
            })
            .collect();
        self.inverse.process(&mut buf);
        let offset = buf[0];
        (buf.into_iter().map(|v| v - offset).collect(), mean)
    }

    fn tail_fraction(&self, f: &[Complex64]) -> f64 {
        let s = self.spectrum(f);
        let kmax = self.wavenumbers.iter().fold(0.0f64, |a, k| a.max(k.abs()));
        let (mut total, mut tail) = (0.0, 0.0);
        for (c, k) in s.iter().zip(&self.wavenumbers) {
            let e = c.norm_sqr();
            total += e;
            if k.abs() > 0.75 * kmax {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

impl FdOps {
    fn new(n: usize) -> Self {
        let stencils = (1..=MAX_DERIVATIVE_ORDER)
            .map(|order| {
                let half = order.div_ceil(2) + FD_ACCURACY / 2 - 1;
                let one_sided = order + FD_ACCURACY;
                (0..n)
                    .map(|i| {
                        let start = if i >= half && i + half < n {
                            i - half
                        } else if i < half {
                            0
                        } else {
                            n - one_sided
                        };
                        let width = if i >= half && i + half < n { 2 * half + 1 } else { one_sided };
                        let nodes: Vec<f64> =
                            (start..start + width).map(|j| j as f64 - i as f64).collect();
                        let weights = fornberg_weights(0.0, &nodes, order)
                            .pop()
                            .expect("weights for requested order");
                        Stencil { start, weights }
                    })
                    .collect()
            })
            .collect();
        Self { stencils }
    }

    fn apply<T>(&self, order: usize, f: &[T], dx: f64) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let scale = dx.powi(-(order as i32));
        self.stencils[order - 1]
            .iter()
            .map(|st| {
                let mut acc = T::default();
                for (k, w) in st.weights.iter().enumerate() {
                    acc = acc + f[st.start + k] * (w * scale);
                }
                acc
            })
            .collect()
    }
}

/// Finite-difference weights for derivatives `0..=max_order` at `z` on
/// arbitrary `nodes` (Fornberg's recursion). `result[m][j]` is the weight of
/// node `j` in the `m`-th derivative.
pub fn fornberg_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antiderivative_inverts_differentiation() {
        let g = Grid::periodic(32, 0.0, 2.0 * PI).unwrap();
        let f: Vec<Complex64> = g.coordinates().iter().map(|x| Complex64::new(1.5 + x.cos(), (2.0 * x).sin())).collect();
        let (big_f, mean) = g.antiderivative(&f).unwrap();
        assert!((mean - Complex64::new(1.5, 0.0)).norm() < 1e-14);
        for (i, x) in g.coordinates().iter().enumerate() {
            let exact = Complex64::new(x.sin(), 0.5 - 0.5 * (2.0 * x).cos());
            assert!((big_f[i] - exact).norm() < 1e-13);
        }
        let l = Grid::line(201, 0.0, 1.0).unwrap();
        let f: Vec<Complex64> = l.coordinates().iter().map(|x| Complex64::new(x.exp(), 0.0)).collect();
        let (big_f, _) = l.antiderivative(&f).unwrap();
        assert!((big_f[200].re - (1f64.exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn dx_conventions() {
        let p = GridSpec::periodic(64, 0.0, 2.0 * PI);
        assert!((p.dx() - 2.0 * PI / 64.0).abs() < 1e-15);
        let l = GridSpec::line(65, -1.0, 1.0);
        assert!((l.dx() - 2.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_second_derivative_of_sine() {
        let g = Grid::periodic(64, 0.0, 2.0 * PI).unwrap();
        let k = 3.0;
        let f: Vec<f64> = g.coordinates().iter().map(|x| (k * x).sin()).collect();
        let d2 = g.derivative(&f, 2).unwrap();
        for (x, d) in g.coordinates().iter().zip(&d2) {
            assert!((d + k * k * (k * x).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_has_zero_derivatives() {
        for g in [Grid::periodic(32, 0.0, 1.0).unwrap(), Grid::line(40, 0.0, 1.0).unwrap()] {
            let f = vec![2.5; g.len()];
            for m in 1..=4 {
                let d = g.derivative(&f, m).unwrap();
                assert!(d.iter().all(|v| v.abs() < 1e-6));
            }
        }
    }

    #[test]
    fn order_five_is_unsupported() {
        let g = Grid::periodic(32, 0.0, 1.0).unwrap();
        let f = vec![0.0; 32];
        assert!(matches!(g.derivative(&f, 5), Err(Error::Unsupported(_))));
        assert!(matches!(g.derivative(&f, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn too_small_spectral_grid_rejected() {
        assert!(Grid::periodic(8, 0.0, 1.0).is_err());
        assert!(Grid::line(8, 0.0, 1.0).is_err());
        assert!(Grid::periodic(16, 1.0, 1.0).is_err());
    }

    #[test]
    fn fornberg_reproduces_textbook_stencils() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn fd_gaussian_derivative_is_fourth_order() {
        let err = |n: usize| {
            let g = Grid::line(n, -6.0, 6.0).unwrap();
            let xs = g.coordinates();
            let f: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
            let d = g.derivative(&f, 1).unwrap();
            xs.iter()
                .zip(&d)
                .map(|(x, v)| (v + 2.0 * x * (-x * x).exp()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(121), err(241));
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.5, "observed order {order}");
    }

    #[test]
    fn cumulative_rules() {
        let g = Grid::line(41, 0.0, 2.0).unwrap();
        let c = vec![3.0; 41];
        for rule in [CumulativeRule::Trapezoid, CumulativeRule::Cubic] {
            let s = g.cumulative(&c, rule);
            assert_eq!(s[0], 0.0);
            for (i, v) in s.iter().enumerate() {
                assert!((v - 3.0 * g.x(i)).abs() < 1e-13);
            }
        }
        // cubic rule integrates cubics exactly
        let f: Vec<f64> = g.coordinates().iter().map(|x| x * x * x - x).collect();
        let s = g.cumulative(&f, CumulativeRule::Cubic);
        for (i, v) in s.iter().enumerate() {
            let x = g.x(i);
            assert!((v - (x.powi(4) / 4.0 - x * x / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_interpolation_is_exact_on_cubics() {
        let g = Grid::line(20, 0.0, 1.0).unwrap();
        let f: Vec<f64> = g.coordinates().iter().map(|x| 2.0 * x * x * x - x + 1.0).collect();
        let m = g.midpoints(&f);
        for (i, v) in m.iter().enumerate() {
            let x = g.x(i) + 0.5 * g.dx();
            assert!((v - (2.0 * x * x * x - x + 1.0)).abs() < 1e-13);
        }
    }
}
