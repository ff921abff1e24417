//! Complex scalar fields on a grid (q, p, ψ) and their x-jets.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!("{} values for a grid of {}", values.len(), grid.len())));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain("non-finite complex field".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ∫ |f|² dx.
    pub fn mass(&self) -> f64 {
        let d: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        self.grid.integrate(&d)
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The field multiplied pointwise by a constant.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|z| z * factor).collect() }
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        if other.len() != self.len() {
            return Err(Error::Domain("fields live on different grids".into()));
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn modulus(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

/// A complex field with its first x-derivatives: `level(k)` is ∂_x^k q.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexJet {
    levels: Vec<Vec<Complex64>>,
}

impl ComplexJet {
    /// Derivatives by grid differentiation of the samples.
    pub fn from_field(q: &ComplexField, depth: usize) -> Result<Self> {
        let mut levels = vec![q.values().to_vec()];
        if depth > 0 {
            levels.extend(q.grid().derivatives_complex(q.values(), depth)?);
        }
        Ok(Self { levels })
    }

    /// Derivatives supplied by the caller (for example frame components of
    /// covariant derivatives).
    pub fn from_levels(levels: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = levels.first().map(Vec::len).unwrap_or(0);
        if n == 0 || levels.iter().any(|l| l.len() != n) {
            return Err(Error::Domain("jet levels must be non-empty and of equal length".into()));
        }
        Ok(Self { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels[0].is_empty()
    }

    pub fn q(&self) -> &[Complex64] {
        &self.levels[0]
    }

    /// ∂_x^k q; panics if `k` exceeds the depth.
    pub fn level(&self, k: usize) -> &[Complex64] {
        &self.levels[k]
    }

    pub(crate) fn require(&self, depth: usize) -> Result<()> {
        if self.depth() < depth {
            return Err(Error::Domain(format!("jet of depth {} where {depth} is needed", self.depth())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn plane_wave_jet_and_norms() {
        let g = Grid::periodic(32, 0.0, 2.0 * PI).unwrap();
        let q = ComplexField::new(g.clone(), g.coordinates().iter().map(|x| Complex64::from_polar(2.0, 3.0 * x)).collect())
            .unwrap();
        assert!((q.mass() - 8.0 * PI).abs() < 1e-12);
        assert!((q.linf_norm() - 2.0).abs() < 1e-14);
        let jet = ComplexJet::from_field(&q, 4).unwrap();
        for k in 0..=4 {
            let factor = Complex64::new(0.0, 3.0).powu(k as u32);
            for (a, b) in jet.level(k).iter().zip(q.values()) {
                assert!((a - b * factor).norm() < 1e-10);
            }
        }
        assert!(jet.require(5).is_err());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let g = Grid::periodic(16, 0.0, 1.0).unwrap();
        let v = vec![Complex64::new(f64::NAN, 0.0); 16];
        assert!(ComplexField::new(g, v).is_err());
    }
}
