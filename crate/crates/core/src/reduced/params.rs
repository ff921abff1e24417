use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::MapField;
use crate::grid::CumulativeRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedKind {
    Nls,
    Hirota,
    FourthReduced,
    T3rd,
    T4th,
    SchrodingerReduced,
}

impl ReducedKind {
    pub fn name(self) -> &'static str {
        match self {
            ReducedKind::Nls => "nls",
            ReducedKind::Hirota => "hirota",
            ReducedKind::FourthReduced => "fourth_reduced",
            ReducedKind::T3rd => "t3rd",
            ReducedKind::T4th => "t4th",
            ReducedKind::SchrodingerReduced => "schrodinger_reduced",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "nls" => ReducedKind::Nls,
            "hirota" => ReducedKind::Hirota,
            "fourth_reduced" => ReducedKind::FourthReduced,
            "t3rd" => ReducedKind::T3rd,
            "t4th" => ReducedKind::T4th,
            "schrodinger_reduced" => ReducedKind::SchrodingerReduced,
            _ => return None,
        })
    }
}

/// How κ(u) enters the general reductions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum KappaMode {
    Constant { value: f64 },
    /// Sampled along a geometric slice; supplied as a [`CurvatureTrace`].
    Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    pub kind: ReducedKind,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c1: f64,
    pub cb: f64,
    pub kappa: KappaMode,
    /// Include the ∫(κ)_x … brackets (field mode only).
    pub nonlocal: bool,
    /// Quadrature for the nonlocal brackets.
    pub rule: CumulativeRule,
}

impl ReducedParams {
    fn base(kind: ReducedKind) -> Self {
        Self {
            kind,
            a: 0.0,
            b: 0.0,
            c: 0.0,
            c1: 0.0,
            cb: 0.0,
            kappa: KappaMode::Constant { value: 1.0 },
            nonlocal: false,
            rule: CumulativeRule::Trapezoid,
        }
    }

    pub fn nls() -> Self {
        Self::base(ReducedKind::Nls)
    }

    pub fn hirota(a: f64) -> Self {
        Self { a, ..Self::base(ReducedKind::Hirota) }
    }

    pub fn fourth_reduced(c1: f64, cb: f64) -> Self {
        Self { c1, cb, ..Self::base(ReducedKind::FourthReduced) }
    }

    /// Constant-curvature third-order reduction.
    pub fn t3rd(a: f64, b: f64, kappa: f64) -> Self {
        Self { a, b, kappa: KappaMode::Constant { value: kappa }, ..Self::base(ReducedKind::T3rd) }
    }

    pub fn t4th(a: f64, b: f64, c: f64, kappa: f64) -> Self {
        Self { a, b, c, kappa: KappaMode::Constant { value: kappa }, ..Self::base(ReducedKind::T4th) }
    }

    pub fn schrodinger_reduced(kappa: f64) -> Self {
        Self { kappa: KappaMode::Constant { value: kappa }, ..Self::base(ReducedKind::SchrodingerReduced) }
    }

    /// Switches to a sampled κ field with the nonlocal brackets on.
    pub fn with_field(mut self, rule: CumulativeRule) -> Self {
        self.kappa = KappaMode::Field;
        self.nonlocal = true;
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if [self.a, self.b, self.c, self.c1, self.cb].iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("reduced coefficients must be finite".into()));
        }
        if let KappaMode::Constant { value } = self.kappa {
            if !value.is_finite() {
                return Err(Error::Config("constant curvature must be finite".into()));
            }
            if self.nonlocal {
                return Err(Error::Config(
                    "nonlocal terms require a sampled curvature field (they vanish for constant κ)".into(),
                ));
            }
        }
        Ok(())
    }

    /// Linear principal part as (order, coefficient) pairs.
    pub fn stiffness_terms(&self) -> Vec<(u32, f64)> {
        match self.kind {
            ReducedKind::Nls | ReducedKind::SchrodingerReduced => vec![(2, 1.0)],
            ReducedKind::Hirota | ReducedKind::T3rd => vec![(2, 1.0), (3, self.a)],
            ReducedKind::FourthReduced => vec![(2, 1.0), (4, self.c1)],
            ReducedKind::T4th => vec![(2, 1.0), (4, self.a)],
        }
    }
}

/// κ(u(x)) and its x-derivative along a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTrace {
    pub kappa: Vec<f64>,
    pub kappa_x: Vec<f64>,
}

impl CurvatureTrace {
    pub fn constant(n: usize, value: f64) -> Self {
        Self { kappa: vec![value; n], kappa_x: vec![0.0; n] }
    }

    /// Samples the target curvature along `u`; κ_x by grid differentiation.
    pub fn along(u: &MapField) -> Result<Self> {
        let kappa = u.curvature_field()?;
        let kappa_x = if u.surface().is_sphere() {
            vec![0.0; kappa.len()]
        } else {
            u.grid().derivative(&kappa, 1)?
        };
        Ok(Self { kappa, kappa_x })
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }
}
