use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// u_t = J_u ∇_x u_x.
    SchrodingerMap,
    /// u_t = a∇_x²u_x + J_u∇_x u_x + b g(u_x,u_x) u_x.
    ThirdOrder,
    /// u_t = −aJ_u∇_x³u_x + {1 + b g(u_x,u_x)} J_u∇_x u_x + c g(∇_x u_x, u_x) J_u u_x.
    FourthOrder,
    /// X_t = X_x×X_xx + a[X_xxx + (3/2)|X_xx|² X_x].
    FilamentThird,
    /// X_t = X_x×X_xx − C1 X_x×X_xxxx + C1 X_xx×X_xxx + (Cb − 2C1)|X_xx|² X_x×X_xx.
    FilamentFourth,
}

impl FlowKind {
    pub fn name(self) -> &'static str {
        match self {
            FlowKind::SchrodingerMap => "schrodinger_map",
            FlowKind::ThirdOrder => "third_order",
            FlowKind::FourthOrder => "fourth_order",
            FlowKind::FilamentThird => "filament_third",
            FlowKind::FilamentFourth => "filament_fourth",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "schrodinger_map" => FlowKind::SchrodingerMap,
            "third_order" => FlowKind::ThirdOrder,
            "fourth_order" => FlowKind::FourthOrder,
            "filament_third" => FlowKind::FilamentThird,
            "filament_fourth" => FlowKind::FilamentFourth,
            _ => return None,
        })
    }

    pub fn is_filament(self) -> bool {
        matches!(self, FlowKind::FilamentThird | FlowKind::FilamentFourth)
    }
}

/// Flow coefficients. `c1`/`cb` are the filament constants and are only
/// meaningful for the filament kinds (and as provenance after
/// [`coefficient_map_f`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub kind: FlowKind,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c1: f64,
    pub cb: f64,
}

impl FlowParams {
    pub fn schrodinger_map() -> Self {
        Self { kind: FlowKind::SchrodingerMap, a: 0.0, b: 0.0, c: 0.0, c1: 0.0, cb: 0.0 }
    }

    pub fn third_order(a: f64, b: f64) -> Self {
        Self { kind: FlowKind::ThirdOrder, a, b, c: 0.0, c1: 0.0, cb: 0.0 }
    }

    pub fn fourth_order(a: f64, b: f64, c: f64) -> Self {
        Self { kind: FlowKind::FourthOrder, a, b, c, c1: 0.0, cb: 0.0 }
    }

    pub fn filament_third(a: f64) -> Self {
        Self { kind: FlowKind::FilamentThird, a, b: 0.0, c: 0.0, c1: 0.0, cb: 0.0 }
    }

    pub fn filament_fourth(c1: f64, cb: f64) -> Self {
        Self { kind: FlowKind::FilamentFourth, a: 0.0, b: 0.0, c: 0.0, c1, cb }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a, self.b, self.c, self.c1, self.cb];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("flow coefficients must be finite".into()));
        }
        if self.kind == FlowKind::SchrodingerMap && (self.a != 0.0 || self.b != 0.0) {
            return Err(Error::Config(format!(
                "schrodinger_map requires a = b = 0 (got a = {}, b = {})",
                self.a, self.b
            )));
        }
        Ok(())
    }

    /// Highest spatial derivative order of the flow (2, 3 or 4).
    pub fn spatial_order(&self) -> u32 {
        match self.kind {
            FlowKind::SchrodingerMap => 2,
            FlowKind::ThirdOrder | FlowKind::FilamentThird if self.a == 0.0 => 2,
            FlowKind::ThirdOrder | FlowKind::FilamentThird => 3,
            FlowKind::FourthOrder if self.a == 0.0 => 2,
            FlowKind::FilamentFourth if self.c1 == 0.0 => 2,
            FlowKind::FourthOrder | FlowKind::FilamentFourth => 4,
        }
    }

    /// Linear principal part as (derivative order, coefficient) pairs, used by
    /// the stability bound.
    pub fn stiffness_terms(&self) -> Vec<(u32, f64)> {
        match self.kind {
            FlowKind::SchrodingerMap => vec![(2, 1.0)],
            FlowKind::ThirdOrder | FlowKind::FilamentThird => vec![(2, 1.0), (3, self.a)],
            FlowKind::FourthOrder => vec![(2, 1.0), (4, self.a)],
            FlowKind::FilamentFourth => vec![(2, 1.0), (4, self.c1)],
        }
    }

    /// The map flow satisfied by u = X_x for filament kinds; identity otherwise.
    pub fn as_map_flow(&self) -> Self {
        match self.kind {
            FlowKind::FilamentThird => coefficient_map_fm(self.a),
            FlowKind::FilamentFourth => coefficient_map_f(self.c1, self.cb),
            _ => *self,
        }
    }
}

/// Third-order filament constant a ↦ (a, b = a/2).
pub fn coefficient_map_fm(a: f64) -> FlowParams {
    FlowParams::third_order(a, a / 2.0)
}

/// Fourth-order filament constants (C1, Cb) ↦ (a, b, c) = (C1, Cb − C1, 2Cb + C1).
pub fn coefficient_map_f(c1: f64, cb: f64) -> FlowParams {
    FlowParams { kind: FlowKind::FourthOrder, a: c1, b: cb - c1, c: 2.0 * cb + c1, c1, cb }
}
