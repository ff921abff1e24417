use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-time L² and L∞ norms of a residual or mismatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
}

impl NormSeries {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), times: Vec::new(), l2: Vec::new(), linf: Vec::new() }
    }

    pub fn push(&mut self, t: f64, l2: f64, linf: f64) {
        self.times.push(t);
        self.l2.push(l2);
        self.linf.push(linf);
    }

    pub fn max_l2(&self) -> f64 {
        self.l2.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_linf(&self) -> f64 {
        self.linf.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the sample at time `t` (relative tolerance 1e−9).
    pub fn index_at(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * t.abs().max(1e-12);
        self.times.iter().position(|s| (s - t).abs() <= tol)
    }
}

/// A named scalar sampled over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStatus {
    /// Errors decrease monotonically above the round-off floor.
    Consistent,
    /// Errors do not decrease monotonically.
    Inconclusive,
    /// Errors sit at the round-off floor; the order is reported as infinite.
    RoundOffFloor,
}

/// Observed convergence of one norm across refinement levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedOrders {
    pub norm: String,
    pub errors: Vec<f64>,
    /// e_i / e_{i+1}; `None` when e_{i+1} = 0.
    pub ratios: Vec<Option<f64>>,
    /// log₂ of the ratios; `None` when infinite.
    pub orders: Vec<Option<f64>>,
    pub status: OrderStatus,
}

/// A pass/fail comparison of a recorded number against bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    /// Every snapshot stays within the tolerance of its left-end value on the margins.
    pub decay_margin_satisfied: bool,
    /// The gauge constant cannot be assumed zero.
    pub gauge_uncertain: bool,
    pub margin_deviation: f64,
    /// Largest |A| over the evaluated times.
    pub gauge_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub series: Vec<NormSeries>,
    pub scalars: Vec<ScalarSeries>,
    pub orders: Vec<ObservedOrders>,
    pub drifts: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub flags: Option<HypothesisFlags>,
    /// Per-level reports of a refinement study.
    pub details: Vec<VerificationReport>,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            series: Vec::new(),
            scalars: Vec::new(),
            orders: Vec::new(),
            drifts: BTreeMap::new(),
            checks: Vec::new(),
            flags: None,
            details: Vec::new(),
        }
    }

    pub fn series(&self, name: &str) -> Option<&NormSeries> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn scalar(&self, name: &str) -> Option<&ScalarSeries> {
        self.scalars.iter().find(|s| s.name == name)
    }

    pub fn order(&self, norm: &str) -> Option<&ObservedOrders> {
        self.orders.iter().find(|o| o.norm == norm)
    }

    pub fn drift(&self, name: &str) -> Option<f64> {
        self.drifts.get(name).copied()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Records value ≤ upper.
    pub fn check_at_most(&mut self, name: impl Into<String>, value: f64, upper: f64) -> bool {
        self.check_within(name, value, None, Some(upper))
    }

    /// Records lower ≤ value ≤ upper for the bounds present.
    pub fn check_within(&mut self, name: impl Into<String>, value: f64, lower: Option<f64>, upper: Option<f64>) -> bool {
        let passed = value.is_finite() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        self.checks.push(Check { name: name.into(), value, lower, upper, passed });
        passed
    }

    /// Records one band check per successive error ratio of `norm`. A ratio
    /// that is infinite fails the band.
    pub fn check_refinement(&mut self, norm: &str, lower: f64, upper: f64) -> Result<bool> {
        let ratios = self
            .order(norm)
            .ok_or_else(|| Error::Config(format!("no convergence data for {norm}")))?
            .ratios
            .clone();
        let mut all = true;
        for (i, r) in ratios.iter().enumerate() {
            all &= self.check_within(format!("{norm} ratio {}", i + 1), r.unwrap_or(f64::INFINITY), Some(lower), Some(upper));
        }
        Ok(all)
    }

    /// True iff every recorded check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Fails if any recorded norm, drift or error is not finite.
    pub fn validate(&self) -> Result<()> {
        let finite = self.series.iter().all(|s| s.l2.iter().chain(&s.linf).chain(&s.times).all(|v| v.is_finite()))
            && self.scalars.iter().all(|s| s.values.iter().all(|v| v.is_finite()))
            && self.orders.iter().all(|o| o.errors.iter().all(|v| v.is_finite()))
            && self.drifts.values().all(|v| v.is_finite());
        if finite {
            Ok(())
        } else {
            Err(Error::Range(format!("report {} holds non-finite norms", self.scenario)))
        }
    }

    /// Human-readable summary, one line per item.
    pub fn summary(&self) -> String {
        let mut s = format!("scenario {}: {}\n", self.scenario, if self.passed() { "PASS" } else { "FAIL" });
        for n in &self.series {
            let _ = writeln!(s, "  {}: max L2 {:.3e}, max Linf {:.3e} over {} times", n.name, n.max_l2(), n.max_linf(), n.times.len());
        }
        for o in &self.orders {
            let orders: Vec<String> =
                o.orders.iter().map(|v| v.map_or_else(|| "inf".to_string(), |v| format!("{v:.2}"))).collect();
            let status = match o.status {
                OrderStatus::Consistent => "consistent",
                OrderStatus::Inconclusive => "inconclusive",
                OrderStatus::RoundOffFloor => "round-off floor",
            };
            let _ = writeln!(s, "  {} orders [{}] ({status})", o.norm, orders.join(", "));
        }
        for (k, v) in &self.drifts {
            let _ = writeln!(s, "  {k}: {v:.3e}");
        }
        if let Some(f) = &self.flags {
            let _ = writeln!(
                s,
                "  margin deviation {:.3e} ({}), gauge constant {:.3e}{}",
                f.margin_deviation,
                if f.decay_margin_satisfied { "decay margin satisfied" } else { "decay margin violated" },
                f.gauge_constant,
                if f.gauge_uncertain { ", gauge-uncertain" } else { "" }
            );
        }
        for c in &self.checks {
            let bounds = match (c.lower, c.upper) {
                (Some(l), Some(u)) => format!("in [{l}, {u}]"),
                (None, Some(u)) => format!("<= {u:e}"),
                (Some(l), None) => format!(">= {l:e}"),
                (None, None) => String::new(),
            };
            let _ = writeln!(s, "  [{}] {} = {:.6e} {bounds}", if c.passed { "pass" } else { "FAIL" }, c.name, c.value);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_drive_pass_state() {
        let mut r = VerificationReport::new("x");
        assert!(r.passed());
        assert!(r.check_at_most("a", 1e-12, 1e-10));
        assert!(r.passed());
        assert!(!r.check_within("b", 40.0, Some(8.0), Some(32.0)));
        assert!(!r.passed());
        assert!(!r.check_at_most("c", f64::NAN, 1.0));
        assert!(r.summary().contains("FAIL"));
    }

    #[test]
    fn non_finite_norms_are_rejected() {
        let mut r = VerificationReport::new("x");
        let mut s = NormSeries::new("res");
        s.push(0.0, 1.0, f64::INFINITY);
        r.series.push(s);
        assert!(r.validate().is_err());
    }
}
