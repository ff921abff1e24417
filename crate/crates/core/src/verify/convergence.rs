use super::report::{ObservedOrders, OrderStatus, VerificationReport};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Errors at or below this absolute level count as round-off.
pub const ROUND_OFF_FLOOR: f64 = 1e-13;

/// One (grid, dt) pair of a refinement sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementLevel {
    pub grid: Grid,
    pub dt: f64,
}

/// (N, dt), (2N, dt/2), (4N, dt/4), … with `count` levels.
pub fn refinement_levels(grid: &Grid, dt: f64, count: usize) -> Result<Vec<RefinementLevel>> {
    (0..count)
        .map(|l| {
            let f = 1usize << l;
            Ok(RefinementLevel { grid: grid.refined(f)?, dt: dt / f as f64 })
        })
        .collect()
}

/// Observed orders log₂(e_i/e_{i+1}) for errors on successively halved
/// resolutions. Needs at least three levels.
pub fn observed_orders(norm: &str, errors: &[f64], floor: f64) -> Result<ObservedOrders> {
    if errors.len() < 3 {
        return Err(Error::Config(format!("a convergence study needs at least 3 levels, got {}", errors.len())));
    }
    if errors.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::Range(format!("non-finite or negative error in {norm}")));
    }
    let ratios: Vec<Option<f64>> = errors.windows(2).map(|w| (w[1] > 0.0).then(|| w[0] / w[1])).collect();
    let orders = ratios.iter().map(|r| r.map(f64::log2)).collect();
    let status = if errors[1..].iter().all(|e| *e <= floor) {
        OrderStatus::RoundOffFloor
    } else if errors.windows(2).all(|w| w[1] < w[0]) {
        OrderStatus::Consistent
    } else {
        OrderStatus::Inconclusive
    };
    Ok(ObservedOrders { norm: norm.to_string(), errors: errors.to_vec(), ratios, orders, status })
}

/// Runs `run` on every level; each call returns named error norms, and the
/// observed orders of each name are recorded in the report.
pub fn convergence_study<F>(scenario: &str, levels: &[RefinementLevel], mut run: F) -> Result<VerificationReport>
where
    F: FnMut(&RefinementLevel) -> Result<Vec<(String, f64)>>,
{
    if levels.len() < 3 {
        return Err(Error::Config(format!("a convergence study needs at least 3 levels, got {}", levels.len())));
    }
    let mut names: Vec<String> = Vec::new();
    let mut table: Vec<Vec<f64>> = Vec::new();
    for (i, level) in levels.iter().enumerate() {
        for (name, value) in run(level)? {
            let slot = match names.iter().position(|n| *n == name) {
                Some(k) => k,
                None => {
                    if i > 0 {
                        return Err(Error::Config(format!("norm {name} missing on the coarsest level")));
                    }
                    names.push(name);
                    table.push(Vec::new());
                    names.len() - 1
                }
            };
            table[slot].push(value);
        }
    }
    let mut report = VerificationReport::new(scenario);
    for (name, errors) in names.iter().zip(&table) {
        if errors.len() != levels.len() {
            return Err(Error::Config(format!("norm {name} not reported on every level")));
        }
        report.orders.push(observed_orders(name, errors, ROUND_OFF_FLOOR)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_statuses() {
        let o = observed_orders("e", &[1.6e-3, 1e-4, 6.25e-6], ROUND_OFF_FLOOR).unwrap();
        assert_eq!(o.status, OrderStatus::Consistent);
        assert!(o.orders.iter().all(|v| (v.unwrap() - 4.0).abs() < 1e-12));
        let o = observed_orders("e", &[1e-3, 2e-3, 1e-4], ROUND_OFF_FLOOR).unwrap();
        assert_eq!(o.status, OrderStatus::Inconclusive);
        let o = observed_orders("e", &[1e-6, 1e-15, 0.0], ROUND_OFF_FLOOR).unwrap();
        assert_eq!(o.status, OrderStatus::RoundOffFloor);
        assert_eq!(o.orders[1], None);
        assert!(observed_orders("e", &[1.0, 0.5], ROUND_OFF_FLOOR).is_err());
    }

    #[test]
    fn levels_halve_together() {
        let g = Grid::periodic(32, 0.0, 1.0).unwrap();
        let l = refinement_levels(&g, 0.1, 3).unwrap();
        assert_eq!(l[2].grid.len(), 128);
        assert!((l[2].dt - 0.025).abs() < 1e-15);
        let line = Grid::line(11, 0.0, 1.0).unwrap();
        assert_eq!(refinement_levels(&line, 0.1, 3).unwrap()[2].grid.len(), 41);
    }
}
