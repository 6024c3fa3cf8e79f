use serde::Serialize;

use crate::error::Result;
use crate::spline::hermite::{HermiteData, HermiteOperator};
use crate::spline::sup::sup_abs_on_breaks;
use crate::spline::{InterpTarget, KnotVector, PiecewisePoly};

/// Probe points per knot interval for the coarse sup-norm grid.
const PROBES_PER_INTERVAL: usize = 2048;
/// Relative tolerance of the golden-section refinement.
const REFINE_TOL: f64 = 1e-10;

/// Sup-norm record for one derivative order of the interpolation error.
#[derive(Debug, Clone, Serialize)]
pub struct SupEntry {
    pub deriv_order: usize,
    pub sup: f64,
    pub arg_max: f64,
    /// Sign of the extremal error value within each knot interval.
    pub interval_signs: Vec<i8>,
}

/// Interpolation-error report: sup-norms of `H_k f − f` and of its
/// derivatives for every order the target can supply.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub k: usize,
    pub nodes: KnotVector,
    pub sup: Vec<SupEntry>,
    pub cond_estimate: f64,
    #[serde(skip)]
    pub interpolant: PiecewisePoly,
}

impl ErrorReport {
    /// Sup entry of a given derivative order, if it was computable.
    pub fn sup_of_order(&self, order: usize) -> Option<&SupEntry> {
        self.sup.iter().find(|e| e.deriv_order == order)
    }
}

/// Builds the Hermite interpolant of `target` on `nodes` and measures the
/// sup-norm of the error `H_k f − f` and of its derivatives up to order
/// `2k−1` (each order only when the target supplies that derivative).
///
/// The search uses a 2048-point grid per knot interval with golden-section
/// refinement around the top grid-local maxima.
pub fn interp_error(
    target: &dyn InterpTarget,
    nodes: &KnotVector,
    k: usize,
) -> Result<ErrorReport> {
    let op = HermiteOperator::new(nodes, k)?;
    let data = HermiteData::from_target(target, nodes);
    let interpolant = op.interpolate(&data.values, &data.slopes)?;

    let mut sup = Vec::new();
    for q in 0..=2 * k - 1 {
        if target.deriv(nodes.first(), q).is_none() {
            continue;
        }
        let err = |x: f64| {
            let i = nodes.interval_index(x);
            interpolant.eval_in_interval(i, x, q) - target.deriv(x, q).unwrap()
        };
        let (s, loc, signs) =
            sup_abs_on_breaks(&err, nodes.as_slice(), PROBES_PER_INTERVAL, REFINE_TOL);
        sup.push(SupEntry {
            deriv_order: q,
            sup: s,
            arg_max: loc,
            interval_signs: signs,
        });
    }

    Ok(ErrorReport {
        k,
        nodes: nodes.clone(),
        sup,
        cond_estimate: op.cond_estimate(),
        interpolant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{FnTarget, Polynomial};

    #[test]
    fn polynomial_targets_have_tiny_error() {
        // degree 2k-1 = 5 is reproduced, so every sup is numerical noise
        let p = Polynomial::new(vec![0.5, -1.0, 2.0, 0.0, -0.5, 1.0]);
        let nodes = KnotVector::new(vec![0.0, 0.3, 0.6, 1.0]).unwrap();
        let report = interp_error(&p, &nodes, 3).unwrap();
        let scale = 1.0 + (0..=100)
            .map(|i| p.eval(i as f64 / 100.0, 0).abs())
            .fold(0.0, f64::max);
        for entry in &report.sup {
            if entry.deriv_order == 0 {
                assert!(entry.sup <= 1e-9 * scale, "order 0 sup {}", entry.sup);
            }
        }
    }

    #[test]
    fn closure_targets_report_orders_zero_and_one_only() {
        let f = FnTarget(|x: f64| (x.sin(), x.cos()));
        let nodes = KnotVector::new(vec![0.0, 0.3, 0.6, 1.0]).unwrap();
        let report = interp_error(&f, &nodes, 3).unwrap();
        let orders: Vec<usize> = report.sup.iter().map(|e| e.deriv_order).collect();
        assert_eq!(orders, vec![0, 1]);
    }
}
