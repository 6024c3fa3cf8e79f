use serde::Serialize;

use crate::error::{Error, Result};

/// Strictly increasing, finite breakpoints with closed endpoints.
///
/// Used both for spline breakpoints and for Hermite interpolation nodes
/// (in which case the interior points are the spline's simple knots).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnotVector {
    points: Vec<f64>,
}

impl KnotVector {
    /// Validates and wraps a breakpoint list: finite entries, strictly
    /// increasing, at least two points.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::argument(format!(
                "knot vector needs at least 2 points, got {}",
                points.len()
            )));
        }
        for &p in &points {
            if !p.is_finite() {
                return Err(Error::argument(format!("non-finite knot {p}")));
            }
        }
        for w in points.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::argument(format!(
                    "knots must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(KnotVector { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: len >= 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.points
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn span(&self) -> f64 {
        self.last() - self.first()
    }

    /// Smallest distance between adjacent knots.
    pub fn min_gap(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Interior points (everything but the two endpoints).
    pub fn interior(&self) -> &[f64] {
        &self.points[1..self.points.len() - 1]
    }

    /// Number of intervals between consecutive knots.
    pub fn num_intervals(&self) -> usize {
        self.points.len() - 1
    }

    /// Index of the interval containing `x` under the right-limit rule:
    /// `x ∈ [b_i, b_{i+1})` maps to `i`, the right endpoint maps to the
    /// last interval. `x` must already be inside the span.
    pub fn interval_index(&self, x: f64) -> usize {
        let n = self.num_intervals();
        let idx = self.points.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(n - 1)
    }

    /// Checks the node-count requirement for Hermite interpolation at
    /// order `k` (exactly 2k−2 nodes).
    pub fn validate_for_order(&self, k: usize) -> Result<()> {
        if k < 2 {
            return Err(Error::argument(format!(
                "Hermite interpolation order k must be >= 2, got {k}"
            )));
        }
        let want = 2 * k - 2;
        if self.len() != want {
            return Err(Error::argument(format!(
                "order k={k} requires exactly {want} nodes, got {}",
                self.len()
            )));
        }
        Ok(())
    }
}
