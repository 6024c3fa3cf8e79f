use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spline::poly::falling_factorial;
use crate::spline::{InterpTarget, KnotVector, PiecewisePoly};

/// Condition-estimate ceiling above which the factorization is refused.
const COND_LIMIT: f64 = 1e13;
/// Nodes closer than this fraction of the span are rejected outright.
const MIN_GAP_FRACTION: f64 = 1e-13;
/// Residual tolerance for the interpolation conditions, relative to data size.
const RESIDUAL_TOL: f64 = 1e-9;

/// Value/slope interpolation data at `2k−2` nodes.
#[derive(Debug, Clone)]
pub struct HermiteData {
    pub nodes: KnotVector,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl HermiteData {
    pub fn new(nodes: KnotVector, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if values.len() != nodes.len() || slopes.len() != nodes.len() {
            return Err(Error::argument(format!(
                "values ({}) and slopes ({}) must match node count {}",
                values.len(),
                slopes.len(),
                nodes.len()
            )));
        }
        Ok(HermiteData {
            nodes,
            values,
            slopes,
        })
    }

    /// Samples value and slope of `target` at every node.
    pub fn from_target(target: &dyn InterpTarget, nodes: &KnotVector) -> Self {
        let (values, slopes) = nodes
            .as_slice()
            .iter()
            .map(|&a| target.value_slope(a))
            .unzip();
        HermiteData {
            nodes: nodes.clone(),
            values,
            slopes,
        }
    }
}

/// Factored Hermite interpolation system for a fixed node set and order.
///
/// The linear system is assembled in a per-interval local power basis,
/// shifted to each interval's left endpoint and scaled by the interval
/// length; continuity rows are rescaled by the smaller adjacent interval
/// so entries stay O((2k−1)!). The factorization is column-pivoted QR and
/// can be reused across right-hand sides.
pub struct HermiteOperator {
    nodes: KnotVector,
    k: usize,
    qr: nalgebra::linalg::ColPivQR<f64, nalgebra::Dyn, nalgebra::Dyn>,
    cond_estimate: f64,
}

impl HermiteOperator {
    pub fn new(nodes: &KnotVector, k: usize) -> Result<Self> {
        nodes.validate_for_order(k)?;
        if nodes.min_gap() < MIN_GAP_FRACTION * nodes.span() {
            return Err(Error::Conditioning {
                cond: f64::INFINITY,
                context: format!(
                    "nodes closer than {MIN_GAP_FRACTION:e} of the span {:?}",
                    nodes.as_slice()
                ),
            });
        }

        let dim = 2 * k * (2 * k - 3);
        let mut mat = DMatrix::<f64>::zeros(dim, dim);
        let nb = nodes.as_slice();
        let ni = nodes.num_intervals();
        let deg = 2 * k - 1;
        let col = |interval: usize, j: usize| interval * (deg + 1) + j;

        let mut row = 0;
        // interpolation rows: value then slope per node
        for (r, _) in nb.iter().enumerate() {
            if r < ni {
                mat[(row, col(r, 0))] = 1.0;
                row += 1;
                mat[(row, col(r, 1))] = 1.0; // slope row, rhs scaled by h_r
                row += 1;
            } else {
                // last node: right end of the last interval, local coord 1
                for j in 0..=deg {
                    mat[(row, col(ni - 1, j))] = 1.0;
                }
                row += 1;
                for j in 1..=deg {
                    mat[(row, col(ni - 1, j))] = j as f64;
                }
                row += 1;
            }
        }
        // continuity rows: C^{2k-2} at each internal breakpoint
        for m in 1..ni {
            let hl = nb[m] - nb[m - 1];
            let hr = nb[m + 1] - nb[m];
            let s = hl.min(hr);
            for q in 0..=2 * k - 2 {
                let left_scale = (s / hl).powi(q as i32);
                let right_scale = (s / hr).powi(q as i32);
                for j in q..=deg {
                    mat[(row, col(m - 1, j))] = falling_factorial(j, q) * left_scale;
                }
                mat[(row, col(m, q))] = -falling_factorial(q, q) * right_scale;
                row += 1;
            }
        }
        debug_assert_eq!(row, dim);

        let qr = mat.col_piv_qr();
        let r_diag = qr.r();
        let mut dmax: f64 = 0.0;
        let mut dmin = f64::INFINITY;
        for i in 0..dim {
            let d = r_diag[(i, i)].abs();
            dmax = dmax.max(d);
            dmin = dmin.min(d);
        }
        let cond_estimate = if dmin == 0.0 { f64::INFINITY } else { dmax / dmin };
        if cond_estimate > COND_LIMIT {
            return Err(Error::Conditioning {
                cond: cond_estimate,
                context: format!("Hermite system for nodes {:?}", nodes.as_slice()),
            });
        }
        Ok(HermiteOperator {
            nodes: nodes.clone(),
            k,
            qr,
            cond_estimate,
        })
    }

    pub fn nodes(&self) -> &KnotVector {
        &self.nodes
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn cond_estimate(&self) -> f64 {
        self.cond_estimate
    }

    /// Solves for the interpolant of the given value/slope data.
    pub fn interpolate(&self, values: &[f64], slopes: &[f64]) -> Result<PiecewisePoly> {
        let nb = self.nodes.as_slice();
        let ni = self.nodes.num_intervals();
        let deg = 2 * self.k - 1;
        let dim = 2 * self.k * (2 * self.k - 3);
        if values.len() != nb.len() || slopes.len() != nb.len() {
            return Err(Error::argument(format!(
                "expected {} values and slopes, got {} and {}",
                nb.len(),
                values.len(),
                slopes.len()
            )));
        }

        let mut rhs = DVector::<f64>::zeros(dim);
        let mut row = 0;
        for (r, (&v, &s)) in values.iter().zip(slopes).enumerate() {
            let h = if r < ni {
                nb[r + 1] - nb[r]
            } else {
                nb[ni] - nb[ni - 1]
            };
            rhs[row] = v;
            rhs[row + 1] = h * s;
            row += 2;
        }

        let sol = self.qr.solve(&rhs).ok_or_else(|| Error::Conditioning {
            cond: self.cond_estimate,
            context: format!("singular Hermite system for nodes {:?}", nb),
        })?;

        // unscale: stored basis is ((x-a_i)/h_i)^j, target is (x-a_i)^j
        let mut coeffs = Vec::with_capacity(ni);
        for i in 0..ni {
            let h = nb[i + 1] - nb[i];
            let mut r = Vec::with_capacity(deg + 1);
            let mut hp = 1.0;
            for j in 0..=deg {
                r.push(sol[i * (deg + 1) + j] / hp);
                hp *= h;
            }
            coeffs.push(r);
        }
        let poly = PiecewisePoly::new(self.nodes.clone(), coeffs, deg)?;

        // enforce the residual postcondition
        let vscale = 1.0 + values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let sscale = 1.0 + slopes.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (r, &a) in nb.iter().enumerate() {
            let rv = (poly.eval(a, 0)? - values[r]).abs();
            let rs = (poly.eval(a, 1)? - slopes[r]).abs();
            if rv > RESIDUAL_TOL * vscale || rs > RESIDUAL_TOL * sscale {
                return Err(Error::Conditioning {
                    cond: self.cond_estimate,
                    context: format!(
                        "interpolation residual {:.3e}/{:.3e} too large at node {a}",
                        rv, rs
                    ),
                });
            }
        }
        Ok(poly)
    }
}

/// The unique spline of degree `2k−1` with simple knots at the interior
/// nodes matching all value and slope conditions.
pub fn hermite_interpolate(data: &HermiteData, k: usize) -> Result<PiecewisePoly> {
    let op = HermiteOperator::new(&data.nodes, k)?;
    op.interpolate(&data.values, &data.slopes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{perfect_spline, Polynomial};

    fn nodes_0361() -> KnotVector {
        KnotVector::new(vec![0.0, 0.3, 0.6, 1.0]).unwrap()
    }

    #[test]
    fn reproduces_the_identity_function() {
        let nodes = nodes_0361();
        let data = HermiteData::new(
            nodes.clone(),
            nodes.as_slice().to_vec(),
            vec![1.0; 4],
        )
        .unwrap();
        let h = hermite_interpolate(&data, 3).unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((h.eval(x, 0).unwrap() - x).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn interpolation_conditions_hold() {
        let nodes = nodes_0361();
        let values = vec![0.3, -1.2, 0.7, 2.5];
        let slopes = vec![1.0, 0.0, -3.0, 0.5];
        let data = HermiteData::new(nodes.clone(), values.clone(), slopes.clone()).unwrap();
        let h = hermite_interpolate(&data, 3).unwrap();
        for (j, &a) in nodes.as_slice().iter().enumerate() {
            assert!((h.eval(a, 0).unwrap() - values[j]).abs() < 1e-9 * (1.0 + values[j].abs()));
            assert!((h.eval(a, 1).unwrap() - slopes[j]).abs() < 1e-9 * (1.0 + slopes[j].abs()));
        }
    }

    #[test]
    fn degree_five_polynomial_is_reproduced() {
        let p = Polynomial::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]); // x^5
        let nodes = nodes_0361();
        let data = HermiteData::from_target(&p, &nodes);
        let h = hermite_interpolate(&data, 3).unwrap();
        for i in 0..=64 {
            let x = i as f64 / 64.0;
            assert!((h.eval(x, 0).unwrap() - p.eval(x, 0)).abs() < 1e-9);
        }
    }

    #[test]
    fn wrong_node_count_is_an_argument_error() {
        let nodes = KnotVector::new(vec![0.0, 1.0]).unwrap();
        let data = HermiteData::new(nodes, vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            hermite_interpolate(&data, 3),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn coalescent_nodes_are_refused() {
        let nodes = KnotVector::new(vec![0.0, 0.5, 0.5 + 1e-15, 1.0]).unwrap();
        let data = HermiteData::new(nodes, vec![0.0; 4], vec![0.0; 4]).unwrap();
        assert!(matches!(
            hermite_interpolate(&data, 3),
            Err(Error::Conditioning { .. })
        ));
    }

    #[test]
    fn smoothness_at_internal_knots() {
        let s = perfect_spline(3, &[0.3, 0.6]).unwrap();
        let nodes = nodes_0361();
        let data = HermiteData::from_target(&s, &nodes);
        let h = hermite_interpolate(&data, 3).unwrap();
        for m in 1..=2 {
            for q in 0..=4 {
                let x = nodes.as_slice()[m];
                let left = h.eval_in_interval(m - 1, x, q);
                let right = h.eval_in_interval(m, x, q);
                let scale = 1.0 + left.abs().max(right.abs());
                assert!(
                    (left - right).abs() <= 1e-8 * scale,
                    "order {q} at knot {x}: {left} vs {right}"
                );
            }
        }
    }
}
