use serde::Serialize;

use crate::error::{Error, Result};
use crate::spline::KnotVector;

/// `j!/(j-q)!` as a float; 1 when `q == 0`.
pub(crate) fn falling_factorial(j: usize, q: usize) -> f64 {
    (j - q + 1..=j).map(|v| v as f64).product()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Piecewise polynomial of fixed degree in the local power basis
/// `(x − left endpoint of interval)^j`.
///
/// Evaluation at a breakpoint takes the right-limit, except at the global
/// right endpoint which takes the left-limit, so possibly-discontinuous
/// top derivatives have deterministic values.
#[derive(Debug, Clone, Serialize)]
pub struct PiecewisePoly {
    breaks: KnotVector,
    /// One row per interval, each of length `degree + 1`.
    coeffs: Vec<Vec<f64>>,
    degree: usize,
}

impl PiecewisePoly {
    pub fn new(breaks: KnotVector, coeffs: Vec<Vec<f64>>, degree: usize) -> Result<Self> {
        if coeffs.len() != breaks.num_intervals() {
            return Err(Error::argument(format!(
                "expected {} coefficient rows, got {}",
                breaks.num_intervals(),
                coeffs.len()
            )));
        }
        if let Some(row) = coeffs.iter().find(|r| r.len() != degree + 1) {
            return Err(Error::argument(format!(
                "coefficient rows must have length {}, got {}",
                degree + 1,
                row.len()
            )));
        }
        Ok(PiecewisePoly {
            breaks,
            coeffs,
            degree,
        })
    }

    /// A single global polynomial viewed as a one-interval piecewise
    /// polynomial on `[lo, hi]`. Coefficients are in powers of `(x − lo)`.
    pub fn from_single(lo: f64, hi: f64, local_coeffs: Vec<f64>) -> Result<Self> {
        let degree = local_coeffs.len().saturating_sub(1);
        let breaks = KnotVector::new(vec![lo, hi])?;
        PiecewisePoly::new(breaks, vec![local_coeffs], degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn breaks(&self) -> &KnotVector {
        &self.breaks
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks.first(), self.breaks.last())
    }

    /// `deriv_order`-th derivative at `x`.
    ///
    /// Allows `deriv_order` up to `degree + 1` (which is identically zero);
    /// anything above is an argument error, points outside the span are a
    /// domain error.
    pub fn eval(&self, x: f64, deriv_order: usize) -> Result<f64> {
        if deriv_order > self.degree + 1 {
            return Err(Error::argument(format!(
                "derivative order {deriv_order} exceeds degree+1 = {}",
                self.degree + 1
            )));
        }
        if !(self.breaks.first()..=self.breaks.last()).contains(&x) {
            return Err(Error::domain(format!(
                "x = {x} outside [{}, {}]",
                self.breaks.first(),
                self.breaks.last()
            )));
        }
        if deriv_order == self.degree + 1 {
            return Ok(0.0);
        }
        let i = self.breaks.interval_index(x);
        Ok(self.eval_in_interval(i, x, deriv_order))
    }

    /// Evaluates interval `i`'s polynomial at `x` without interval lookup.
    /// Used for one-sided limits at breakpoints.
    pub fn eval_in_interval(&self, i: usize, x: f64, deriv_order: usize) -> f64 {
        let q = deriv_order;
        if q > self.degree {
            return 0.0;
        }
        let dx = x - self.breaks.as_slice()[i];
        let row = &self.coeffs[i];
        let mut acc = row[self.degree] * falling_factorial(self.degree, q);
        for j in (q..self.degree).rev() {
            acc = acc * dx + row[j] * falling_factorial(j, q);
        }
        acc
    }

    /// Jump of the `deriv_order`-th derivative at internal breakpoint index
    /// `m` (1-based among breaks), i.e. right-limit minus left-limit.
    pub fn derivative_jump(&self, m: usize, deriv_order: usize) -> f64 {
        let x = self.breaks.as_slice()[m];
        self.eval_in_interval(m, x, deriv_order) - self.eval_in_interval(m - 1, x, deriv_order)
    }

    /// Antiderivative with value `value_at_left` at the left endpoint.
    /// Continuous across breakpoints by construction.
    pub fn antiderivative(&self, value_at_left: f64) -> PiecewisePoly {
        let nb = self.breaks.as_slice();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut running = value_at_left;
        for (i, row) in self.coeffs.iter().enumerate() {
            let mut new_row = vec![0.0; self.degree + 2];
            new_row[0] = running;
            for (j, &c) in row.iter().enumerate() {
                new_row[j + 1] = c / (j + 1) as f64;
            }
            let h = nb[i + 1] - nb[i];
            // value at the right end of the interval becomes the next constant
            let mut acc = new_row[self.degree + 1];
            for j in (0..=self.degree).rev() {
                acc = acc * h + new_row[j];
            }
            running = acc;
            coeffs.push(new_row);
        }
        PiecewisePoly {
            breaks: self.breaks.clone(),
            coeffs,
            degree: self.degree + 1,
        }
    }

    /// k-fold antiderivative, all integration constants zero at the left
    /// endpoint.
    pub fn antiderivative_n(&self, times: usize) -> PiecewisePoly {
        let mut p = self.clone();
        for _ in 0..times {
            p = p.antiderivative(0.0);
        }
        p
    }
}

/// Dense polynomial in the global power basis `c_0 + c_1 x + ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `deriv_order`-th derivative at `x` (zero above the degree).
    pub fn eval(&self, x: f64, deriv_order: usize) -> f64 {
        let q = deriv_order;
        let deg = self.degree();
        if q > deg {
            return 0.0;
        }
        let mut acc = self.coeffs[deg] * falling_factorial(deg, q);
        for j in (q..deg).rev() {
            acc = acc * x + self.coeffs[j] * falling_factorial(j, q);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_squared() -> PiecewisePoly {
        // t^2 on [0, 1] split at 0.5: local forms t^2 and (0.25 + (x-0.5) + (x-0.5)^2)
        let breaks = KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap();
        PiecewisePoly::new(
            breaks,
            vec![vec![0.0, 0.0, 1.0], vec![0.25, 1.0, 1.0]],
            2,
        )
        .unwrap()
    }

    #[test]
    fn eval_derivative_of_t_squared() {
        let p = t_squared();
        assert!((p.eval(0.5, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.eval(0.25, 0).unwrap() - 0.0625).abs() < 1e-15);
        assert!((p.eval(1.0, 0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p.eval(0.7, 3).unwrap(), 0.0); // degree + 1
        assert!(p.eval(0.7, 4).is_err());
        assert!(p.eval(-0.1, 0).is_err());
        assert!(p.eval(1.1, 0).is_err());
    }

    #[test]
    fn constant_eval() {
        let p = PiecewisePoly::from_single(0.0, 2.0, vec![3.0]).unwrap();
        assert_eq!(p.eval(1.3, 0).unwrap(), 3.0);
        assert_eq!(p.eval(0.0, 0).unwrap(), 3.0);
        assert_eq!(p.eval(2.0, 0).unwrap(), 3.0);
        assert_eq!(p.eval(1.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn antiderivative_of_t_squared_is_t_cubed_over_3() {
        let p = t_squared();
        let a = p.antiderivative(0.0);
        for &x in &[0.0, 0.3, 0.5, 0.8, 1.0] {
            let expect = x * x * x / 3.0;
            assert!((a.eval(x, 0).unwrap() - expect).abs() < 1e-14, "x={x}");
        }
        // derivative of the antiderivative recovers the original
        for &x in &[0.1, 0.49, 0.51, 0.9] {
            assert!((a.eval(x, 1).unwrap() - x * x).abs() < 1e-14);
        }
    }

    #[test]
    fn polynomial_horner_with_derivatives() {
        // 1 + 2x + 3x^2
        let p = Polynomial::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0, 0), 17.0);
        assert_eq!(p.eval(2.0, 1), 14.0);
        assert_eq!(p.eval(2.0, 2), 6.0);
        assert_eq!(p.eval(2.0, 3), 0.0);
    }
}
