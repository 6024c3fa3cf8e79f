use crate::spline::poly::factorial;
use crate::spline::{PiecewisePoly, Polynomial};

/// A function that can be Hermite-interpolated: value and slope everywhere,
/// and optionally higher derivatives (needed for derivative error norms).
pub trait InterpTarget {
    fn value_slope(&self, x: f64) -> (f64, f64);

    /// `order`-th derivative at `x`, `None` when unavailable.
    fn deriv(&self, x: f64, order: usize) -> Option<f64> {
        match order {
            0 => Some(self.value_slope(x).0),
            1 => Some(self.value_slope(x).1),
            _ => None,
        }
    }
}

/// Adapter for plain value/slope closures.
pub struct FnTarget<F: Fn(f64) -> (f64, f64)>(pub F);

impl<F: Fn(f64) -> (f64, f64)> InterpTarget for FnTarget<F> {
    fn value_slope(&self, x: f64) -> (f64, f64) {
        (self.0)(x)
    }
}

impl InterpTarget for Polynomial {
    fn value_slope(&self, x: f64) -> (f64, f64) {
        (self.eval(x, 0), self.eval(x, 1))
    }

    fn deriv(&self, x: f64, order: usize) -> Option<f64> {
        Some(self.eval(x, order))
    }
}

impl InterpTarget for PiecewisePoly {
    fn value_slope(&self, x: f64) -> (f64, f64) {
        (
            self.eval(x, 0).expect("target evaluated outside its domain"),
            self.eval(x, 1).expect("target evaluated outside its domain"),
        )
    }

    fn deriv(&self, x: f64, order: usize) -> Option<f64> {
        if order > self.degree() {
            return Some(0.0);
        }
        Some(self.eval(x, order).expect("target evaluated outside its domain"))
    }
}

/// `(x-u)_+^{k-1} / (k-1)!` with the right-continuous convention
/// `(x-u)_+^0 = 1` for `x >= u`.
pub fn truncated_power(u: f64, k: usize, x: f64) -> f64 {
    assert!(k >= 1, "truncated power needs k >= 1");
    let d = x - u;
    if d < 0.0 {
        return 0.0;
    }
    if k == 1 {
        return 1.0;
    }
    d.powi((k - 1) as i32) / factorial(k - 1)
}

/// The kernel `b_u(x) = (x-u)_+^{k-1}/(k-1)!` as an interpolation target;
/// derivatives of order `q <= k-1` are truncated powers of lower degree,
/// orders `q >= k` are zero (the a.e. value).
#[derive(Debug, Clone, Copy)]
pub struct TruncatedPower {
    pub u: f64,
    pub k: usize,
}

impl InterpTarget for TruncatedPower {
    fn value_slope(&self, x: f64) -> (f64, f64) {
        let v = truncated_power(self.u, self.k, x);
        let s = if self.k >= 2 {
            truncated_power(self.u, self.k - 1, x)
        } else {
            0.0
        };
        (v, s)
    }

    fn deriv(&self, x: f64, order: usize) -> Option<f64> {
        if order >= self.k {
            return Some(0.0);
        }
        Some(truncated_power(self.u, self.k - order, x))
    }
}
