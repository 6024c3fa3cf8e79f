use crate::error::{Error, Result};
use crate::lse::SampleSet;
use crate::spline::poly::factorial;

/// The (k−1)-fold integral of the empirical distribution,
///
/// `Y_n(x) = (1/n) Σ_i (x − X_i)_+^{k−1} / (k−1)!`,
///
/// evaluated together with its derivatives up to order k−1 in
/// O(k log n) per call via prefix sums of sample powers.
#[derive(Debug, Clone)]
pub struct EmpiricalIntegrals {
    sorted: Vec<f64>,
    /// prefix[j][i] = Σ_{m < i} sorted[m]^j for j = 0..k-1
    prefix: Vec<Vec<f64>>,
    k: usize,
}

impl EmpiricalIntegrals {
    pub fn new(samples: &SampleSet, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::argument("k must be >= 1"));
        }
        let mut sorted = samples.observations().to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut prefix = Vec::with_capacity(k);
        for j in 0..k {
            let mut acc = 0.0;
            let mut row = Vec::with_capacity(n + 1);
            row.push(0.0);
            for &x in &sorted {
                acc += x.powi(j as i32);
                row.push(acc);
            }
            prefix.push(row);
        }
        Ok(EmpiricalIntegrals { sorted, prefix, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `deriv_order`-th derivative of Y_n at `x`, for orders 0..=k-1.
    pub fn eval(&self, x: f64, deriv_order: usize) -> Result<f64> {
        if deriv_order >= self.k {
            return Err(Error::argument(format!(
                "deriv_order must be <= k-1 = {}, got {deriv_order}",
                self.k - 1
            )));
        }
        if x < 0.0 {
            return Err(Error::domain(format!("x must be >= 0, got {x}")));
        }
        let e = self.k - 1 - deriv_order;
        let n = self.sorted.len() as f64;
        // right-continuous: samples with X_i <= x contribute
        let cnt = self.sorted.partition_point(|&s| s <= x);
        if e == 0 {
            return Ok(self.prefix[0][cnt] / n);
        }
        // (x - X)^e expanded through the prefix sums of X^j
        let mut sum = 0.0;
        let mut binom = 1.0;
        let mut sign = 1.0;
        for j in 0..=e {
            sum += sign * binom * x.powi((e - j) as i32) * self.prefix[j][cnt];
            binom *= (e - j) as f64 / (j + 1) as f64;
            sign = -sign;
        }
        Ok(sum / (factorial(e) * n))
    }
}

/// One-shot evaluation of the empirical integral; prefer
/// [`EmpiricalIntegrals`] when evaluating many times.
pub fn empirical_y(samples: &SampleSet, k: usize, x: f64, deriv_order: usize) -> Result<f64> {
    EmpiricalIntegrals::new(samples, k)?.eval(x, deriv_order)
}
