use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::density::TruthDensity;
use crate::spline::poly::factorial;

/// The scaling constants of the pointwise limit distribution,
///
/// `c_j(x₀) = { g₀(x₀)^{k−j} ((−1)^k g₀^{(k)}(x₀)/k!)^{2j+1} }^{1/(2k+1)}`,
///
/// for j = 0..k−1. They also set the asymptotic minimax L₁ lower bound.
#[derive(Debug, Clone, Serialize)]
pub struct LimitConstants {
    pub x0: f64,
    pub k: usize,
    pub c: Vec<f64>,
}

pub fn limit_constants(k: usize, x0: f64, density: &dyn TruthDensity) -> Result<LimitConstants> {
    if k < 1 {
        return Err(Error::argument("k must be >= 1"));
    }
    let g0 = density.density(x0);
    let dk = density.signed_kth_deriv(x0, k);
    if !(g0 > 0.0) {
        return Err(Error::argument(format!(
            "need g0(x0) > 0, got {g0} at x0 = {x0}"
        )));
    }
    if !(dk > 0.0) {
        return Err(Error::argument(format!(
            "need (-1)^k g0^(k)(x0) > 0, got {dk} at x0 = {x0}"
        )));
    }
    let base = dk / factorial(k);
    let exponent = 1.0 / (2 * k + 1) as f64;
    let c = (0..k)
        .map(|j| (g0.powi((k - j) as i32) * base.powi((2 * j + 1) as i32)).powf(exponent))
        .collect();
    Ok(LimitConstants { x0, k, c })
}
