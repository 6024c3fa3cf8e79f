use serde::Serialize;

use crate::error::Result;
use crate::lse::empirical::EmpiricalIntegrals;
use crate::lse::kernel::{kernel, kernel_deriv};
use crate::lse::SampleSet;
use crate::spline::{KnotVector, PiecewisePoly};

/// Fitted k-monotone least-squares estimator: a nonnegative mixture of
/// scaled kernels, equivalently a spline of degree k−1.
#[derive(Debug, Clone)]
pub struct LseFit {
    pub k: usize,
    /// Kernel locations (sorted). These are the knots of the spline.
    pub thetas: Vec<f64>,
    /// Kernel weights (strictly positive).
    pub weights: Vec<f64>,
    /// The fitted density as a piecewise polynomial on [0, support_upper].
    pub spline: PiecewisePoly,
    /// Knot locations (same as thetas for a freshly fitted mixture).
    pub knots: Vec<f64>,
    /// Least-squares criterion value ½∫g² − ∫g dG_n.
    pub objective: f64,
    pub iterations: usize,
    /// Total mass ∫g (the LSE need not integrate to exactly one).
    pub mass: f64,
    /// Right end T of the support domain used by the solver.
    pub support_upper: f64,
    /// Smallest Fenchel gap found by the convergence scan.
    pub fenchel_min: f64,
    /// Number of observations the fit was computed from.
    pub n: usize,
}

impl LseFit {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_mixture(
        k: usize,
        thetas: Vec<f64>,
        weights: Vec<f64>,
        support_upper: f64,
        objective: f64,
        iterations: usize,
        fenchel_min: f64,
        n: usize,
    ) -> LseFit {
        let spline = mixture_to_piecewise(k, &thetas, &weights, support_upper);
        let mass = weights.iter().sum();
        LseFit {
            k,
            knots: thetas.clone(),
            thetas,
            weights,
            spline,
            objective,
            iterations,
            mass,
            support_upper,
            fenchel_min,
            n,
        }
    }

    /// Density value via the mixture (left-continuous at kernel endpoints,
    /// which matches the Grenander estimator at its jump points for k = 1).
    pub fn density(&self, x: f64) -> f64 {
        self.thetas
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * kernel(self.k, t, x))
            .sum()
    }

    /// `order`-th derivative of the density (a.e. value).
    pub fn density_deriv(&self, x: f64, order: usize) -> f64 {
        self.thetas
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * kernel_deriv(self.k, t, x, order))
            .sum()
    }

    /// The k-fold integral H̃_n of the fitted density, on [0, support_upper].
    pub fn h_tilde(&self) -> PiecewisePoly {
        self.spline.antiderivative_n(self.k)
    }

    /// Knots strictly inside the support domain (a knot clamped to the
    /// boundary T satisfies only one-sided optimality conditions).
    pub fn interior_knots(&self) -> &[f64] {
        let end = self.support_upper * (1.0 - 1e-12);
        let cut = self.knots.partition_point(|&t| t < end);
        &self.knots[..cut]
    }

    /// Serializable summary (the external JSON schema).
    pub fn export(&self) -> LseFitExport {
        LseFitExport {
            k: self.k,
            knots: self.knots.clone(),
            weights: self.weights.clone(),
            thetas: self.thetas.clone(),
            objective: self.objective,
            fenchel_min: self.fenchel_min,
            mass: self.mass,
        }
    }
}

/// External JSON schema for fitted estimators.
#[derive(Debug, Clone, Serialize)]
pub struct LseFitExport {
    pub k: usize,
    pub knots: Vec<f64>,
    pub weights: Vec<f64>,
    pub thetas: Vec<f64>,
    pub objective: f64,
    pub fenchel_min: f64,
    pub mass: f64,
}

fn mixture_to_piecewise(
    k: usize,
    thetas: &[f64],
    weights: &[f64],
    support_upper: f64,
) -> PiecewisePoly {
    let mut breaks = vec![0.0];
    breaks.extend(thetas.iter().copied());
    if breaks.last().copied().unwrap_or(0.0) < support_upper {
        breaks.push(support_upper);
    }
    let breaks = KnotVector::new(breaks).expect("mixture breakpoints are sorted and distinct");
    let deg = k - 1;
    let bslice = breaks.as_slice();
    let mut coeffs = Vec::with_capacity(breaks.num_intervals());
    for i in 0..breaks.num_intervals() {
        let left = bslice[i];
        let right = bslice[i + 1];
        let mut row = vec![0.0; deg + 1];
        for (&theta, &w) in thetas.iter().zip(weights) {
            if theta < right {
                continue; // kernel support ended at or before this interval
            }
            // w (k/θ^k)(θ-x)^{k-1} expanded around `left`
            let scale = w * k as f64 / theta.powi(k as i32);
            let base = theta - left;
            let mut binom = 1.0;
            let mut pow = base.powi(deg as i32);
            for (j, rj) in row.iter_mut().enumerate() {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                *rj += scale * sign * binom * pow;
                binom *= (deg - j) as f64 / (j + 1) as f64;
                if base != 0.0 {
                    pow /= base;
                } else {
                    pow = if deg - j == 1 { 1.0 } else { 0.0 };
                }
            }
        }
        coeffs.push(row);
    }
    PiecewisePoly::new(breaks, coeffs, deg).expect("row shapes are consistent")
}

/// Fenchel-condition audit of a fit: the minimum of `H̃_n − Y_n` over a
/// uniform grid (plus knots and sample points), the worst equality
/// violation at the knots, and — for k ≥ 2 — the worst slope equality
/// violation at the knots.
#[derive(Debug, Clone, Serialize)]
pub struct FenchelAudit {
    pub min_gap: f64,
    pub argmin: f64,
    pub max_knot_gap: f64,
    pub max_knot_slope_gap: Option<f64>,
    pub grid_size: usize,
}

pub fn fenchel_audit(fit: &LseFit, samples: &SampleSet, grid_size: usize) -> Result<FenchelAudit> {
    let emp = EmpiricalIntegrals::new(samples, fit.k)?;
    let h = fit.h_tilde();
    let t_end = fit.support_upper;

    let gap = |x: f64| -> Result<f64> {
        Ok(h.eval(x, 0)? - emp.eval(x, 0)?)
    };

    let mut min_gap = f64::INFINITY;
    let mut argmin = 0.0;
    let check = |x: f64, min_gap: &mut f64, argmin: &mut f64| -> Result<()> {
        let g = gap(x)?;
        if g < *min_gap {
            *min_gap = g;
            *argmin = x;
        }
        Ok(())
    };
    for i in 0..=grid_size {
        check(t_end * i as f64 / grid_size as f64, &mut min_gap, &mut argmin)?;
    }
    for &x in samples.observations() {
        if x <= t_end {
            check(x, &mut min_gap, &mut argmin)?;
        }
    }
    for &t in &fit.knots {
        check(t, &mut min_gap, &mut argmin)?;
    }

    let mut max_knot_gap = 0.0f64;
    for &t in &fit.knots {
        max_knot_gap = max_knot_gap.max(gap(t)?.abs());
    }
    // slope equalities hold at interior minima of the gap; a knot clamped
    // to the support boundary only satisfies the one-sided condition
    let max_knot_slope_gap = if fit.k >= 2 {
        let mut worst = 0.0f64;
        for &t in fit.interior_knots() {
            worst = worst.max((h.eval(t, 1)? - emp.eval(t, 1)?).abs());
        }
        Some(worst)
    } else {
        None
    };

    Ok(FenchelAudit {
        min_gap,
        argmin,
        max_knot_gap,
        max_knot_slope_gap,
        grid_size,
    })
}

/// Jump locations of the (k−1)-st derivative of the fitted spline whose
/// jump magnitude is at least `threshold` times the largest jump. Sorted,
/// deduplicated; empty when there are no jumps at all.
pub fn extract_knots(fit: &LseFit, threshold: f64) -> Vec<f64> {
    let spline = &fit.spline;
    let breaks = spline.breaks().as_slice();
    let mut jumps: Vec<(f64, f64)> = Vec::new();
    for m in 1..breaks.len() - 1 {
        let j = spline.derivative_jump(m, fit.k - 1).abs();
        if j > 0.0 {
            jumps.push((breaks[m], j));
        }
    }
    // the mixture's largest θ is a knot of the density even when it is the
    // spline's right endpoint (no interior jump row exists for it)
    if let Some(&last_theta) = fit.thetas.last() {
        if (last_theta - breaks[breaks.len() - 1]).abs() <= f64::EPSILON * fit.support_upper {
            let m = breaks.len() - 1;
            let j = (spline.eval_in_interval(m - 1, breaks[m], fit.k - 1)).abs();
            if j > 0.0 {
                jumps.push((breaks[m], j));
            }
        }
    }
    if jumps.is_empty() {
        return Vec::new();
    }
    let max_jump = jumps.iter().map(|p| p.1).fold(0.0f64, f64::max);
    let mut out: Vec<f64> = jumps
        .into_iter()
        .filter(|&(_, j)| j >= threshold * max_jump)
        .map(|(x, _)| x)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lse::solver::{fit_lse, SolverConfig};

    #[test]
    fn spline_matches_mixture_evaluation() {
        let s = SampleSet::from_exponential(40, 1.0, 2).unwrap();
        for k in 1..=3 {
            let fit = fit_lse(&s, k, &SolverConfig::default()).unwrap();
            for i in 0..=200 {
                let x = fit.support_upper * i as f64 / 200.0;
                let a = fit.spline.eval(x, 0).unwrap();
                let b = fit.density(x);
                // piecewise eval takes right limits; mixture is left-continuous
                // at knots, so compare away from them
                if fit.knots.iter().all(|&t| (t - x).abs() > 1e-9) {
                    assert!(
                        (a - b).abs() <= 1e-10 * (1.0 + b.abs()),
                        "k={k} x={x}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn mass_equals_weight_sum_and_integral() {
        let s = SampleSet::from_exponential(30, 1.0, 9).unwrap();
        let fit = fit_lse(&s, 2, &SolverConfig::default()).unwrap();
        let h1 = fit.spline.antiderivative(0.0);
        let integral = h1.eval(fit.support_upper, 0).unwrap();
        assert!((integral - fit.mass).abs() < 1e-9);
    }

    #[test]
    fn extract_knots_single_observation() {
        let s = SampleSet::new(vec![2.0]).unwrap();
        let fit = fit_lse(&s, 1, &SolverConfig::default()).unwrap();
        let knots = extract_knots(&fit, 0.5);
        assert_eq!(knots.len(), 1);
        assert!((knots[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn extract_knots_two_separated_kernels() {
        let fit = LseFit::from_mixture(2, vec![1.0, 3.0], vec![0.4, 0.6], 4.0, 0.0, 0, 0.0, 0);
        let knots = extract_knots(&fit, 1e-6);
        assert_eq!(knots.len(), 2);
        assert!((knots[0] - 1.0).abs() < 1e-8);
        assert!((knots[1] - 3.0).abs() < 1e-8);
        // threshold 1 keeps only the largest jump
        let top = extract_knots(&fit, 1.0);
        assert!(top.len() <= 1);
    }

    #[test]
    fn fenchel_audit_on_converged_fit() {
        let s = SampleSet::from_exponential(50, 1.0, 13).unwrap();
        let fit = fit_lse(&s, 3, &SolverConfig::default()).unwrap();
        let audit = fenchel_audit(&fit, &s, 10_000).unwrap();
        let scale = 1.0 + EmpiricalIntegrals::new(&s, 3)
            .unwrap()
            .eval(fit.support_upper, 0)
            .unwrap();
        assert!(audit.min_gap >= -1e-8 * scale, "min gap {}", audit.min_gap);
        assert!(audit.max_knot_gap <= 1e-8 * scale, "knot gap {}", audit.max_knot_gap);
        assert!(
            audit.max_knot_slope_gap.unwrap() <= 1e-6 * scale,
            "slope gap {:?}",
            audit.max_knot_slope_gap
        );
    }

    #[test]
    fn perturbed_knot_breaks_the_audit() {
        let s = SampleSet::from_exponential(50, 1.0, 13).unwrap();
        let fit = fit_lse(&s, 2, &SolverConfig::default()).unwrap();
        let mut thetas = fit.thetas.clone();
        let mid = thetas.len() / 2;
        thetas[mid] += 1e-2;
        thetas.sort_by(f64::total_cmp);
        let broken = LseFit::from_mixture(
            2,
            thetas,
            fit.weights.clone(),
            fit.support_upper,
            fit.objective,
            fit.iterations,
            fit.fenchel_min,
            fit.n,
        );
        let audit = fenchel_audit(&broken, &s, 10_000).unwrap();
        let scale = 1.0 + EmpiricalIntegrals::new(&s, 2)
            .unwrap()
            .eval(fit.support_upper, 0)
            .unwrap();
        let violated = audit.min_gap < -1e-8 * scale
            || audit.max_knot_gap > 1e-8 * scale
            || audit.max_knot_slope_gap.unwrap() > 1e-6 * scale;
        assert!(violated, "perturbation went undetected: {audit:?}");
    }
}
