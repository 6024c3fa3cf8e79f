use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::density::TruthDensity;
use crate::gap::rng::trial_rng;
use crate::lse::{extract_knots, fit_lse, LseFit, SampleSet, SolverConfig};

/// Relative jump threshold used when reading knots off a fit.
const KNOT_THRESHOLD: f64 = 1e-8;

/// One Monte Carlo trial: gaps of the `max(2, 2k−2)` consecutive fitted
/// knots around x₀ and the non-coalescence statistic
/// `max_j 1/(n^{1/(2k+1)} (τ_j − τ_{j−1}))`.
#[derive(Debug, Clone, Serialize)]
pub struct GapTrialResult {
    pub n: usize,
    pub k: usize,
    pub x0: f64,
    pub seed: u64,
    /// The selected consecutive knots (window around x₀), when available.
    pub knots_near_x0: Vec<f64>,
    /// τ_last − τ_first of the window; NaN when degenerate or failed.
    pub gap: f64,
    pub min_adjacent_gap: f64,
    pub noncoalescence_stat: f64,
    /// Fewer knots than the window size were available.
    pub degenerate: bool,
    /// The solver did not converge; no statistics recorded.
    pub failed: bool,
    pub total_knots: usize,
}

/// Number of knots in the selection window.
pub fn window_size(k: usize) -> usize {
    (2 * k).saturating_sub(2).max(2)
}

/// Picks `m` consecutive knots around `x0`: the window whose span contains
/// x₀ (balanced around the bracketing pair), or the nearest window when x₀
/// is outside the knot range.
pub fn select_window(knots: &[f64], x0: f64, m: usize) -> Option<&[f64]> {
    if knots.len() < m {
        return None;
    }
    let i0 = knots.partition_point(|&t| t <= x0); // knots[i0-1] <= x0 < knots[i0]
    let start = (i0 as i64 - (m as i64 + 1) / 2).clamp(0, (knots.len() - m) as i64) as usize;
    Some(&knots[start..start + m])
}

/// Runs one seeded trial: sample, fit, extract knots, record the window
/// statistics. Solver failure marks the trial failed instead of erroring.
pub fn run_trial(
    n: usize,
    k: usize,
    x0: f64,
    density: &dyn TruthDensity,
    seed: u64,
) -> Result<GapTrialResult> {
    if n == 0 {
        return Err(Error::argument("need n >= 1"));
    }
    if !(x0 > 0.0) {
        return Err(Error::argument(format!("need x0 > 0, got {x0}")));
    }
    if density.signed_kth_deriv(x0, k) <= 0.0 {
        return Err(Error::argument(format!(
            "density does not satisfy (-1)^k g^(k)(x0) > 0 at x0 = {x0}"
        )));
    }
    let mut rng = trial_rng(seed, 0);
    let samples = density.sample(n, &mut rng)?;

    let fit = match fit_lse(&samples, k, &SolverConfig::default()) {
        Ok(f) => f,
        Err(Error::NonConvergence { .. }) => {
            return Ok(GapTrialResult {
                n,
                k,
                x0,
                seed,
                knots_near_x0: Vec::new(),
                gap: f64::NAN,
                min_adjacent_gap: f64::NAN,
                noncoalescence_stat: f64::NAN,
                degenerate: true,
                failed: true,
                total_knots: 0,
            })
        }
        Err(e) => return Err(e),
    };

    let knots = extract_knots(&fit, KNOT_THRESHOLD);
    let m = window_size(k);
    Ok(match select_window(&knots, x0, m) {
        Some(window) => {
            let gap = window[m - 1] - window[0];
            let min_adj = window
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            let rate_scale = (n as f64).powf(1.0 / (2 * k + 1) as f64);
            GapTrialResult {
                n,
                k,
                x0,
                seed,
                knots_near_x0: window.to_vec(),
                gap,
                min_adjacent_gap: min_adj,
                noncoalescence_stat: 1.0 / (rate_scale * min_adj),
                degenerate: false,
                failed: false,
                total_knots: knots.len(),
            }
        }
        None => GapTrialResult {
            n,
            k,
            x0,
            seed,
            knots_near_x0: knots.clone(),
            gap: f64::NAN,
            min_adjacent_gap: f64::NAN,
            noncoalescence_stat: f64::NAN,
            degenerate: true,
            failed: false,
            total_knots: knots.len(),
        },
    })
}

/// Fit used by a trial (re-run deterministically), for audits that need
/// the fit and samples themselves.
pub fn refit_trial(
    n: usize,
    k: usize,
    density: &dyn TruthDensity,
    seed: u64,
) -> Result<(LseFit, SampleSet)> {
    let mut rng = trial_rng(seed, 0);
    let samples = density.sample(n, &mut rng)?;
    let fit = fit_lse(&samples, k, &SolverConfig::default())?;
    Ok((fit, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::density::Exponential;

    #[test]
    fn window_selection_brackets_the_point() {
        let knots = [0.5, 0.9, 1.1, 1.6, 2.2, 3.0];
        let w = select_window(&knots, 1.3, 4).unwrap();
        assert_eq!(w, &[0.9, 1.1, 1.6, 2.2]);
        // outside the range: nearest window
        let w = select_window(&knots, 10.0, 4).unwrap();
        assert_eq!(w, &[1.1, 1.6, 2.2, 3.0]);
        let w = select_window(&knots, 0.1, 2).unwrap();
        assert_eq!(w, &[0.5, 0.9]);
        assert!(select_window(&knots[..3], 1.0, 4).is_none());
    }

    #[test]
    fn k1_trial_records_bracketing_jump_distance() {
        let d = Exponential::new(1.0).unwrap();
        let r = run_trial(1000, 1, 1.0, &d, 77).unwrap();
        assert!(!r.failed && !r.degenerate);
        assert_eq!(r.knots_near_x0.len(), 2);
        assert!(r.gap > 0.0);
        assert!((r.gap - (r.knots_near_x0[1] - r.knots_near_x0[0])).abs() < 1e-15);
        assert!(r.noncoalescence_stat.is_finite() && r.noncoalescence_stat > 0.0);
    }

    #[test]
    fn trials_are_reproducible() {
        let d = Exponential::new(1.0).unwrap();
        let a = run_trial(200, 2, 1.0, &d, 5).unwrap();
        let b = run_trial(200, 2, 1.0, &d, 5).unwrap();
        assert_eq!(a.knots_near_x0, b.knots_near_x0);
        assert_eq!(a.gap, b.gap);
        assert_eq!(a.noncoalescence_stat, b.noncoalescence_stat);
    }

    #[test]
    fn k3_stat_is_finite_and_positive() {
        let d = Exponential::new(1.0).unwrap();
        let r = run_trial(5000, 3, 1.0, &d, 1).unwrap();
        assert!(!r.failed);
        if !r.degenerate {
            assert!(r.noncoalescence_stat.is_finite() && r.noncoalescence_stat > 0.0);
        }
    }
}
