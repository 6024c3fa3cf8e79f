use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::density::TruthDensity;
use crate::gap::rng::{trial_rng, trial_seed};
use crate::gap::trial::{run_trial, GapTrialResult};

/// Bootstrap resamples for the slope confidence interval.
const BOOTSTRAP_RESAMPLES: usize = 400;

/// Log-log rate estimate for the knot gap near x₀.
#[derive(Debug, Clone, Serialize)]
pub struct RateEstimate {
    pub k: usize,
    pub n_values: Vec<usize>,
    pub median_gaps: Vec<f64>,
    /// Least-squares slope of log(median gap) against log(n).
    pub slope: f64,
    /// 95% bootstrap percentile interval for the slope.
    pub slope_ci: (f64, f64),
    pub trials_per_n: usize,
    /// Set when more than half the trials at some n were degenerate.
    pub degenerate_warning: bool,
}

/// Runs `trials_per_n` seeded trials at every n (in parallel), aggregates
/// median gaps, and fits the log-log slope with a bootstrap CI.
/// Returns the estimate together with the full per-trial table.
pub fn estimate_rate(
    k: usize,
    n_values: &[usize],
    trials_per_n: usize,
    x0: f64,
    density: &dyn TruthDensity,
    seed: u64,
) -> Result<(RateEstimate, Vec<GapTrialResult>)> {
    if n_values.len() < 3 {
        return Err(Error::argument("need at least 3 sample sizes"));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::argument("n_values must be strictly increasing"));
    }
    if trials_per_n < 20 {
        return Err(Error::argument("need at least 20 trials per n"));
    }

    let jobs: Vec<(usize, usize)> = (0..n_values.len())
        .flat_map(|ni| (0..trials_per_n).map(move |t| (ni, t)))
        .collect();
    let trials: Vec<GapTrialResult> = jobs
        .par_iter()
        .map(|&(ni, t)| {
            let n = n_values[ni];
            let s = trial_seed(seed, (ni * trials_per_n + t) as u64);
            run_trial(n, k, x0, density, s)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_n: Vec<Vec<f64>> = vec![Vec::new(); n_values.len()];
    let mut degenerate_warning = false;
    for (ni, &n) in n_values.iter().enumerate() {
        let rows: Vec<&GapTrialResult> = trials.iter().filter(|r| r.n == n).collect();
        let good: Vec<f64> = rows
            .iter()
            .filter(|r| !r.failed && !r.degenerate && r.gap.is_finite() && r.gap > 0.0)
            .map(|r| r.gap)
            .collect();
        if good.len() * 2 < rows.len() {
            degenerate_warning = true;
        }
        if good.is_empty() {
            return Err(Error::argument(format!(
                "all trials at n = {n} were degenerate or failed"
            )));
        }
        per_n[ni] = good;
    }

    let median_gaps: Vec<f64> = per_n.iter().map(|g| median(g)).collect();
    let slope = loglog_slope(n_values, &median_gaps);

    // bootstrap: resample gaps within each n, recompute medians and slope
    let mut rng = trial_rng(seed ^ 0xB007_57A9, u64::MAX);
    let mut slopes = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let meds: Vec<f64> = per_n
            .iter()
            .map(|gaps| {
                let m = gaps.len();
                let resample: Vec<f64> = (0..m)
                    .map(|_| gaps[(rng.next_u64() % m as u64) as usize])
                    .collect();
                median(&resample)
            })
            .collect();
        slopes.push(loglog_slope(n_values, &meds));
    }
    slopes.sort_by(f64::total_cmp);
    let lo = slopes[((BOOTSTRAP_RESAMPLES as f64) * 0.025).floor() as usize];
    let hi = slopes[(((BOOTSTRAP_RESAMPLES as f64) * 0.975).ceil() as usize).min(BOOTSTRAP_RESAMPLES - 1)];

    Ok((
        RateEstimate {
            k,
            n_values: n_values.to_vec(),
            median_gaps,
            slope,
            slope_ci: (lo, hi),
            trials_per_n,
            degenerate_warning,
        },
        trials,
    ))
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

fn loglog_slope(n_values: &[usize], gaps: &[f64]) -> f64 {
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|&g| g.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
