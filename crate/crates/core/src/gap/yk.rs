use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::density::uniform01;
use crate::gap::rng::trial_rng;
use crate::spline::poly::factorial;

/// Simulated path of the drift process
///
/// `Y_k(t) = ∫ (t−s)^{k−1}/(k−1)! dW(s) + (−1)^k k! t^{2k}/(2k)!`
///
/// on a uniform grid over `[−T, T]`, with the integral running over
/// `(0, t]` for `t ≥ 0` and `[t, 0)` for `t < 0` (two-sided Brownian
/// motion).
#[derive(Debug, Clone, Serialize)]
pub struct YkPath {
    pub k: usize,
    pub grid: Vec<f64>,
    /// Total path: stochastic part plus drift.
    pub values: Vec<f64>,
    /// Stochastic part alone (values − drift).
    pub noise: Vec<f64>,
    pub seed: u64,
}

impl YkPath {
    /// Index of grid point `t = 0`.
    pub fn origin_index(&self) -> usize {
        self.grid.len() / 2
    }

    /// Path value at the grid point closest to `t`.
    pub fn value_near(&self, t: f64) -> f64 {
        let step = self.grid[1] - self.grid[0];
        let i = ((t - self.grid[0]) / step).round() as usize;
        self.values[i.min(self.values.len() - 1)]
    }

    pub fn noise_near(&self, t: f64) -> f64 {
        let step = self.grid[1] - self.grid[0];
        let i = ((t - self.grid[0]) / step).round() as usize;
        self.noise[i.min(self.noise.len() - 1)]
    }
}

/// Drift component `(−1)^k k! t^{2k}/(2k)!`.
pub fn yk_drift(k: usize, t: f64) -> f64 {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * factorial(k) / factorial(2 * k) * t.powi(2 * k as i32)
}

/// Simulates `Y_k` by Gaussian increments of a two-sided Brownian motion
/// and midpoint convolution against the kernel `(t−s)^{k−1}/(k−1)!`.
pub fn simulate_yk(k: usize, t_max: f64, step: f64, seed: u64) -> Result<YkPath> {
    if k < 1 {
        return Err(Error::argument("k must be >= 1"));
    }
    if !(t_max > 0.0 && step > 0.0 && step <= t_max) {
        return Err(Error::argument(format!(
            "need 0 < step <= T, got step={step}, T={t_max}"
        )));
    }
    let n_side = (t_max / step).ceil() as usize;
    let h = t_max / n_side as f64;
    let sd = h.sqrt();
    let mut rng = trial_rng(seed, 0);

    // positive-side then negative-side increments, one stream
    let mut gauss = || sd * normal01(&mut rng);
    let pos_inc: Vec<f64> = (0..n_side).map(|_| gauss()).collect();
    let neg_inc: Vec<f64> = (0..n_side).map(|_| gauss()).collect();

    let kernel = |v: f64| v.powi(k as i32 - 1) / factorial(k - 1);

    let total = 2 * n_side + 1;
    let mut grid = Vec::with_capacity(total);
    let mut noise = vec![0.0; total];
    for i in 0..total {
        grid.push((i as f64 - n_side as f64) * h);
    }
    // t >= 0: sum over increments with midpoints in (0, t)
    for m in 1..=n_side {
        let t = m as f64 * h;
        let mut acc = 0.0;
        for (j, dw) in pos_inc.iter().take(m).enumerate() {
            let s_mid = (j as f64 + 0.5) * h;
            acc += kernel(t - s_mid) * dw;
        }
        noise[n_side + m] = acc;
    }
    // t < 0: ∫_t^0 with midpoints in (t, 0); neg_inc[j] spans [-(j+1)h, -jh]
    for m in 1..=n_side {
        let t = -(m as f64) * h;
        let mut acc = 0.0;
        for (j, dw) in neg_inc.iter().take(m).enumerate() {
            let s_mid = -(j as f64 + 0.5) * h;
            acc += kernel(t - s_mid) * dw;
        }
        noise[n_side - m] = acc;
    }

    let values = grid
        .iter()
        .zip(&noise)
        .map(|(&t, &w)| w + yk_drift(k, t))
        .collect();
    Ok(YkPath {
        k,
        grid,
        values,
        noise,
        seed,
    })
}

/// Standard normal via Box–Muller on the raw stream.
fn normal01(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    let mut u1 = uniform01(rng);
    while u1 == 0.0 {
        u1 = uniform01(rng);
    }
    let u2 = uniform01(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
