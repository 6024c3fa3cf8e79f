use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lse::empirical::EmpiricalIntegrals;
use crate::lse::fit::LseFit;
use crate::lse::kernel::gram;
use crate::lse::SampleSet;
use crate::spline::golden_max;
use crate::spline::poly::factorial;

/// Uniform overlay grid merged into the candidate scan.
const OVERLAY_GRID: usize = 512;
/// Candidate local minima refined per iteration.
const REFINE_TOP: usize = 8;
/// Upper bound on support points added per iteration.
const MULTI_ADD: usize = 6;
/// Golden-section refinement tolerance (relative on θ).
const REFINE_TOL: f64 = 3e-12;

/// Solver knobs: the Fenchel violation tolerance is
/// `tolerance · (1 + Y_n(T))`, and the support end is
/// `T = (1 + support_pad) · max(X_i)` with pad defaulting to `1/k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// `None` means the k-dependent default `1/k`.
    pub support_pad: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-8,
            max_iterations: 500,
            support_pad: None,
        }
    }
}

impl SolverConfig {
    pub fn effective_pad(&self, k: usize) -> f64 {
        self.support_pad.unwrap_or(1.0 / k as f64)
    }
}

impl fmt::Display for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tolerance={},max_iterations={},support_pad={}",
            self.tolerance,
            self.max_iterations,
            match self.support_pad {
                Some(p) => p.to_string(),
                None => "auto".to_string(),
            }
        )
    }
}

impl FromStr for SolverConfig {
    type Err = String;

    /// Parses `key=value` pairs separated by commas or whitespace.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut cfg = SolverConfig::default();
        for pair in s.split([',', ' ', '\n', '\t']).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got '{pair}'"))?;
            match key.trim() {
                "tolerance" => {
                    cfg.tolerance = value.parse().map_err(|e| format!("tolerance: {e}"))?
                }
                "max_iterations" => {
                    cfg.max_iterations =
                        value.parse().map_err(|e| format!("max_iterations: {e}"))?
                }
                "support_pad" => {
                    cfg.support_pad = if value == "auto" {
                        None
                    } else {
                        Some(value.parse().map_err(|e| format!("support_pad: {e}"))?)
                    }
                }
                other => return Err(format!("unknown config key '{other}'")),
            }
        }
        Ok(cfg)
    }
}

/// Least-squares estimator of a k-monotone density by support reduction
/// over the kernel mixture cone.
///
/// Iterates: locate the kernel location θ minimizing the directional
/// derivative of the criterion, add it, re-solve the nonnegative
/// least-squares subproblem over the active kernels, drop zero weights.
/// Converged when the Fenchel gap `H̃_n − Y_n` is above `−tolerance·scale`
/// everywhere on `(0, T]`.
pub fn fit_lse(samples: &SampleSet, k: usize, config: &SolverConfig) -> Result<LseFit> {
    if k < 1 {
        return Err(Error::argument("k must be >= 1"));
    }
    if config.tolerance <= 0.0 || config.max_iterations == 0 {
        return Err(Error::argument(
            "tolerance must be positive and max_iterations >= 1",
        ));
    }
    let emp = EmpiricalIntegrals::new(samples, k)?;
    let support_end = (1.0 + config.effective_pad(k)) * samples.max();
    let fen_tol = config.tolerance * (1.0 + emp.eval(support_end, 0)?);

    let mut state = SolverState {
        emp: &emp,
        k,
        support_end,
        thetas: Vec::new(),
        weights: Vec::new(),
    };

    // polish past the hard tolerance while iterations keep paying off:
    // knot-slope equalities (tangency) need a much deeper gap minimum than
    // the value equalities alone
    let soft_tol = 1e-5 * fen_tol;
    let mut best_violation = f64::INFINITY;
    let mut stall = 0usize;

    let mut last_scan = state.scan();
    for iter in 1..=config.max_iterations {
        if last_scan.min_gap >= -soft_tol {
            return Ok(state.into_fit(samples, iter - 1, last_scan.min_gap));
        }
        if last_scan.min_gap >= -fen_tol {
            let violation = -last_scan.min_gap;
            if violation > 0.5 * best_violation {
                stall += 1;
            } else {
                stall = 0;
            }
            best_violation = best_violation.min(violation);
            if stall >= 4 {
                return Ok(state.into_fit(samples, iter - 1, last_scan.min_gap));
            }
        }
        let mut added = false;
        for &theta in &last_scan.add_candidates {
            added |= state.add_candidate(theta);
        }
        if !added || !state.solve_nnqp() {
            // stalled: accept only if the hard tolerance is met
            if last_scan.min_gap >= -fen_tol {
                return Ok(state.into_fit(samples, iter, last_scan.min_gap));
            }
            return Err(Error::NonConvergence {
                iterations: iter,
                worst_violation: -last_scan.min_gap,
                best: Box::new(state.into_fit(samples, iter, last_scan.min_gap)),
            });
        }
        // location polish keeps the support from accumulating near-duplicate
        // knots, which would satisfy the value equalities but not tangency;
        // polish hard only once the hard tolerance is in reach
        let polish_passes = if last_scan.min_gap >= -1e3 * fen_tol { 24 } else { 2 };
        for _ in 0..polish_passes {
            if !state.refine_thetas() {
                break;
            }
        }
        last_scan = state.scan();
    }
    let iterations = config.max_iterations;
    Err(Error::NonConvergence {
        iterations,
        worst_violation: -last_scan.min_gap,
        best: Box::new(state.into_fit(samples, iterations, last_scan.min_gap)),
    })
}

struct ScanResult {
    /// Smallest Fenchel gap seen (scan points plus refined minima).
    min_gap: f64,
    /// Candidate θ's at local minima of the directional derivative, most
    /// negative first (the head is the argmin, tie-broken to smaller θ).
    add_candidates: Vec<f64>,
}

/// Prefix sums over the sorted support making `Σ w_i ⟨κ_{θ_i}, κ_x⟩`
/// an O(k) evaluation: split the sum at x and expand both gram branches
/// in powers of θ/x and x/θ.
struct MixturePrefix {
    thetas: Vec<f64>,
    /// pw[j][i] = Σ_{l<i} w_l θ_l^j
    pw: Vec<Vec<f64>>,
    /// nw[j][i] = Σ_{l<i} w_l θ_l^{−1−j}
    nw: Vec<Vec<f64>>,
    /// k² · C(k−1,j) j!(k−1)!/(k+j)! · (−1)^j
    coef: Vec<f64>,
}

impl MixturePrefix {
    fn new(k: usize, thetas: &[f64], weights: &[f64]) -> MixturePrefix {
        let m = thetas.len();
        let mut pw = vec![vec![0.0; m + 1]; k];
        let mut nw = vec![vec![0.0; m + 1]; k];
        for j in 0..k {
            for (l, (&t, &w)) in thetas.iter().zip(weights).enumerate() {
                pw[j][l + 1] = pw[j][l] + w * t.powi(j as i32);
                nw[j][l + 1] = nw[j][l] + w * t.powi(-1 - j as i32);
            }
        }
        let mut coef = Vec::with_capacity(k);
        let mut binom = 1.0;
        for j in 0..k {
            let c = factorial(j) * factorial(k - 1) / factorial(k + j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coef.push((k * k) as f64 * binom * c * sign);
            binom *= (k - 1 - j) as f64 / (j + 1) as f64;
        }
        MixturePrefix {
            thetas: thetas.to_vec(),
            pw,
            nw,
            coef,
        }
    }

    /// `Σ_i w_i ⟨κ_{θ_i}, κ_x⟩`; `ptr` must track the number of θ ≤ x and
    /// is advanced monotonically (callers evaluate in ascending x order).
    fn inner(&self, x: f64, ptr: &mut usize) -> f64 {
        while *ptr < self.thetas.len() && self.thetas[*ptr] <= x {
            *ptr += 1;
        }
        let m = self.thetas.len();
        let k = self.coef.len();
        let mut below = 0.0;
        let mut above = 0.0;
        let mut x_pow_neg = 1.0 / x;
        let mut x_pow = 1.0;
        for j in 0..k {
            below += self.coef[j] * x_pow_neg * self.pw[j][*ptr];
            above += self.coef[j] * x_pow * (self.nw[j][m] - self.nw[j][*ptr]);
            x_pow_neg /= x;
            x_pow *= x;
        }
        below + above
    }
}

struct SolverState<'a> {
    emp: &'a EmpiricalIntegrals,
    k: usize,
    support_end: f64,
    thetas: Vec<f64>,
    weights: Vec<f64>,
}

impl SolverState<'_> {
    /// Fenchel gap `H̃_n(θ) − Y_n(θ)`.
    fn gap(&self, theta: f64) -> f64 {
        let inner: f64 = self
            .thetas
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * gram(self.k, t, theta))
            .sum();
        let kf = factorial(self.k);
        theta.powi(self.k as i32) / kf * inner - self.emp.eval(theta, 0).unwrap()
    }

    /// Directional derivative of the criterion along κ_θ:
    /// `⟨g, κ_θ⟩ − ∫ κ_θ dG_n = (k!/θ^k) · gap(θ)`.
    fn dir_deriv(&self, theta: f64) -> f64 {
        let inner: f64 = self
            .thetas
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * gram(self.k, t, theta))
            .sum();
        let kf = factorial(self.k);
        inner - kf * self.emp.eval(theta, 0).unwrap() / theta.powi(self.k as i32)
    }

    /// Scans candidate θ over sample points, current knots, and a uniform
    /// overlay; refines grid-local minima of the directional derivative and
    /// returns them most-negative-first together with the deepest gap seen.
    fn scan(&self) -> ScanResult {
        let t_end = self.support_end;
        let kf = factorial(self.k);
        let mut points: Vec<f64> = Vec::with_capacity(self.emp.n() + OVERLAY_GRID + 8);
        points.extend(self.emp.sorted().iter().copied().filter(|&x| x < t_end));
        points.extend(self.thetas.iter().copied().filter(|&x| x < t_end));
        for i in 1..=OVERLAY_GRID {
            points.push(t_end * i as f64 / OVERLAY_GRID as f64);
        }
        points.push(t_end);
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * t_end);

        // evaluate D and gap at points and interval midpoints, in ascending
        // order so the mixture prefix pointer only moves forward
        let prefix = MixturePrefix::new(self.k, &self.thetas, &self.weights);
        let mut ptr = 0usize;
        let mut evals: Vec<(f64, f64, f64)> = Vec::with_capacity(2 * points.len() + 1);
        let push_eval = |x: f64, evals: &mut Vec<(f64, f64, f64)>, ptr: &mut usize| {
            let inner = prefix.inner(x, ptr);
            let y = self.emp.eval(x, 0).unwrap();
            let xk = x.powi(self.k as i32);
            let g = xk / kf * inner - y;
            let d = inner - kf * y / xk;
            evals.push((x, d, g));
        };
        let first = points[0];
        if first > 0.0 {
            push_eval(0.5 * first, &mut evals, &mut ptr);
        }
        for i in 0..points.len() {
            push_eval(points[i], &mut evals, &mut ptr);
            if i + 1 < points.len() {
                let mid = 0.5 * (points[i] + points[i + 1]);
                // keep ascending order: mid of (p_i, p_{i+1}) > p_i
                push_eval(mid, &mut evals, &mut ptr);
            }
        }

        let mut min_gap = f64::INFINITY;
        for &(_, _, g) in &evals {
            min_gap = min_gap.min(g);
        }

        // local minima of D over the scan sequence
        let mut minima: Vec<usize> = (0..evals.len())
            .filter(|&i| {
                let v = evals[i].1;
                (i == 0 || evals[i - 1].1 >= v) && (i + 1 == evals.len() || evals[i + 1].1 >= v)
            })
            .collect();
        minima.sort_by(|&a, &b| evals[a].1.total_cmp(&evals[b].1));
        minima.truncate(REFINE_TOP);

        let mut candidates: Vec<(f64, f64)> = Vec::new();
        for &i in &minima {
            let lo = if i == 0 { evals[0].0 } else { evals[i - 1].0 };
            let hi = if i + 1 == evals.len() {
                evals[i].0
            } else {
                evals[i + 1].0
            };
            let (x, neg_d) = golden_max(&|x| -self.dir_deriv(x), lo.max(1e-300), hi, REFINE_TOL);
            let d = -neg_d;
            min_gap = min_gap.min(self.gap(x));
            if d <= evals[i].1 {
                candidates.push((x, d));
            } else {
                candidates.push((evals[i].0, evals[i].1));
            }
        }
        if candidates.is_empty() {
            candidates.push((t_end, self.dir_deriv(t_end)));
        }
        candidates.sort_by(|a, b| a.1.total_cmp(&b.1));

        // tie-break the argmin towards the smallest θ
        let d_min = candidates[0].1;
        let tie = 1e-9 * d_min.abs() + 1e-300;
        let argmin = candidates
            .iter()
            .filter(|c| c.1 <= d_min + tie)
            .map(|c| c.0)
            .fold(f64::INFINITY, f64::min);

        // batch-add well-separated negative local minima, argmin first
        let mut add_candidates = vec![argmin];
        for &(x, d) in &candidates {
            if add_candidates.len() >= MULTI_ADD {
                break;
            }
            if d < 0.0
                && add_candidates
                    .iter()
                    .all(|&y| (x - y).abs() > 1e-6 * t_end)
            {
                add_candidates.push(x);
            }
        }

        ScanResult {
            min_gap,
            add_candidates,
        }
    }

    /// Adds a kernel location; refuses duplicates.
    fn add_candidate(&mut self, theta: f64) -> bool {
        if !theta.is_finite() || theta <= 0.0 || theta > self.support_end {
            return false;
        }
        let dup = self
            .thetas
            .iter()
            .any(|&t| (t - theta).abs() <= 1e-12 * self.support_end);
        if dup {
            return false;
        }
        self.thetas.push(theta);
        self.weights.push(0.0);
        // keep support sorted for deterministic output
        let mut pairs: Vec<(f64, f64)> = self
            .thetas
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        self.thetas = pairs.iter().map(|p| p.0).collect();
        self.weights = pairs.iter().map(|p| p.1).collect();
        true
    }

    fn kernel_moment(&self, theta: f64) -> f64 {
        factorial(self.k) * self.emp.eval(theta, 0).unwrap() / theta.powi(self.k as i32)
    }

    /// Nonnegative least squares over the current support
    /// (Lawson–Hanson on the normal equations). Returns false when the
    /// subproblem could not be solved.
    fn solve_nnqp(&mut self) -> bool {
        let m = self.thetas.len();
        let g = DMatrix::<f64>::from_fn(m, m, |i, j| gram(self.k, self.thetas[i], self.thetas[j]));
        let c = DVector::<f64>::from_fn(m, |i, _| self.kernel_moment(self.thetas[i]));
        let c_scale = 1.0 + c.amax();
        let kkt_tol = 1e-12 * c_scale;

        let mut w = DVector::<f64>::from_column_slice(&self.weights);
        let mut passive: Vec<bool> = self.weights.iter().map(|&v| v > 0.0).collect();

        // make the warm start consistent
        if passive.iter().any(|&p| p) {
            if let Some(z) = solve_spd_subset(&g, &c, &passive) {
                let mut feasible = true;
                for (i, &p) in passive.iter().enumerate() {
                    if p && z[i] <= 0.0 {
                        feasible = false;
                    }
                }
                if feasible {
                    for i in 0..m {
                        w[i] = if passive[i] { z[i] } else { 0.0 };
                    }
                } else {
                    for p in passive.iter_mut() {
                        *p = false;
                    }
                    w.fill(0.0);
                }
            } else {
                for p in passive.iter_mut() {
                    *p = false;
                }
                w.fill(0.0);
            }
        }

        let max_outer = 4 * m + 16;
        for _ in 0..max_outer {
            let r = &c - &g * &w;
            let mut best = kkt_tol;
            let mut best_i = None;
            for i in 0..m {
                if !passive[i] && r[i] > best {
                    best = r[i];
                    best_i = Some(i);
                }
            }
            let Some(j) = best_i else {
                // KKT satisfied
                self.weights = w.iter().copied().collect();
                self.prune_zeros();
                return true;
            };
            passive[j] = true;

            let max_inner = 2 * m + 8;
            for _inner in 0..max_inner {
                let Some(z) = solve_spd_subset(&g, &c, &passive) else {
                    passive[j] = false;
                    self.weights = w.iter().copied().collect();
                    self.prune_zeros();
                    return false;
                };
                let mut alpha = 1.0f64;
                let mut blocker = None;
                for i in 0..m {
                    if passive[i] && z[i] <= 0.0 {
                        let step = w[i] / (w[i] - z[i]);
                        if step < alpha {
                            alpha = step;
                            blocker = Some(i);
                        }
                    }
                }
                match blocker {
                    None => {
                        for i in 0..m {
                            w[i] = if passive[i] { z[i] } else { 0.0 };
                        }
                        break;
                    }
                    Some(_) => {
                        for i in 0..m {
                            if passive[i] {
                                w[i] += alpha * (z[i] - w[i]);
                                if w[i] <= 1e-300 {
                                    w[i] = 0.0;
                                    passive[i] = false;
                                }
                            }
                        }
                    }
                }
            }
        }
        self.weights = w.iter().copied().collect();
        self.prune_zeros();
        true
    }

    /// Criterion restricted to moving support point `i` to `t`, weights
    /// fixed (constant terms dropped).
    fn q_moving(&self, i: usize, t: f64) -> f64 {
        let wi = self.weights[i];
        let mut v = 0.5 * wi * wi * gram(self.k, t, t) - wi * self.kernel_moment(t);
        for (j, (&theta, &w)) in self.thetas.iter().zip(&self.weights).enumerate() {
            if j != i {
                v += wi * w * gram(self.k, theta, t);
            }
        }
        v
    }

    /// One pass of coordinate-wise location refinement: move each θ to the
    /// best point nearby (golden section in the valley around the current
    /// position, plus the sample points of the full bracket, where the
    /// criterion has kinks), then re-solve the weights. Returns true when
    /// any location moved.
    fn refine_thetas(&mut self) -> bool {
        let m = self.thetas.len();
        if m == 0 {
            return false;
        }
        let sep = 1e-12 * self.support_end;
        let mut moved = false;
        for i in 0..m {
            if self.weights[i] <= 0.0 {
                continue;
            }
            let cur = self.thetas[i];
            let lo = if i == 0 { sep } else { self.thetas[i - 1] + sep };
            let hi = if i + 1 == m {
                self.support_end
            } else {
                self.thetas[i + 1] - sep
            };
            if hi <= lo {
                continue;
            }
            // stay in the valley of the current position: half-way to the
            // neighbors (a full-bracket search can hop valleys and stall)
            let loc_lo = (0.5 * (lo + cur)).max(lo);
            let loc_hi = (0.5 * (cur + hi)).min(hi);
            let (mut best_t, neg_q) =
                golden_max(&|t| -self.q_moving(i, t), loc_lo, loc_hi, REFINE_TOL);
            let mut best_q = -neg_q;
            // kink candidates: sample points inside the full bracket, and
            // the support end itself for the last location (so a clamped
            // knot lands exactly on the boundary)
            let sorted = self.emp.sorted();
            let a = sorted.partition_point(|&x| x <= lo);
            let b = sorted.partition_point(|&x| x < hi);
            let boundary = (i + 1 == m).then_some(self.support_end);
            for &x in sorted[a..b].iter().chain(boundary.iter()) {
                let q = self.q_moving(i, x);
                if q < best_q || (q == best_q && x < best_t) {
                    best_q = q;
                    best_t = x;
                }
            }
            let current_q = self.q_moving(i, cur);
            if best_q < current_q && (best_t - cur).abs() > sep {
                self.thetas[i] = best_t;
                moved = true;
            }
        }
        if moved {
            self.solve_nnqp();
        }
        moved
    }

    fn prune_zeros(&mut self) {
        let mut t = Vec::with_capacity(self.thetas.len());
        let mut w = Vec::with_capacity(self.weights.len());
        for (&theta, &weight) in self.thetas.iter().zip(&self.weights) {
            if weight > 0.0 {
                t.push(theta);
                w.push(weight);
            }
        }
        self.thetas = t;
        self.weights = w;
    }

    fn objective(&self) -> f64 {
        let m = self.thetas.len();
        let mut q = 0.0;
        for i in 0..m {
            for j in 0..m {
                q += 0.5
                    * self.weights[i]
                    * self.weights[j]
                    * gram(self.k, self.thetas[i], self.thetas[j]);
            }
            q -= self.weights[i] * self.kernel_moment(self.thetas[i]);
        }
        q
    }

    fn into_fit(self, samples: &SampleSet, iterations: usize, fenchel_min: f64) -> LseFit {
        let objective = self.objective();
        LseFit::from_mixture(
            self.k,
            self.thetas,
            self.weights,
            self.support_end,
            objective,
            iterations,
            fenchel_min,
            samples.len(),
        )
    }
}

/// Solves `G[p,p] z = c[p]` on the passive subset by Cholesky, with a tiny
/// escalating ridge for nearly dependent kernels. Returns the full-size
/// solution vector (zeros on the active set).
fn solve_spd_subset(g: &DMatrix<f64>, c: &DVector<f64>, passive: &[bool]) -> Option<DVector<f64>> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    if idx.is_empty() {
        return Some(DVector::zeros(passive.len()));
    }
    let p = idx.len();
    let gp = DMatrix::<f64>::from_fn(p, p, |r, s| g[(idx[r], idx[s])]);
    let cp = DVector::<f64>::from_fn(p, |r, _| c[idx[r]]);
    let mean_diag = gp.diagonal().mean();
    for ridge_scale in [0.0, 1e-15, 1e-12, 1e-9] {
        let mut m = gp.clone();
        if ridge_scale > 0.0 {
            for i in 0..p {
                m[(i, i)] += ridge_scale * mean_diag;
            }
        }
        if let Some(chol) = m.cholesky() {
            let zp = chol.solve(&cp);
            let mut z = DVector::zeros(passive.len());
            for (r, &i) in idx.iter().enumerate() {
                z[i] = zp[r];
            }
            return Some(z);
        }
    }
    None
}
