//! Shared test oracles, all independent of the library's own algorithms:
//! a dense-grid sup-norm search, the least-concave-majorant Grenander
//! estimator, and a coordinate-descent QP solver on a fixed support grid.

#![allow(dead_code)]

/// Brute-force sup of |f| over `points` uniform points on [lo, hi].
pub fn dense_grid_sup(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let mut sup = 0.0f64;
    for i in 0..=points {
        let x = lo + (hi - lo) * i as f64 / points as f64;
        sup = sup.max(f(x).abs());
    }
    sup
}

/// Slopes of the least concave majorant of the empirical CDF, evaluated at
/// the sample points (left-continuous): the Grenander estimator computed
/// by an upper convex hull, entirely independent of the mixture solver.
pub struct GrenanderLcm {
    /// Hull vertices (x, ecdf).
    hull: Vec<(f64, f64)>,
}

impl GrenanderLcm {
    pub fn fit(observations: &[f64]) -> GrenanderLcm {
        let mut xs = observations.to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        let mut points = Vec::with_capacity(n + 1);
        points.push((0.0, 0.0));
        for (i, &x) in xs.iter().enumerate() {
            // duplicate xs collapse to the highest ecdf value
            let y = (i + 1) as f64 / n as f64;
            if let Some(last) = points.last_mut() {
                if last.0 == x {
                    last.1 = y;
                    continue;
                }
            }
            points.push((x, y));
        }
        // upper hull (least concave majorant): keep turning clockwise
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for p in points {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        GrenanderLcm { hull }
    }

    /// Left-continuous slope of the majorant at `x` (the density value).
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.slope(0);
        }
        let last = self.hull.last().unwrap().0;
        if x > last {
            return 0.0;
        }
        // segment (v_{j-1}, v_j] containing x
        let mut j = self
            .hull
            .partition_point(|&(hx, _)| hx < x);
        j = j.clamp(1, self.hull.len() - 1);
        self.slope(j - 1)
    }

    fn slope(&self, seg: usize) -> f64 {
        let (x0, y0) = self.hull[seg];
        let (x1, y1) = self.hull[seg + 1];
        (y1 - y0) / (x1 - x0)
    }
}

/// Least-squares mixture objective `½ wᵀG w − cᵀw` minimized over w ≥ 0 on
/// a FIXED grid of kernel locations, by cyclic coordinate descent with an
/// incrementally maintained gradient. Independent of the support-reduction
/// path (shares only the closed-form kernel inner products).
pub struct GridQpOracle {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub objective: f64,
}

impl GridQpOracle {
    pub fn solve(k: usize, observations: &[f64], support_end: f64, grid_size: usize) -> Self {
        Self::solve_with(k, observations, support_end, grid_size, 1e-12)
    }

    /// `kkt_rel` trades accuracy for speed. A loose oracle can only report
    /// a HIGHER objective, so one-sided solver-vs-oracle bounds stay valid.
    pub fn solve_with(
        k: usize,
        observations: &[f64],
        support_end: f64,
        grid_size: usize,
        kkt_rel: f64,
    ) -> Self {
        use kmono::lse::{gram, kernel};
        let n = observations.len() as f64;
        let grid: Vec<f64> = (1..=grid_size)
            .map(|i| support_end * i as f64 / grid_size as f64)
            .collect();
        let m = grid.len();
        let g: Vec<Vec<f64>> = grid
            .iter()
            .map(|&a| grid.iter().map(|&b| gram(k, a, b)).collect())
            .collect();
        let c: Vec<f64> = grid
            .iter()
            .map(|&t| observations.iter().map(|&x| kernel(k, t, x)).sum::<f64>() / n)
            .collect();

        let mut w = vec![0.0f64; m];
        let mut grad: Vec<f64> = c.iter().map(|&ci| -ci).collect(); // G w − c
        let c_scale = 1.0 + c.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let kkt_tol = kkt_rel * c_scale;

        let mut stagnant = 0usize;
        for _sweep in 0..200_000 {
            let mut max_step = 0.0f64;
            for i in 0..m {
                let target = w[i] - grad[i] / g[i][i];
                let new_w = target.max(0.0);
                let delta = new_w - w[i];
                if delta != 0.0 {
                    w[i] = new_w;
                    for j in 0..m {
                        grad[j] += delta * g[i][j];
                    }
                    max_step = max_step.max(delta.abs());
                }
            }
            // KKT check on a clean pass (mid-sweep values go stale)
            let mut worst = 0.0f64;
            for i in 0..m {
                let viol = if w[i] > 0.0 {
                    grad[i].abs()
                } else {
                    (-grad[i]).max(0.0)
                };
                worst = worst.max(viol);
            }
            if worst <= kkt_tol {
                break;
            }
            // coordinate descent stalls once rounding dominates
            let w_scale = 1.0 + w.iter().fold(0.0f64, |a, &v| a.max(v));
            if max_step <= 1e-15 * w_scale {
                stagnant += 1;
                if stagnant >= 10 {
                    break;
                }
            } else {
                stagnant = 0;
            }
        }

        let mut objective = 0.0;
        for i in 0..m {
            if w[i] == 0.0 {
                continue;
            }
            objective -= w[i] * c[i];
            for j in 0..m {
                if w[j] != 0.0 {
                    objective += 0.5 * w[i] * w[j] * g[i][j];
                }
            }
        }
        GridQpOracle {
            grid,
            weights: w,
            objective,
        }
    }
}
