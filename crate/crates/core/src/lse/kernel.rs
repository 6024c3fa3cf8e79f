use crate::spline::poly::{factorial, falling_factorial};

/// Scaled kernel `κ_θ(x) = (k/θ)(1 − x/θ)_+^{k−1}` — the extreme rays of
/// the k-monotone cone; each integrates to one. The support is closed at
/// θ (so the k = 1 kernel is left-continuous there, matching the
/// Grenander estimator's convention at jump points).
pub fn kernel(k: usize, theta: f64, x: f64) -> f64 {
    if x > theta || x < 0.0 {
        return 0.0;
    }
    let t = 1.0 - x / theta;
    if k == 1 {
        return 1.0 / theta;
    }
    (k as f64 / theta) * t.powi((k - 1) as i32)
}

/// `q`-th derivative of the kernel in `x` (zero for q >= k, a.e. value at
/// the kink).
pub fn kernel_deriv(k: usize, theta: f64, x: f64, q: usize) -> f64 {
    if q == 0 {
        return kernel(k, theta, x);
    }
    if q >= k || x > theta || x < 0.0 {
        return 0.0;
    }
    let t = 1.0 - x / theta;
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    (k as f64 / theta) * falling_factorial(k - 1, q) * sign / theta.powi(q as i32)
        * t.powi((k - 1 - q) as i32)
}

/// L²(0, ∞) inner product `⟨κ_a, κ_b⟩` in closed form:
/// with s = min(a,b), t = max(a,b),
/// `⟨κ_a, κ_b⟩ = (k²/t) Σ_{j=0}^{k−1} C(k−1,j) (−s/t)^j j!(k−1)!/(k+j)!`.
pub fn gram(k: usize, a: f64, b: f64) -> f64 {
    let (s, t) = if a <= b { (a, b) } else { (b, a) };
    let kf = k as f64;
    let ratio = -s / t;
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut pow = 1.0;
    for j in 0..k {
        let coef = factorial(j) * factorial(k - 1) / factorial(k + j);
        sum += binom * pow * coef;
        binom *= (k - 1 - j) as f64 / (j + 1) as f64;
        pow *= ratio;
    }
    kf * kf / t * sum
}
