//! Adaptive Simpson quadrature for the smooth integrands in the audits.

const MAX_DEPTH: usize = 48;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1)
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 0)
}

/// Integral over `[a, b]` split at the interior points of `cuts`
/// (integrand kinks), each panel integrated adaptively.
pub fn adaptive_simpson_split(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cuts: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let panel_tol = tol / pts.len().max(2) as f64;
    pts.windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], panel_tol))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponential() {
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 3.0, 1e-12);
        let expect = 1.0 - (-3.0f64).exp();
        assert!((v - expect).abs() < 1e-11);
    }

    #[test]
    fn split_handles_kinks() {
        let f = |x: f64| (x - 0.5).abs();
        let v = adaptive_simpson_split(&f, 0.0, 1.0, &[0.5], 1e-12);
        assert!((v - 0.25).abs() < 1e-12);
    }
}
