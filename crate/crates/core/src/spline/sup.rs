/// Golden-section maximization of `f` on `[a, b]` to relative tolerance
/// `rel_tol` on the abscissa. Assumes `f` is unimodal on the bracket;
/// callers bracket candidate maxima with a coarse grid first.
pub fn golden_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let scale = 1.0_f64.max(a.abs()).max(b.abs());
    while hi - lo > rel_tol * scale {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    if f1 >= f2 && f1 >= fm {
        (x1, f1)
    } else if f2 >= fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}

/// Supremum of `|f|` over `[breaks[0], breaks[last]]`: `probes` uniform
/// points per interval, then golden-section refinement around the top-3
/// grid-local maxima of each interval.
///
/// Returns the sup, its location, and the sign of the extremal value of
/// `f` within each interval (0 if the interval extremum is exactly zero).
pub(crate) fn sup_abs_on_breaks(
    f: &dyn Fn(f64) -> f64,
    breaks: &[f64],
    probes: usize,
    rel_tol: f64,
) -> (f64, f64, Vec<i8>) {
    let mut best = f64::NEG_INFINITY;
    let mut best_x = breaks[0];
    let mut signs = Vec::with_capacity(breaks.len() - 1);

    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi - lo) / probes as f64;
        let mut vals = Vec::with_capacity(probes + 1);
        for i in 0..=probes {
            let x = if i == probes { hi } else { lo + i as f64 * h };
            vals.push((x, f(x)));
        }

        // grid-local maxima of |f|
        let mut local: Vec<usize> = (0..vals.len())
            .filter(|&i| {
                let v = vals[i].1.abs();
                let left_ok = i == 0 || vals[i - 1].1.abs() <= v;
                let right_ok = i + 1 == vals.len() || vals[i + 1].1.abs() <= v;
                left_ok && right_ok
            })
            .collect();
        local.sort_by(|&a, &b| vals[b].1.abs().total_cmp(&vals[a].1.abs()));
        local.truncate(3);

        let mut interval_best = f64::NEG_INFINITY;
        let mut interval_val = 0.0;
        let mut interval_x = lo;
        for &i in &local {
            let a = if i == 0 { lo } else { vals[i - 1].0 };
            let b = if i + 1 == vals.len() { hi } else { vals[i + 1].0 };
            let (x, fa) = golden_max(&|x| f(x).abs(), a, b, rel_tol);
            let (x, fa, raw) = if vals[i].1.abs() > fa {
                (vals[i].0, vals[i].1.abs(), vals[i].1)
            } else {
                (x, fa, f(x))
            };
            if fa > interval_best {
                interval_best = fa;
                interval_val = raw;
                interval_x = x;
            }
        }
        signs.push(if interval_val > 0.0 {
            1
        } else if interval_val < 0.0 {
            -1
        } else {
            0
        });
        if interval_best > best {
            best = interval_best;
            best_x = interval_x;
        }
    }
    (best, best_x, signs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let f = |x: f64| 1.0 - (x - 0.37).powi(2);
        let (x, fx) = golden_max(&f, 0.0, 1.0, 1e-12);
        assert!((x - 0.37).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-13);
    }

    #[test]
    fn sup_abs_finds_negative_extrema() {
        let f = |x: f64| -((x - 0.25) * (x - 0.75));
        // |f| maximal at x = 0.5 (value 0.0625) inside [0, 1]; at the ends f = -0.1875
        let (sup, loc, signs) = sup_abs_on_breaks(&f, &[0.0, 1.0], 64, 1e-12);
        assert!((sup - 0.1875).abs() < 1e-12);
        assert!(loc.abs() < 1e-9 || (loc - 1.0).abs() < 1e-9);
        assert_eq!(signs, vec![-1]);
    }
}
