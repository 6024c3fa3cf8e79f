use crate::error::{Error, Result};
use crate::spline::poly::factorial;
use crate::spline::{KnotVector, PiecewisePoly};

/// Perfect spline on `[0, 1]`:
///
/// `S*(t) = (1/(2k)!) ( t^{2k} + 2 Σ_{i=1}^{2k-4} (-1)^i (t-τ_i)_+^{2k} )`.
///
/// Its `2k`-th derivative alternates between +1 and −1 across the knots,
/// starting at +1 on `[0, τ_1)`; the top coefficient of each interval is
/// stored as `±1/(2k)!` so evaluating that derivative is exact.
pub fn perfect_spline(k: usize, internal_knots: &[f64]) -> Result<PiecewisePoly> {
    if k < 2 {
        return Err(Error::argument(format!("perfect spline needs k >= 2, got {k}")));
    }
    let want = 2 * k - 4;
    if internal_knots.len() != want {
        return Err(Error::argument(format!(
            "perfect spline with k={k} needs {want} internal knots, got {}",
            internal_knots.len()
        )));
    }
    for w in internal_knots.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::argument(
                "perfect spline knots must be strictly increasing".to_string(),
            ));
        }
    }
    if internal_knots.iter().any(|&t| t <= 0.0 || t >= 1.0) {
        return Err(Error::argument(
            "perfect spline knots must lie in (0, 1)".to_string(),
        ));
    }

    let deg = 2 * k;
    let fact = factorial(deg);
    let mut breaks = Vec::with_capacity(want + 2);
    breaks.push(0.0);
    breaks.extend_from_slice(internal_knots);
    breaks.push(1.0);
    let breaks = KnotVector::new(breaks)?;

    let binom = binomial_row(deg);
    let mut coeffs = Vec::with_capacity(breaks.num_intervals());
    for i in 0..breaks.num_intervals() {
        let a = breaks.as_slice()[i];
        let mut row = vec![0.0; deg + 1];
        // t^{2k} centred at a
        accumulate_shifted_power(&mut row, &binom, a, 1.0);
        // active truncated powers: knots τ_l with τ_l <= a
        let mut sign_sum: i64 = 1;
        for (l, &tau) in internal_knots.iter().enumerate() {
            if tau <= a {
                let s = if (l + 1) % 2 == 1 { -2.0 } else { 2.0 };
                accumulate_shifted_power(&mut row, &binom, a - tau, s);
                sign_sum += if (l + 1) % 2 == 1 { -2 } else { 2 };
            }
        }
        for c in row.iter_mut() {
            *c /= fact;
        }
        // top coefficient is exactly ±1/(2k)! ; rewrite it so the 2k-th
        // derivative evaluates to exactly ±1
        row[deg] = sign_sum as f64 / fact;
        coeffs.push(row);
    }
    PiecewisePoly::new(breaks, coeffs, deg)
}

/// Adds `weight * (x - a + shift)^{deg}` expanded in powers of `(x - a)`,
/// where `shift >= 0` is the distance from the interval's left endpoint to
/// the term's own origin.
fn accumulate_shifted_power(row: &mut [f64], binom: &[f64], shift: f64, weight: f64) {
    let deg = row.len() - 1;
    let mut pow = 1.0;
    for j in (0..=deg).rev() {
        row[j] += weight * binom[j] * pow;
        pow *= shift;
    }
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for j in 1..=n {
        row[j] = row[j - 1] * (n - j + 1) as f64 / j as f64;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_first_knot_only_the_power_term_is_active() {
        let s = perfect_spline(3, &[0.1, 0.2]).unwrap();
        let t: f64 = 0.05;
        let expect = t.powi(6) / 720.0;
        assert!((s.eval(t, 0).unwrap() - expect).abs() < 1e-18);
    }

    #[test]
    fn value_at_one_matches_direct_evaluation() {
        let s = perfect_spline(3, &[0.1, 0.2]).unwrap();
        let expect = (1.0 - 2.0 * 0.9f64.powi(6) + 2.0 * 0.8f64.powi(6)) / 720.0;
        assert!((s.eval(1.0, 0).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn sixth_derivative_alternates_exactly() {
        for knots in [[0.1, 0.2], [0.3, 0.6], [0.45, 0.9]] {
            let s = perfect_spline(3, &knots).unwrap();
            assert_eq!(s.eval(knots[0] / 2.0, 6).unwrap(), 1.0);
            assert_eq!(s.eval((knots[0] + knots[1]) / 2.0, 6).unwrap(), -1.0);
            assert_eq!(s.eval((knots[1] + 1.0) / 2.0, 6).unwrap(), 1.0);
        }
    }

    #[test]
    fn k4_eighth_derivative_alternates_exactly() {
        let knots = [0.2, 0.4, 0.6, 0.8];
        let s = perfect_spline(4, &knots).unwrap();
        let probes = [0.1, 0.3, 0.5, 0.7, 0.9];
        let expect = [1.0, -1.0, 1.0, -1.0, 1.0];
        for (p, e) in probes.iter().zip(expect) {
            assert_eq!(s.eval(*p, 8).unwrap(), e);
        }
    }

    #[test]
    fn validates_knot_count_and_range() {
        assert!(perfect_spline(3, &[0.1]).is_err());
        assert!(perfect_spline(3, &[0.2, 0.1]).is_err());
        assert!(perfect_spline(3, &[0.0, 0.5]).is_err());
        assert!(perfect_spline(3, &[0.5, 1.0]).is_err());
    }
}
