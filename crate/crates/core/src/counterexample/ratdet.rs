use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn det_bareiss_int(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for p in 0..n {
        if m[p][p].is_zero() {
            match (p + 1..n).find(|&r| !m[r][p].is_zero()) {
                Some(r) => {
                    m.swap(p, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                let num = &m[p][p] * &m[i][j] - &m[i][p] * &m[p][j];
                m[i][j] = num / &prev; // exact division in Bareiss
            }
            m[i][p] = BigInt::zero();
        }
        prev = m[p][p].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Exact determinant of a square rational matrix: clears each row's
/// denominators, runs Bareiss over the integers, and divides the scale
/// back out.
pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut scale = BigInt::one();
    let mut int_rows = Vec::with_capacity(n);
    for row in m {
        let mut lcm = BigInt::one();
        for e in row {
            lcm = num_integer_lcm(&lcm, e.denom());
        }
        let ints: Vec<BigInt> = row
            .iter()
            .map(|e| e.numer() * (&lcm / e.denom()))
            .collect();
        scale *= &lcm;
        int_rows.push(ints);
    }
    BigRational::new(det_bareiss_int(int_rows), scale)
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

/// Determinant of a square f64 matrix by Gaussian elimination with scaled
/// partial pivoting; also returns the pivot-ratio condition diagnostic
/// (largest over smallest pivot magnitude).
pub fn det_f64_scaled_pivot(m: &[Vec<f64>]) -> (f64, f64) {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let row_scale: Vec<f64> = a
        .iter()
        .map(|r| r.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
        .collect();
    let mut scale = row_scale;
    let mut det = 1.0;
    let mut pmax: f64 = 0.0;
    let mut pmin = f64::INFINITY;
    for p in 0..n {
        let (best, _) = (p..n)
            .map(|r| (r, if scale[r] > 0.0 { a[r][p].abs() / scale[r] } else { 0.0 }))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if a[best][p] == 0.0 {
            return (0.0, f64::INFINITY);
        }
        if best != p {
            a.swap(best, p);
            scale.swap(best, p);
            det = -det;
        }
        let piv = a[p][p];
        det *= piv;
        pmax = pmax.max(piv.abs());
        pmin = pmin.min(piv.abs());
        for i in p + 1..n {
            let f = a[i][p] / piv;
            for j in p..n {
                a[i][j] -= f * a[p][j];
            }
        }
    }
    (det, if pmin > 0.0 { pmax / pmin } else { f64::INFINITY })
}

/// Converts a big rational to the nearest f64 without overflowing through
/// the naive numerator/denominator route.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().abs();
    // shift so the integer quotient keeps ~80 significant bits
    let shift: i64 = den.bits() as i64 + 80 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let v = q.to_f64().unwrap_or(f64::INFINITY) * 2.0f64.powi(-shift as i32);
    if neg {
        -v
    } else {
        v
    }
}
