use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// `p(τ₁, τ₂) = 2 τ₂ (τ₂ − τ₁)(2τ₂ − τ₁)`
fn p_entry(t1: f64, t2: f64) -> f64 {
    2.0 * t2 * (t2 - t1) * (2.0 * t2 - t1)
}

/// `q(τ₁, τ₂) = (1 − τ₁)(2(1 − τ₂)(2 − τ₁) + 1 − τ₁)`
fn q_entry(t1: f64, t2: f64) -> f64 {
    (1.0 - t1) * (2.0 * (1.0 - t2) * (2.0 - t1) + 1.0 - t1)
}

pub(crate) fn check_admissible(t1: f64, t2: f64) -> Result<()> {
    if !(t1.is_finite() && t2.is_finite() && 0.0 < t1 && t1 < t2 && t2 < 1.0) {
        return Err(Error::argument(format!(
            "need 0 < tau1 < tau2 < 1, got tau1={t1}, tau2={t2}"
        )));
    }
    Ok(())
}

/// The 7×6 matrix of node evaluations behind the determinantal expression
/// for the k = 3 interpolation error: rows are the basis functions that
/// vanish to second order at 0 (t², t²(t−τ₁), t²(t−τ₁)², t²(t−τ₁)²(t−τ₂),
/// (t−τ₁)₊⁵, (t−τ₂)₊⁵, S*), columns are value/derivative at τ₁, τ₂, 1.
pub fn build_d(tau1: f64, tau2: f64) -> Result<[[f64; 6]; 7]> {
    check_admissible(tau1, tau2)?;
    let (t1, t2) = (tau1, tau2);
    let d21 = t2 - t1;
    let m1 = 1.0 - t1;
    let m2 = 1.0 - t2;
    Ok([
        [t1 * t1, 2.0 * t1, t2 * t2, 2.0 * t2, 1.0, 2.0],
        [
            0.0,
            t1 * t1,
            t2 * t2 * d21,
            t2 * (3.0 * t2 - 2.0 * t1),
            m1,
            3.0 - 2.0 * t1,
        ],
        [
            0.0,
            0.0,
            t2 * t2 * d21 * d21,
            p_entry(t1, t2),
            m1 * m1,
            2.0 * m1 * (2.0 - t1),
        ],
        [
            0.0,
            0.0,
            0.0,
            t2 * t2 * d21 * d21,
            m1 * m1 * m2,
            q_entry(t1, t2),
        ],
        [
            0.0,
            0.0,
            d21.powi(5),
            5.0 * d21.powi(4),
            m1.powi(5),
            5.0 * m1.powi(4),
        ],
        [0.0, 0.0, 0.0, 0.0, m2.powi(5), 5.0 * m2.powi(4)],
        [
            t1.powi(6) / 720.0,
            t1.powi(5) / 120.0,
            (t2.powi(6) - 2.0 * d21.powi(6)) / 720.0,
            (t2.powi(5) - 2.0 * d21.powi(5)) / 120.0,
            (1.0 - 2.0 * m1.powi(6) + 2.0 * m2.powi(6)) / 720.0,
            (1.0 - 2.0 * m1.powi(5) + 2.0 * m2.powi(5)) / 120.0,
        ],
    ])
}

/// Same matrix with exact rational entries (every f64 input is a dyadic
/// rational, so this is exact).
pub(crate) fn build_d_rational(tau1: f64, tau2: f64) -> Result<Vec<Vec<BigRational>>> {
    check_admissible(tau1, tau2)?;
    let t1 = BigRational::from_float(tau1).unwrap();
    let t2 = BigRational::from_float(tau2).unwrap();
    let one = BigRational::from_integer(BigInt::from(1));
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let d21 = &t2 - &t1;
    let m1 = &one - &t1;
    let m2 = &one - &t2;
    let p = int(2) * &t2 * &d21 * (int(2) * &t2 - &t1);
    let q = &m1 * (int(2) * &m2 * (int(2) - &t1) + &m1);

    let rows: Vec<Vec<BigRational>> = vec![
        vec![
            &t1 * &t1,
            int(2) * &t1,
            &t2 * &t2,
            int(2) * &t2,
            one.clone(),
            int(2),
        ],
        vec![
            int(0),
            &t1 * &t1,
            &t2 * &t2 * &d21,
            &t2 * (int(3) * &t2 - int(2) * &t1),
            m1.clone(),
            int(3) - int(2) * &t1,
        ],
        vec![
            int(0),
            int(0),
            &t2 * &t2 * &d21 * &d21,
            p,
            &m1 * &m1,
            int(2) * &m1 * (int(2) - &t1),
        ],
        vec![
            int(0),
            int(0),
            int(0),
            &t2 * &t2 * &d21 * &d21,
            &m1 * &m1 * &m2,
            q,
        ],
        vec![
            int(0),
            int(0),
            d21.pow(5),
            int(5) * d21.pow(4),
            m1.pow(5),
            int(5) * m1.pow(4),
        ],
        vec![int(0), int(0), int(0), int(0), m2.pow(5), int(5) * m2.pow(4)],
        vec![
            t1.pow(6) / int(720),
            t1.pow(5) / int(120),
            (t2.pow(6) - int(2) * d21.pow(6)) / int(720),
            (t2.pow(5) - int(2) * d21.pow(5)) / int(120),
            (&one - int(2) * m1.pow(6) + int(2) * m2.pow(6)) / int(720),
            (&one - int(2) * m1.pow(5) + int(2) * m2.pow(5)) / int(120),
        ],
    ];
    Ok(rows)
}
