//! Unboundedness of the Hermite interpolation error at k = 3.
//!
//! Three independent routes to the fifth derivative of the interpolation
//! error of the perfect spline at zero:
//!
//! * `Determinant` — exact rational determinants δ₁, δ₂ of submatrices of
//!   the 7×6 node-evaluation matrix `D`, giving `120 δ₁/δ₂`.
//! * `ClosedForm` — the explicit factorizations of δ₁ and δ₂ under the
//!   coalescing link τ₂ = 2τ₁.
//! * `SplineNumeric` — build the interpolant of S* and read the local
//!   quintic coefficient of the first interval.
//!
//! Under τ₂ = 2τ₁ the quantity behaves like `1/(21 τ₁)` and diverges.

mod dmatrix;
pub(crate) mod ratdet;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spline::{
    interp_error, perfect_spline, HermiteData, HermiteOperator, KnotVector, TruncatedPower,
};

pub use dmatrix::build_d;
pub use ratdet::{det_bareiss_int, det_f64_scaled_pivot, det_rational, rational_to_f64};

/// The two determinants that control the blow-up, with the inputs and a
/// condition diagnostic from the float elimination path.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaPair {
    pub delta1: f64,
    pub delta2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub cond_estimate: f64,
    /// Set when δ₂ vanished and the construction degenerates.
    pub degenerate: bool,
}

/// How 𝓔₃⁽⁵⁾(0) was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum E5Method {
    Determinant,
    ClosedForm,
    SplineNumeric,
}

impl fmt::Display for E5Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            E5Method::Determinant => "determinant",
            E5Method::ClosedForm => "closed_form",
            E5Method::SplineNumeric => "spline_numeric",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for E5Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "determinant" => Ok(E5Method::Determinant),
            "closed_form" | "closed-form" => Ok(E5Method::ClosedForm),
            "spline_numeric" | "spline-numeric" => Ok(E5Method::SplineNumeric),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// One row of a blow-up scan.
#[derive(Debug, Clone, Serialize)]
pub struct BlowupRow {
    pub tau1: f64,
    pub tau2: f64,
    pub e5_at_zero: f64,
    /// `21 τ₁ · 𝓔₃⁽⁵⁾(0)`, which tends to 1 as τ₁ → 0 under τ₂ = 2τ₁.
    pub product_21tau1: f64,
    pub method: E5Method,
}

/// δ₁ = det(D without row 4) and δ₂ = det(D without row 7) as exact
/// rationals (inputs are dyadic, so the rational path is always exact).
pub fn deltas_exact(tau1: f64, tau2: f64) -> Result<(BigRational, BigRational)> {
    let d = dmatrix::build_d_rational(tau1, tau2)?;
    let minor = |skip: usize| -> Vec<Vec<BigRational>> {
        d.iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, r)| r.clone())
            .collect()
    };
    let d1 = det_rational(&minor(3));
    let d2 = det_rational(&minor(6));
    Ok((d1, d2))
}

/// δ₁ and δ₂ with a float-path condition diagnostic attached.
pub fn deltas(tau1: f64, tau2: f64) -> Result<DeltaPair> {
    let (d1, d2) = deltas_exact(tau1, tau2)?;
    let df = build_d(tau1, tau2)?;
    let minor_f = |skip: usize| -> Vec<Vec<f64>> {
        df.iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, r)| r.to_vec())
            .collect()
    };
    let (_, c1) = det_f64_scaled_pivot(&minor_f(3));
    let (_, c2) = det_f64_scaled_pivot(&minor_f(6));
    Ok(DeltaPair {
        delta1: rational_to_f64(&d1),
        delta2: rational_to_f64(&d2),
        tau1,
        tau2,
        cond_estimate: c1.max(c2),
        degenerate: d2.is_zero(),
    })
}

/// The printed closed forms for δ₁, δ₂ under τ₂ = 2τ₁, exactly:
///
/// δ₁ = (1/360) τ₁¹² (1−2τ₁)⁶ (4 − 32τ₁ + 189τ₁² − 312τ₁³ + 159τ₁⁴),
/// δ₂ = 4 τ₁¹³ (1−2τ₁)⁶ (1−τ₁)(7 − 5τ₁).
pub fn closed_form_deltas_exact(tau1: f64) -> Result<(BigRational, BigRational)> {
    if !(tau1.is_finite() && 0.0 < tau1 && tau1 < 0.5) {
        return Err(Error::argument(format!(
            "closed forms need 0 < tau1 < 1/2 (so tau2 = 2 tau1 stays in (0,1)), got {tau1}"
        )));
    }
    let t = BigRational::from_float(tau1).unwrap();
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let one_minus_2t = int(1) - int(2) * &t;
    let d1 = (int(1) / int(360))
        * t.pow(12)
        * one_minus_2t.pow(6)
        * (int(4) - int(32) * &t + int(189) * t.pow(2) - int(312) * t.pow(3)
            + int(159) * t.pow(4));
    let d2 = int(4) * t.pow(13) * one_minus_2t.pow(6) * (int(1) - &t) * (int(7) - int(5) * &t);
    Ok((d1, d2))
}

pub fn closed_form_deltas(tau1: f64) -> Result<DeltaPair> {
    let (d1, d2) = closed_form_deltas_exact(tau1)?;
    Ok(DeltaPair {
        delta1: rational_to_f64(&d1),
        delta2: rational_to_f64(&d2),
        tau1,
        tau2: 2.0 * tau1,
        cond_estimate: 1.0,
        degenerate: d2.is_zero(),
    })
}

/// 𝓔₃⁽⁵⁾(0) for the k = 3 perfect spline with knots (τ₁, τ₂), by the
/// requested method. `ClosedForm` requires τ₂ = 2τ₁ exactly.
pub fn e5_at_zero(tau1: f64, tau2: f64, method: E5Method) -> Result<BlowupRow> {
    dmatrix::check_admissible(tau1, tau2)?;
    let e5 = match method {
        E5Method::Determinant => {
            let (d1, d2) = deltas_exact(tau1, tau2)?;
            if d2.is_zero() {
                return Err(Error::argument(format!(
                    "delta2 vanished at ({tau1}, {tau2}); construction degenerates"
                )));
            }
            rational_to_f64(&(BigRational::from_integer(BigInt::from(120)) * &d1 / &d2))
        }
        E5Method::ClosedForm => {
            if tau2 != 2.0 * tau1 {
                return Err(Error::argument(format!(
                    "closed_form needs tau2 = 2 tau1 exactly, got ({tau1}, {tau2})"
                )));
            }
            let (d1, d2) = closed_form_deltas_exact(tau1)?;
            rational_to_f64(&(BigRational::from_integer(BigInt::from(120)) * &d1 / &d2))
        }
        E5Method::SplineNumeric => e5_spline_numeric(tau1, tau2)?,
    };
    Ok(BlowupRow {
        tau1,
        tau2,
        e5_at_zero: e5,
        product_21tau1: 21.0 * tau1 * e5,
        method,
    })
}

/// Builds the Hermite interpolant of S*(·; τ₁, τ₂) on nodes (0, τ₁, τ₂, 1)
/// and reads the error's fifth derivative at 0⁺ off the first interval's
/// local coefficients.
fn e5_spline_numeric(tau1: f64, tau2: f64) -> Result<f64> {
    let s = perfect_spline(3, &[tau1, tau2])?;
    let nodes = KnotVector::new(vec![0.0, tau1, tau2, 1.0])?;
    let op = HermiteOperator::new(&nodes, 3)?;
    let data = HermiteData::from_target(&s, &nodes);
    let h = op.interpolate(&data.values, &data.slopes)?;
    let c5_h = h.coeffs()[0][5];
    let c5_s = s.coeffs()[0][5]; // zero: S* is t^6/720 below the first knot
    Ok(120.0 * (c5_h - c5_s))
}

/// 𝓔₃⁽⁵⁾(0) and its 21τ₁ product per grid point and method.
/// `link` maps τ₁ to τ₂ (the coalescing default is τ₂ = 2τ₁).
pub fn blowup_scan(
    tau1_grid: &[f64],
    link: impl Fn(f64) -> f64,
    methods: &[E5Method],
) -> Result<Vec<BlowupRow>> {
    let mut rows = Vec::with_capacity(tau1_grid.len() * methods.len());
    for &t1 in tau1_grid {
        let t2 = link(t1);
        dmatrix::check_admissible(t1, t2)?;
        for &m in methods {
            rows.push(e5_at_zero(t1, t2, m)?);
        }
    }
    Ok(rows)
}

/// `‖b_t − 𝓗ₖ b_t‖_∞` on the node span — the envelope quantity whose
/// boundedness over t and knots was conjectured (and fails).
pub fn conjecture1_sup(t: f64, nodes: &KnotVector, k: usize) -> Result<f64> {
    if !(0.0 < t && t < 1.0) {
        return Err(Error::argument(format!("need t in (0,1), got {t}")));
    }
    if nodes.first() < 0.0 || nodes.last() > 1.0 {
        return Err(Error::argument(format!(
            "nodes must lie within [0,1], got [{}, {}]",
            nodes.first(),
            nodes.last()
        )));
    }
    let target = TruncatedPower { u: t, k };
    let report = interp_error(&target, nodes, k)?;
    Ok(report.sup_of_order(0).expect("order 0 always computed").sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0f64).max(a.abs()).max(b.abs())
    }

    #[test]
    fn deltas_match_closed_forms_at_printed_points() {
        for t1 in [0.1, 0.25] {
            let d = deltas(t1, 2.0 * t1).unwrap();
            let c = closed_form_deltas(t1).unwrap();
            assert!(rel_close(d.delta1, c.delta1, 1e-10), "{} vs {}", d.delta1, c.delta1);
            assert!(rel_close(d.delta2, c.delta2, 1e-10), "{} vs {}", d.delta2, c.delta2);
        }
    }

    #[test]
    fn exact_path_is_exact_for_dyadic_inputs() {
        let (d1, d2) = deltas_exact(0.25, 0.5).unwrap();
        let (c1, c2) = closed_form_deltas_exact(0.25).unwrap();
        assert_eq!(d1, c1);
        assert_eq!(d2, c2);
    }

    #[test]
    fn leading_coefficients_of_the_closed_forms() {
        // delta1 / tau1^12 -> 4/360, delta2 / tau1^13 -> 28 as tau1 -> 0
        let t = 1e-6;
        let c = closed_form_deltas(t).unwrap();
        assert!(rel_close(c.delta1 / t.powi(12), 4.0 / 360.0, 1e-4));
        assert!(rel_close(c.delta2 / t.powi(13), 28.0, 1e-4));
    }

    #[test]
    fn e5_methods_agree_at_well_separated_knots() {
        // frozen from the exact rational determinant: 42739/138600
        let expect = 0.30836219336219334;
        let det = e5_at_zero(0.3, 0.6, E5Method::Determinant).unwrap();
        let cf = e5_at_zero(0.3, 0.6, E5Method::ClosedForm).unwrap();
        let sn = e5_at_zero(0.3, 0.6, E5Method::SplineNumeric).unwrap();
        assert!(rel_close(det.e5_at_zero, expect, 1e-12));
        assert!(rel_close(cf.e5_at_zero, expect, 1e-12));
        assert!(rel_close(sn.e5_at_zero, expect, 1e-8));
    }

    #[test]
    fn e5_closed_form_requires_the_link() {
        assert!(e5_at_zero(0.3, 0.7, E5Method::ClosedForm).is_err());
        assert!(e5_at_zero(0.25, 0.5, E5Method::ClosedForm).is_ok());
    }

    #[test]
    fn asymptote_at_small_tau() {
        let row = e5_at_zero(1e-3, 2e-3, E5Method::Determinant).unwrap();
        assert!(row.product_21tau1 > 0.95 && row.product_21tau1 < 1.05);
    }

    #[test]
    fn scan_rows_are_consistent_across_methods() {
        let rows = blowup_scan(
            &[0.1],
            |t| 2.0 * t,
            &[E5Method::Determinant, E5Method::ClosedForm, E5Method::SplineNumeric],
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows[1..] {
            assert!(rel_close(r.e5_at_zero, rows[0].e5_at_zero, 1e-6));
        }
    }

    #[test]
    fn offset_link_is_supported() {
        let rows = blowup_scan(
            &[0.3],
            |t| t + 0.3,
            &[E5Method::Determinant, E5Method::SplineNumeric],
        )
        .unwrap();
        assert!(rel_close(rows[0].e5_at_zero, rows[1].e5_at_zero, 1e-6));
    }
}
