//! End-to-end checks of the blow-up machinery: coalescence growth, the
//! one-sided extremality of the perfect spline, and the exactness of the
//! rational determinant path.

mod common;

use common::dense_grid_sup;
use kmono::counterexample::{
    blowup_scan, closed_form_deltas_exact, conjecture1_sup, deltas_exact, e5_at_zero, E5Method,
};
use kmono::spline::{
    hermite_interpolate, interp_error, perfect_spline, FnTarget, HermiteData, KnotVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn envelope_grows_under_coalescing_knots() {
    // b_t interpolation error at t = 1.5 τ1 with knots (0, τ1, 2τ1, 1)
    let mut last = 0.0f64;
    for tau1 in [0.1, 0.05, 0.025] {
        let nodes = KnotVector::new(vec![0.0, tau1, 2.0 * tau1, 1.0]).unwrap();
        let sup = conjecture1_sup(1.5 * tau1, &nodes, 3).unwrap();
        assert!(
            sup > last,
            "sup at tau1={tau1} is {sup}, previous {last}"
        );
        last = sup;
    }
}

#[test]
fn conjecture1_quantity_matches_dense_grid_oracle() {
    let nodes = KnotVector::new(vec![0.0, 0.3, 0.6, 1.0]).unwrap();
    let sup = conjecture1_sup(0.5, &nodes, 3).unwrap();
    let b = kmono::spline::TruncatedPower { u: 0.5, k: 3 };
    let data = HermiteData::from_target(&b, &nodes);
    let h = hermite_interpolate(&data, 3).unwrap();
    let oracle = dense_grid_sup(
        &|x| h.eval(x, 0).unwrap() - kmono::spline::truncated_power(0.5, 3, x),
        0.0,
        1.0,
        100_000,
    );
    assert!((sup - oracle).abs() <= 1e-8 * (1.0 + oracle));
}

#[test]
fn node_coincident_kernel_is_well_posed() {
    let nodes = KnotVector::new(vec![0.0, 0.3, 0.6, 1.0]).unwrap();
    for t in [0.3, 0.6] {
        let sup = conjecture1_sup(t, &nodes, 3).unwrap();
        assert!(sup.is_finite());
    }
}

#[test]
fn scan_diverges_along_the_coalescing_link() {
    let grid = [0.2, 0.1, 0.05, 0.025, 0.0125, 6.25e-3];
    let rows = blowup_scan(&grid, |t| 2.0 * t, &[E5Method::Determinant]).unwrap();
    for w in rows.windows(2) {
        assert!(
            w[1].e5_at_zero.abs() > w[0].e5_at_zero.abs(),
            "no growth from tau1={} to {}",
            w[0].tau1,
            w[1].tau1
        );
    }
}

#[test]
fn error_sixth_derivative_has_the_paper_sign_pattern() {
    // E3 = H3(S*) − S*: the interpolant is degree 5, so E3^{(6)} = −S*^{(6)},
    // which is −1 / +1 / −1 across (τ1, τ2)
    let (t1, t2) = (0.3, 0.6);
    let s = perfect_spline(3, &[t1, t2]).unwrap();
    assert_eq!(-s.eval(t1 / 2.0, 6).unwrap(), -1.0);
    assert_eq!(-s.eval(0.5 * (t1 + t2), 6).unwrap(), 1.0);
    assert_eq!(-s.eval(0.5 * (t2 + 1.0), 6).unwrap(), -1.0);
}

#[test]
fn perfect_spline_error_dominates_smooth_functions_pointwise() {
    // sampled one-sided version of the extremality claim: for smooth f with
    // ‖f^{(2k)}‖ ≤ 1, |H_k f − f| ≤ |H_k S* − S*| at probe points
    let nodes = KnotVector::new(vec![0.0, 0.3, 0.6, 1.0]).unwrap();
    let s = perfect_spline(3, &[0.3, 0.6]).unwrap();
    let hs = hermite_interpolate(&HermiteData::from_target(&s, &nodes), 3).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        // f(x) = sin(ω x + φ)/ω^{2k} has ‖f^{(2k)}‖_∞ ≤ 1
        let omega: f64 = rng.random_range(0.5..12.0);
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let f = move |x: f64| (omega * x + phase).sin() / omega.powi(6);
        let fp = move |x: f64| (omega * x + phase).cos() / omega.powi(5);
        let target = FnTarget(move |x: f64| (f(x), fp(x)));
        let hf = hermite_interpolate(&HermiteData::from_target(&target, &nodes), 3).unwrap();
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            let ef = (hf.eval(x, 0).unwrap() - f(x)).abs();
            let es = (hs.eval(x, 0).unwrap() - s.eval(x, 0).unwrap()).abs();
            assert!(
                ef <= es + 1e-8,
                "omega={omega} phase={phase} x={x}: |e_f| {ef} > |e_S*| {es}"
            );
        }
    }
}

#[test]
fn rational_path_is_exact_for_fifty_random_dyadic_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    for _ in 0..50 {
        let tau1: f64 = rng.random_range(0.01..0.49);
        let (d1, d2) = deltas_exact(tau1, 2.0 * tau1).unwrap();
        let (c1, c2) = closed_form_deltas_exact(tau1).unwrap();
        assert_eq!(d1, c1, "delta1 mismatch at tau1={tau1}");
        assert_eq!(d2, c2, "delta2 mismatch at tau1={tau1}");
    }
}

#[test]
fn determinant_and_spline_methods_agree_on_an_offset_grid() {
    for &(t1, t2) in &[(0.2, 0.45), (0.35, 0.75), (0.15, 0.6)] {
        let det = e5_at_zero(t1, t2, E5Method::Determinant).unwrap();
        let sn = e5_at_zero(t1, t2, E5Method::SplineNumeric).unwrap();
        let denom = 1.0f64.max(det.e5_at_zero.abs());
        assert!(
            (det.e5_at_zero - sn.e5_at_zero).abs() / denom <= 1e-6,
            "({t1},{t2}): det {} vs spline {}",
            det.e5_at_zero,
            sn.e5_at_zero
        );
    }
}
