//! Interpolation-error checks against the brute-force dense-grid oracle
//! and frozen values computed from the exact (rational) interpolant.

mod common;

use common::dense_grid_sup;
use kmono::spline::{
    hermite_interpolate, interp_error, perfect_spline, truncated_power, HermiteData, KnotVector,
    Polynomial, TruncatedPower,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_POINTS: usize = 100_000;

fn nodes_0361() -> KnotVector {
    KnotVector::new(vec![0.0, 0.3, 0.6, 1.0]).unwrap()
}

#[test]
fn perfect_spline_error_sup_matches_dense_grid_oracle() {
    let s = perfect_spline(3, &[0.3, 0.6]).unwrap();
    let nodes = nodes_0361();
    let report = interp_error(&s, &nodes, 3).unwrap();
    let sup = report.sup_of_order(0).unwrap().sup;

    let data = HermiteData::from_target(&s, &nodes);
    let h = hermite_interpolate(&data, 3).unwrap();
    let oracle = dense_grid_sup(
        &|x| h.eval(x, 0).unwrap() - s.eval(x, 0).unwrap(),
        0.0,
        1.0,
        ORACLE_POINTS,
    );
    assert!(
        (sup - oracle).abs() <= 1e-8 * (1.0 + oracle),
        "sup {sup} vs oracle {oracle}"
    );
    // frozen from the exact rational interpolant of S*(·; 0.3, 0.6)
    let frozen = 4.4325004751703125e-7;
    assert!(
        (sup - frozen).abs() <= 1e-12 + 1e-6 * frozen,
        "sup {sup} vs frozen {frozen}"
    );
}

#[test]
fn truncated_power_error_sup_matches_dense_grid_oracle() {
    let nodes = nodes_0361();
    let b = TruncatedPower { u: 0.5, k: 3 };
    let report = interp_error(&b, &nodes, 3).unwrap();
    let sup = report.sup_of_order(0).unwrap().sup;

    let data = HermiteData::from_target(&b, &nodes);
    let h = hermite_interpolate(&data, 3).unwrap();
    let oracle = dense_grid_sup(
        &|x| h.eval(x, 0).unwrap() - truncated_power(0.5, 3, x),
        0.0,
        1.0,
        ORACLE_POINTS,
    );
    assert!((sup - oracle).abs() <= 1e-8 * (1.0 + oracle));
    // frozen from the exact rational interpolant of b_{1/2}
    let frozen = 1.0596864553798235e-3;
    assert!(
        (sup - frozen).abs() <= 1e-9 * (1.0 + frozen),
        "sup {sup} vs frozen {frozen}"
    );
}

#[test]
fn random_polynomials_are_reproduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for k in 2..=4usize {
        for _ in 0..60 {
            let deg = 2 * k - 1;
            let coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = Polynomial::new(coeffs);
            let nodes = random_nodes(&mut rng, 2 * k - 2);
            let report = interp_error(&p, &nodes, k).unwrap();
            let scale = 1.0
                + dense_grid_sup(&|x| p.eval(x, 0), nodes.first(), nodes.last(), 512);
            assert!(
                report.sup_of_order(0).unwrap().sup <= 1e-8 * scale,
                "k={k}: sup {}",
                report.sup_of_order(0).unwrap().sup
            );
        }
    }
}

fn random_nodes(rng: &mut ChaCha8Rng, count: usize) -> KnotVector {
    loop {
        let mut pts: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..1.0)).collect();
        pts.sort_by(f64::total_cmp);
        let min_gap = pts.windows(2).map(|w| w[1] - w[0]).fold(1.0, f64::min);
        if min_gap > 1e-3 {
            return KnotVector::new(pts).unwrap();
        }
    }
}

#[test]
fn operator_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let nodes = nodes_0361();
    for _ in 0..40 {
        let f: Vec<f64> = (0..=5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..=5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (alpha, beta): (f64, f64) =
            (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let pf = Polynomial::new(f.clone());
        let pg = Polynomial::new(g.clone());
        let combo = Polynomial::new(
            f.iter()
                .zip(&g)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        );
        let hf = hermite_interpolate(&HermiteData::from_target(&pf, &nodes), 3).unwrap();
        let hg = hermite_interpolate(&HermiteData::from_target(&pg, &nodes), 3).unwrap();
        let hc = hermite_interpolate(&HermiteData::from_target(&combo, &nodes), 3).unwrap();
        for i in 0..=64 {
            let x = i as f64 / 64.0;
            let lin = alpha * hf.eval(x, 0).unwrap() + beta * hg.eval(x, 0).unwrap();
            let direct = hc.eval(x, 0).unwrap();
            assert!((lin - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let s = perfect_spline(3, &[0.3, 0.6]).unwrap();
    let nodes = nodes_0361();
    let data = HermiteData::from_target(&s, &nodes);
    let h = hermite_interpolate(&data, 3).unwrap();
    let step = 1e-6;
    for q in 1..=3usize {
        for &x in &[0.15, 0.45, 0.82] {
            let fd = (h.eval(x + step, q - 1).unwrap() - h.eval(x - step, q - 1).unwrap())
                / (2.0 * step);
            let an = h.eval(x, q).unwrap();
            assert!(
                (fd - an).abs() <= 1e-4 * (1.0 + an.abs()),
                "q={q} x={x}: {fd} vs {an}"
            );
        }
    }
}

#[test]
fn top_derivative_is_affine_on_each_interval() {
    let s = perfect_spline(3, &[0.3, 0.6]).unwrap();
    let nodes = nodes_0361();
    let data = HermiteData::from_target(&s, &nodes);
    let h = hermite_interpolate(&data, 3).unwrap();
    // 2k-1 = 5th derivative: second differences vanish inside intervals
    for w in nodes.as_slice().windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let xs = [
            lo + 0.2 * (hi - lo),
            lo + 0.5 * (hi - lo),
            lo + 0.8 * (hi - lo),
        ];
        let v: Vec<f64> = xs.iter().map(|&x| h.eval(x, 5).unwrap()).collect();
        let second_diff = v[0] - 2.0 * v[1] + v[2];
        let scale = 1.0 + v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!(second_diff.abs() <= 1e-7 * scale, "{second_diff:e}");
    }
}
