use std::f64::consts::TAU;

use equidist_core::curve::{CurveError, GenericityIssue};
use equidist_core::fixtures;
use equidist_core::{Curve, FourierCurve, Settings, Vec2};

fn settings() -> Settings {
    Settings::with_samples(4096)
}

/// Direct evaluation of the trigonometric sums, independent of the jet code.
fn eval(c: &FourierCurve, t: f64) -> Vec2 {
    let mut p = Vec2::new(c.xc[0], c.yc[0]);
    for k in 1..c.xc.len() {
        let (s, co) = ((k as f64) * t).sin_cos();
        p.x += c.xc[k] * co + c.xs[k] * s;
        p.y += c.yc[k] * co + c.ys[k] * s;
    }
    p
}

#[test]
fn jet_matches_finite_differences() {
    let h = 1e-3;
    for f in fixtures::all() {
        for i in 0..64 {
            let t = TAU * i as f64 / 64.0 + 0.013;
            let j = f.curve.jet(t);
            let p = |k: f64| eval(&f.curve, t + k * h);
            assert!(j.p.dist(p(0.0)) < 1e-14, "{} position", f.name);
            let d1 = (p(1.0) - p(-1.0)) / (2.0 * h);
            let d2 = (p(1.0) + p(-1.0) - p(0.0) * 2.0) / (h * h);
            let d3 = (p(2.0) - p(1.0) * 2.0 + p(-1.0) * 2.0 - p(-2.0)) / (2.0 * h * h * h);
            let d4 = (p(2.0) - p(1.0) * 4.0 + p(0.0) * 6.0 - p(-1.0) * 4.0 + p(-2.0)) / (h * h * h * h);
            let scale = 1.0 + j.d4.norm();
            assert!(j.d1.dist(d1) < 1e-5 * scale, "{} d1", f.name);
            assert!(j.d2.dist(d2) < 1e-5 * scale, "{} d2", f.name);
            assert!(j.d3.dist(d3) < 1e-4 * scale, "{} d3", f.name);
            assert!(j.d4.dist(d4) < 1e-3 * scale, "{} d4", f.name);
        }
    }
}

#[test]
fn unit_circle_curvature_and_rotation() {
    let c = fixtures::circle();
    for i in 0..16 {
        assert!((c.kappa(i as f64 * 0.4) - 1.0).abs() < 1e-14);
    }
    assert_eq!(c.rotation_number(&settings()).unwrap(), 1);
}

/// Sign changes of `det[f', f'']` on a dense uniform grid.
fn dense_inflexions(c: &FourierCurve, n: usize) -> usize {
    let v: Vec<f64> = (0..n).map(|i| c.jet(TAU * i as f64 / n as f64).det12()).collect();
    (0..n).filter(|&i| (v[i] < 0.0) != (v[(i + 1) % n] < 0.0)).count()
}

/// Turns of the polygon through `n` samples.
fn polygon_turning(c: &FourierCurve, n: usize) -> (usize, f64) {
    let pts: Vec<Vec2> = (0..n).map(|i| eval(c, TAU * i as f64 / n as f64)).collect();
    let edge = |i: usize| pts[(i + 1) % n] - pts[i];
    let turns: Vec<f64> = (0..n).map(|i| edge(i).cross(edge((i + 1) % n)).atan2(edge(i).dot(edge((i + 1) % n)))).collect();
    let changes = (0..n).filter(|&i| (turns[i] < 0.0) != (turns[(i + 1) % n] < 0.0)).count();
    (changes, turns.iter().sum::<f64>() / TAU)
}

#[test]
fn inflexions_match_dense_scan() {
    let s = settings();
    for f in fixtures::all() {
        let found = f.curve.inflexions(&s).unwrap();
        assert_eq!(found.len(), dense_inflexions(&f.curve, 1 << 16), "{}", f.name);
        for &t in &found {
            assert!(f.curve.jet(t).theta_rate().abs() < 1e-8, "{} at {t}", f.name);
        }
    }
}

#[test]
fn inflexions_and_rotation_match_polygon() {
    let s = settings();
    for f in fixtures::all() {
        let (changes, turns) = polygon_turning(&f.curve, 1 << 14);
        assert_eq!(f.curve.inflexions(&s).unwrap().len(), changes, "{}", f.name);
        assert_eq!(f.curve.rotation_number(&s).unwrap() as f64, turns.round(), "{}", f.name);
        assert!((turns - turns.round()).abs() < 1e-9, "{}", f.name);
    }
}

#[test]
fn fixture_inflexion_counts() {
    let s = settings();
    let count = |c: FourierCurve| c.inflexions(&s).unwrap().len();
    assert_eq!(count(fixtures::w1()), 2);
    assert_eq!(count(fixtures::w2()), 2);
    assert_eq!(count(fixtures::eight_inflexions()), 8);
    for n in 2..=4 {
        assert_eq!(count(fixtures::rosette(n)), 0);
        assert_eq!(fixtures::rosette(n).rotation_number(&s).unwrap(), n as i64);
    }
    assert_eq!(fixtures::w2().rotation_number(&s).unwrap(), 2);
}

/// `x = sin t`, `y = 6 − 8 cos t + 2 cos 2t` has `y' = y'' = y''' = 0` and
/// `y'''' = 24` at `t = 0`: a flat point of order four.
#[test]
fn undulation_is_a_degenerate_inflexion() {
    let c = FourierCurve::new(vec![0.0, 0.0], vec![0.0, 1.0], vec![6.0, -8.0, 2.0], vec![]).unwrap();
    assert!(matches!(c.inflexions(&settings()), Err(CurveError::DegenerateInflexion { .. })));
    let report = c.genericity(&settings());
    assert!(report.issues.iter().any(|i| matches!(i, GenericityIssue::Curve(CurveError::DegenerateInflexion { .. }))));
}

#[test]
fn figure_eight_is_accepted() {
    // Rotation number zero; regular.
    let c = FourierCurve::new(vec![], vec![0.0, 1.0], vec![], vec![0.0, 0.0, 0.5]).unwrap();
    assert_eq!(c.rotation_number(&settings()).unwrap(), 0);
}

#[test]
fn cusped_curve_is_irregular() {
    // Deltoid: 2 cos t + cos 2t, 2 sin t − sin 2t has three cusps.
    let c = FourierCurve::new(vec![0.0, 2.0, 1.0], vec![0.0, 0.0, 0.0], vec![], vec![0.0, 2.0, -1.0]).unwrap();
    assert!(matches!(c.validate(&settings()), Err(CurveError::Irregular { .. })));
}

#[test]
fn central_symmetry_flag() {
    assert!(fixtures::circle().is_centrally_symmetric());
    assert!(fixtures::ellipse().is_centrally_symmetric());
    for f in fixtures::all().into_iter().skip(2) {
        assert!(!f.curve.is_centrally_symmetric(), "{}", f.name);
    }
}
