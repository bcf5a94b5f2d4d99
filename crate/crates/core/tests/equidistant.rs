use std::f64::consts::{PI, TAU};

use equidist_core::equidistant::{classify_onshell_endpoint, full_equidistant, ArcSide, EndpointType};
use equidist_core::fixtures;
use equidist_core::geom::hausdorff;
use equidist_core::theorems::max_spacing;
use equidist_core::{CurveAnalysis, FourierCurve, Settings, Vec2};

fn settings() -> Settings {
    Settings::with_samples(4096)
}

fn analysis(c: FourierCurve) -> CurveAnalysis {
    CurveAnalysis::new(c, settings()).unwrap()
}

/// Derivative of order `d` evaluated straight from the coefficients.
fn deriv(c: &FourierCurve, t: f64, d: u32) -> Vec2 {
    let mut p = if d == 0 { Vec2::new(c.xc[0], c.yc[0]) } else { Vec2::ZERO };
    for k in 1..c.xc.len() {
        let kf = k as f64;
        let phase = kf * t + d as f64 * PI / 2.0;
        let (s, co) = phase.sin_cos();
        let w = kf.powi(d as i32);
        p.x += w * (c.xc[k] * co + c.xs[k] * s);
        p.y += w * (c.yc[k] * co + c.ys[k] * s);
    }
    p
}

fn kappa(c: &FourierCurve, t: f64) -> f64 {
    let (a, b) = (deriv(c, t, 1), deriv(c, t, 2));
    a.cross(b) / a.norm().powi(3)
}

/// Opposite-point map of a convex curve through its unwrapped tangent angle.
struct Opposite<'a> {
    c: &'a FourierCurve,
    grid: Vec<f64>,
    theta: Vec<f64>,
}

impl<'a> Opposite<'a> {
    fn new(c: &'a FourierCurve, n: usize) -> Self {
        let grid: Vec<f64> = (0..=2 * n).map(|i| TAU * i as f64 / n as f64).collect();
        let mut theta: Vec<f64> = Vec::with_capacity(grid.len());
        for &t in &grid {
            let a = deriv(c, t, 1).angle();
            let a = match theta.last() {
                None => a,
                Some(&p) => p + (a - p + PI).rem_euclid(TAU) - PI,
            };
            theta.push(a);
        }
        Opposite { c, grid, theta }
    }

    fn angle(&self, t: f64) -> f64 {
        let i = self.grid.partition_point(|&g| g <= t).clamp(1, self.grid.len() - 1) - 1;
        let a = deriv(self.c, t, 1).angle();
        self.theta[i] + (a - self.theta[i] + PI).rem_euclid(TAU) - PI
    }

    fn partner(&self, s: f64) -> f64 {
        let target = self.angle(s) + PI;
        let i = self.theta.partition_point(|&v| v < target);
        let (mut lo, mut hi) = (self.grid[i - 1], self.grid[i]);
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if self.angle(m) < target {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }
}

#[test]
fn perturbed_ellipse_margin_scan_gives_three_half_cusps() {
    let c = fixtures::perturbed_ellipse();
    let n = 1 << 16;
    let opp = Opposite::new(&c, 4096);
    let diff: Vec<f64> = (0..n)
        .map(|i| {
            let s = TAU * i as f64 / n as f64;
            kappa(&c, s) - kappa(&c, opp.partner(s))
        })
        .collect();
    // Each cusp is met twice, once from each end of its chord.
    let changes = (0..n).filter(|&i| (diff[i] < 0.0) != (diff[(i + 1) % n] < 0.0)).count();
    assert_eq!(changes, 6);
    let an = analysis(c);
    let half = full_equidistant(&an, 0.5).unwrap();
    assert_eq!(half.iter().map(|b| b.cusp_count()).sum::<usize>(), changes / 2);
}

#[test]
fn branch_points_and_curvature_match_oracle() {
    let c = fixtures::perturbed_ellipse();
    let opp = Opposite::new(&c, 4096);
    let an = analysis(c.clone());
    let lambda = 0.3;
    let point = |s: f64| deriv(&c, s, 0) * lambda + deriv(&c, opp.partner(s), 0) * (1.0 - lambda);
    let h = 1e-3;
    let mut checked = 0;
    for b in full_equidistant(&an, lambda).unwrap() {
        for n in b.nodes.iter().step_by(7) {
            if n.margin.abs() < 0.05 {
                continue;
            }
            // Nodes traced with the roles of s and t swapped are skipped.
            let gap = (opp.partner(n.s) - n.t).rem_euclid(TAU);
            if gap.min(TAU - gap) > 1e-6 {
                continue;
            }
            let s = n.s;
            assert!(n.position.dist(point(s)) < 1e-9);
            let p = |k: f64| point(s + k * h);
            let d1 = ((p(1.0) - p(-1.0)) * 8.0 - (p(2.0) - p(-2.0))) / (12.0 * h);
            let d2 = ((p(1.0) + p(-1.0)) * 16.0 - (p(2.0) + p(-2.0)) - p(0.0) * 30.0) / (12.0 * h * h);
            let k = d1.cross(d2).abs() / d1.norm().powi(3);
            assert!((k - n.kappa_e.abs()).abs() < 1e-5 * k.max(1.0), "κ_E {k} vs {}", n.kappa_e);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn equidistant_is_symmetric_in_lambda() {
    for f in [fixtures::perturbed_ellipse(), fixtures::rosette(2), fixtures::w1()] {
        let an = analysis(f);
        for l in [0.2, 0.35] {
            let a = full_equidistant(&an, l).unwrap();
            let b = full_equidistant(&an, 1.0 - l).unwrap();
            let pa: Vec<Vec2> = a.iter().flat_map(|b| b.positions()).collect();
            let pb: Vec<Vec2> = b.iter().flat_map(|b| b.positions()).collect();
            let tol = 5.0 * max_spacing(&a).max(max_spacing(&b));
            assert!(hausdorff(&pa, &pb) < tol);
            let cusps = |v: &[equidist_core::Branch]| v.iter().map(|b| b.cusp_count()).sum::<usize>();
            assert_eq!(cusps(&a), cusps(&b));
        }
    }
}

#[test]
fn cusp_counts_are_affine_invariant() {
    let c = fixtures::perturbed_ellipse();
    let image = c.affine_image([[1.3, 0.4], [-0.2, 0.7]], Vec2::new(2.0, -1.0));
    let (a, b) = (analysis(c), analysis(image));
    for l in [0.3, 0.5] {
        let ca: usize = full_equidistant(&a, l).unwrap().iter().map(|b| b.cusp_count()).sum();
        let cb: usize = full_equidistant(&b, l).unwrap().iter().map(|b| b.cusp_count()).sum();
        assert_eq!(ca, cb, "λ = {l}");
    }
}

/// `x = sin t` and a `y` whose Taylor series at 0 is `t³ + σt⁴ + O(t⁵)`, so
/// the curve is the graph `y = x³ + σx⁴` to fourth order.
fn cubic_quartic(sigma: f64) -> FourierCurve {
    FourierCurve::new(vec![0.0, 0.0], vec![0.0, 1.0], vec![6.0 * sigma, -8.0 * sigma, 2.0 * sigma], vec![0.0, 2.0, -1.0]).unwrap()
}

#[test]
fn endpoint_closed_form_for_cubic_quartic_graphs() {
    for (sigma, want) in [(1.0, -8.0 / 3.0), (-1.0, 8.0 / 3.0)] {
        let c = cubic_quartic(sigma);
        let j = equidist_core::Curve::jet(&c, 0.0);
        assert!(j.det12().abs() < 1e-14);
        let an = analysis(c);
        for side in [ArcSide::Forward, ArcSide::Backward] {
            let e = classify_onshell_endpoint(&an, 0.0, side).unwrap();
            assert!((e.closed_form - want).abs() < 1e-12, "σ = {sigma}: {}", e.closed_form);
            assert!((e.ratio_limit + 1.0).abs() < 1e-5);
            assert!((e.derivative_limit - want).abs() < 1e-3, "σ = {sigma}: {}", e.derivative_limit);
        }
    }
}

#[test]
fn curvature_ratio_tends_to_minus_one_at_inflexions() {
    for f in [fixtures::w1(), fixtures::w2(), fixtures::eight_inflexions()] {
        let an = analysis(f.clone());
        for t in f.inflexions(&settings()).unwrap() {
            for side in [ArcSide::Forward, ArcSide::Backward] {
                let e = classify_onshell_endpoint(&an, t, side).unwrap();
                assert!((e.ratio_limit + 1.0).abs() < 1e-4, "ratio {}", e.ratio_limit);
                assert!(matches!(e.kind, EndpointType::Singular | EndpointType::C1Regular));
            }
        }
    }
}
