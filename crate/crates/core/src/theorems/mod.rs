//! Executable checks of the global results on equidistants.
//!
//! Every check returns a [`VerificationReport`]; checks whose hypotheses
//! fail on the given curve are reported as skipped. Check names start with
//! the curve label so reports of several curves can be merged.

mod intervals;
mod random;
mod report;

pub use intervals::{
    arc_pair_cusps, curved_sides, interval_samples, predict_singular_intervals, singular_intervals, ArcPair,
    SingularIntervalPrediction, Sides, TheoremError, ARC_SAMPLES, UNBOUNDED_SPAN,
};
pub use random::{
    aggregate_random, check_random, check_random_curve, random_curve, random_generic_curve, RandomCurve, RANDOM_MAX_DEGREE,
};
pub use report::{Check, Expected, Observed, Status, VerificationReport};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt::Display;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::Curve;
use crate::equidistant::{
    classify_onshell_endpoint, full_equidistant, trace_branch, ArcSide, Branch, CurveAnalysis, EndpointType,
    EquidistantError, HalfTurns,
};
use crate::equidistant::css_curve;
use crate::fixtures::{Fixture, FixtureKind};
use crate::geom::{circular_distance, hausdorff, modulo, Bounds, Vec2};
use crate::gluing::{Closure, GlueingScheme, LambdaClass, Parity};
use crate::settings::Settings;
use crate::FourierCurve;
#[allow(unused_imports)]
use num_traits::Float;

/// Generic λ values of the cusp-parity check.
pub const PARITY_GRID: [f64; 4] = [0.2, 0.3, 0.4, 0.45];

/// `(λ, δ)` pairs of the composition check.
pub const COMPOSITION_PAIRS: [(f64, f64); 3] = [(0.3, 0.3), (0.3, 0.5), (0.25, 0.4)];

/// Directions sampled by the direction-counting check.
pub const DIRECTIONS: usize = 64;

/// Parameter step of the local finite differences.
pub const FD_STEP: f64 = 5e-4;

/// Nodes closer than this (in normalised margin) to a cusp are left out
/// of the finite-difference comparisons.
pub const CUSP_CLEARANCE: f64 = 1e-2;

fn subject(an: &CurveAnalysis) -> String {
    an.curve.label.clone().unwrap_or_else(|| String::from("curve"))
}

fn named(an: &CurveAnalysis, rest: impl Display) -> String {
    format!("{}.{}", subject(an), rest)
}

fn err(e: impl Display) -> Observed {
    Observed::Error(e.to_string())
}

fn is_convex(an: &CurveAnalysis) -> bool {
    an.structure.inflexion_points().is_empty() && an.structure.angle.rotation().abs() == 1
}

/// `x − π·round(x/π)`.
fn wrap_half(x: f64) -> f64 {
    x - PI * (x / PI).round()
}

/// `δ(1 − λ) + λ(1 − δ)`, snapped to `0`, `½` and `1` when within rounding.
pub fn composed_lambda(lambda: f64, delta: f64) -> f64 {
    let l = delta * (1.0 - lambda) + lambda * (1.0 - delta);
    for exact in [0.0, 0.5, 1.0] {
        if (l - exact).abs() < 1e-12 {
            return exact;
        }
    }
    l
}

/// Largest distance between consecutive nodes.
pub fn max_spacing(branches: &[Branch]) -> f64 {
    branches
        .iter()
        .flat_map(|b| b.nodes.windows(2).map(|w| w[0].position.dist(w[1].position)))
        .fold(0.0, f64::max)
}

/// Unwrapped line angles (defined modulo π) of the segments of a polyline,
/// paired with the segment midpoints. Segments of zero length are skipped.
/// For a closed polyline the first segment is repeated at the end.
fn line_levels(points: &[Vec2], closed: bool) -> Vec<(f64, Vec2)> {
    let mut out: Vec<(f64, Vec2)> = Vec::with_capacity(points.len());
    for w in points.windows(2) {
        let d = w[1] - w[0];
        if d.norm() <= 1e-14 {
            continue;
        }
        let a = d.angle();
        let level = match out.last() {
            None => a,
            Some(&(p, _)) => p + wrap_half(a - p),
        };
        out.push((level, (w[0] + w[1]) * 0.5));
    }
    if closed && out.len() > 1 {
        let (last, _) = out[out.len() - 1];
        let (first, m) = out[0];
        out.push((last + wrap_half(first - last), m));
    }
    out
}

/// `E_δ` of a set of polylines: every point is paired with the points of
/// the polylines whose tangent lines are parallel to its own, found by
/// linear interpolation of the line angle between segment midpoints.
pub fn polyline_equidistant(lines: &[(Vec<Vec2>, bool)], delta: f64) -> Vec<Vec2> {
    let levels: Vec<Vec<(f64, Vec2)>> = lines.iter().map(|(p, c)| line_levels(p, *c)).collect();
    // edges as (lower level, upper level, line, edge), sorted by lower level
    let mut edges: Vec<(f64, f64, usize, usize)> = Vec::new();
    for (li, lv) in levels.iter().enumerate() {
        for (e, w) in lv.windows(2).enumerate() {
            if w[0].0 != w[1].0 {
                edges.push((w[0].0.min(w[1].0), w[0].0.max(w[1].0), li, e));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let span = edges.iter().fold(0.0f64, |m, e| m.max(e.1 - e.0));
    let (bottom, top) = edges.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e.0), b.max(e.1)));
    let mut out = Vec::new();
    for (li, lv) in levels.iter().enumerate() {
        let closed = lines[li].1;
        let queries = if closed { lv.len().saturating_sub(1) } else { lv.len() };
        for j in 0..queries {
            let (l, p) = lv[j];
            let mut k = ((bottom - l) / PI).ceil();
            while l + k * PI <= top {
                let v = l + k * PI;
                let first = edges.partition_point(|e| e.0 < v - span);
                for &(lo, hi, lk, e) in edges[first..].iter().take_while(|e| e.0 <= v) {
                    let own = lk == li && (e == j || e + 1 == j || (closed && j == 0 && e + 2 == lv.len()));
                    // a level on a shared node is taken from the edge above it
                    if own || v < lo || v >= hi && !(v == hi && hi == top) {
                        continue;
                    }
                    let (l0, p0) = levels[lk][e];
                    let (l1, p1) = levels[lk][e + 1];
                    let q = p0 + (p1 - p0) * ((v - l0) / (l1 - l0));
                    out.push(p * delta + q * (1.0 - delta));
                }
                k += 1.0;
            }
        }
    }
    out
}

/// How many times the tangent line of a polyline is parallel to the
/// direction `alpha`.
pub fn direction_matches(points: &[Vec2], closed: bool, alpha: f64) -> usize {
    let lv = line_levels(points, closed);
    lv.windows(2)
        .map(|w| {
            let a = ((w[0].0 - alpha) / PI).floor();
            let b = ((w[1].0 - alpha) / PI).floor();
            (a - b).abs() as usize
        })
        .sum()
}

/// Sign changes of the branch curvature along its nodes; cusps, inflexion
/// closure points and non-finite values are passed over.
pub fn curvature_sign_changes(branch: &Branch) -> usize {
    let signs: Vec<bool> = branch
        .nodes
        .iter()
        .filter(|n| !n.cusp && n.kappa_e.is_finite() && n.kappa_e != 0.0)
        .map(|n| n.kappa_e > 0.0)
        .collect();
    let mut changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if branch.closed && signs.len() > 1 && signs[0] != signs[signs.len() - 1] {
        changes += 1;
    }
    changes
}

/// A closed branch without cusps whose curvature keeps its sign.
pub fn is_regular_convex(branch: &Branch) -> bool {
    branch.closed && branch.cusps.is_empty() && branch.inflexions.is_empty() && curvature_sign_changes(branch) == 0
}

fn rotations(branches: &[&Branch]) -> Vec<i64> {
    branches.iter().filter_map(|b| b.rotation.map(|r| r.0)).collect()
}

fn passes_inflexion(scheme: &GlueingScheme, an: &CurveAnalysis) -> bool {
    scheme.columns.iter().any(|&(a, b)| a == b && an.structure.points[a].inflexion.is_some())
}

fn on_shell(b: &Branch) -> bool {
    b.scheme.as_ref().and_then(|s| s.closure) == Some(Closure::OnShell)
}

/// Checks on curves with a centre of symmetry: `E_λ` is `M` scaled by
/// `2λ − 1` about the centre, and the Wigner caustic is the centre.
pub fn check_analytic(an: &CurveAnalysis, lambdas: &[f64]) -> VerificationReport {
    let mut r = VerificationReport::new();
    if !an.curve.is_centrally_symmetric() {
        r.push(Check::skipped(named(an, "analytic"), Expected::Truth, "curve has no centre of symmetry"));
        return r;
    }
    let c = Vec2::new(an.curve.xc[0], an.curve.yc[0]);
    let traced = |lambda: f64| -> Result<Vec<Branch>, EquidistantError> {
        let class = LambdaClass::of(lambda).ok_or(EquidistantError::InvalidLambda(lambda))?;
        an.schemes(class)?.iter().map(|s| trace_branch(an, s, lambda)).collect()
    };
    for &lambda in lambdas {
        let (dev, kap) = match traced(lambda) {
            Ok(bs) => {
                let f = 2.0 * lambda - 1.0;
                let mut dev = 0.0f64;
                let mut kap = 0.0f64;
                for n in bs.iter().flat_map(|b| b.nodes.iter()) {
                    let a = an.curve.point(n.s);
                    dev = dev.max(n.position.dist(c + (a - c) * f));
                    let expect = an.curve.kappa(n.s) / f.abs();
                    kap = kap.max((n.kappa_e.abs() - expect.abs()).abs() / expect.abs());
                }
                (Observed::Real(dev), Observed::Real(kap))
            }
            Err(e) => (err(&e), err(&e)),
        };
        r.check(named(an, format!("analytic.l{lambda}.scaled_deviation")), Expected::Below(1e-8), dev);
        r.check(named(an, format!("analytic.l{lambda}.curvature_rel_err")), Expected::Below(1e-8), kap);
    }
    let diam = match traced(0.5) {
        Ok(bs) => Observed::Real(Bounds::of(bs.iter().flat_map(|b| b.positions())).diameter()),
        Err(e) => err(e),
    };
    r.check(named(an, "analytic.wigner_diameter"), Expected::Below(1e-6), diam);
    r
}

/// Cusp parities of a generic convex curve: odd (at least 3) for the
/// Wigner caustic, even for every other λ of the grid, and a Centre
/// Symmetry Set with an odd number of cusps, at least 3 and at least as
/// many as the Wigner caustic.
pub fn check_cusp_parity(an: &CurveAnalysis, grid: &[f64]) -> VerificationReport {
    let mut r = VerificationReport::new();
    let mut names: Vec<(String, Expected)> = alloc::vec![
        (named(an, "parity.half.cusps"), Expected::Parity(Parity::Odd)),
        (named(an, "parity.half.cusps_min"), Expected::AtLeast(3)),
        (named(an, "parity.css.cusps"), Expected::Parity(Parity::Odd)),
        (named(an, "parity.css.cusps_min"), Expected::AtLeast(3)),
    ];
    for &l in grid {
        names.push((named(an, format!("parity.l{l}.cusps")), Expected::Parity(Parity::Even)));
    }
    let generic = an.curve.genericity(&an.settings);
    let reason = if !generic.is_generic() {
        Some("curve is not generic")
    } else if !is_convex(an) {
        Some("curve is not convex")
    } else {
        None
    };
    if let Some(reason) = reason {
        for (n, e) in names {
            r.push(Check::skipped(n, e, reason));
        }
        r.push(Check::skipped(named(an, "parity.css.cusps_vs_half"), Expected::AtLeast(0), reason));
        return r;
    }
    let cusps = |l: f64| full_equidistant(an, l).map(|bs| bs.iter().map(Branch::cusp_count).sum::<usize>());
    let half = cusps(0.5);
    let obs = |x: &Result<usize, EquidistantError>| match x {
        Ok(n) => Observed::Count(*n),
        Err(e) => err(e),
    };
    r.check(names[0].0.clone(), names[0].1.clone(), obs(&half));
    r.check(names[1].0.clone(), names[1].1.clone(), obs(&half));
    let css = css_curve(an).map(|c| c.cusp_count());
    r.check(names[2].0.clone(), names[2].1.clone(), obs(&css));
    r.check(names[3].0.clone(), names[3].1.clone(), obs(&css));
    let vs = match &half {
        Ok(h) => Expected::AtLeast(*h),
        Err(_) => Expected::AtLeast(usize::MAX),
    };
    r.check(named(an, "parity.css.cusps_vs_half"), vs, obs(&css));
    for (i, &l) in grid.iter().enumerate() {
        let (n, e) = &names[4 + i];
        match cusps(l) {
            Err(EquidistantError::TangentialRoot { .. }) => {
                r.push(Check::skipped(n.clone(), e.clone(), "λ is not generic: the singularity margin touches zero"))
            }
            c => r.check(n.clone(), e.clone(), obs(&c)),
        }
    }
    r
}

/// Distance between `E_δ(E_λ(M))` and `E_Λ(M)`, `Λ = δ(1 − λ) + λ(1 − δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Composition {
    pub lambda: f64,
    pub delta: f64,
    pub composed: f64,
    pub hausdorff: f64,
    /// Largest node spacing of the two traced sets.
    pub spacing: f64,
}

pub fn composition(an: &CurveAnalysis, lambda: f64, delta: f64) -> Result<Composition, EquidistantError> {
    let inner = full_equidistant(an, lambda)?;
    let lines: Vec<(Vec<Vec2>, bool)> = inner.iter().map(|b| (b.positions(), b.closed)).collect();
    let composed_pts = polyline_equidistant(&lines, delta);
    let big = composed_lambda(lambda, delta);
    let target = full_equidistant(an, big)?;
    let pts: Vec<Vec2> = target.iter().flat_map(|b| b.positions()).collect();
    Ok(Composition {
        lambda,
        delta,
        composed: big,
        hausdorff: hausdorff(&composed_pts, &pts),
        spacing: max_spacing(&inner).max(max_spacing(&target)),
    })
}

/// Composition of equidistants on a convex curve, with tolerance five
/// node spacings.
pub fn check_composition(an: &CurveAnalysis, lambda: f64, delta: f64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let name = named(an, format!("composition.l{lambda}.d{delta}"));
    if !is_convex(an) || lambda == 0.5 {
        r.push(Check::skipped(name, Expected::Below(0.0), "needs a convex curve and λ ≠ 1/2"));
        return r;
    }
    match composition(an, lambda, delta) {
        Ok(c) => r.check(name, Expected::Below(5.0 * c.spacing), Observed::Real(c.hausdorff)),
        Err(e) => r.check(name, Expected::Below(0.0), err(e)),
    }
    r
}

/// `δ` for which `E_δ(E_λ(M)) = M`.
pub fn reconstruction_delta(lambda: f64) -> f64 {
    -lambda / (1.0 - 2.0 * lambda)
}

pub fn check_reconstruction(an: &CurveAnalysis, lambda: f64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let name = named(an, format!("reconstruction.l{lambda}"));
    if !is_convex(an) || lambda == 0.5 {
        r.push(Check::skipped(name, Expected::Below(0.0), "needs a convex curve and λ ≠ 1/2"));
        return r;
    }
    match composition(an, lambda, reconstruction_delta(lambda)) {
        Ok(c) => r.check(name, Expected::Below(5.0 * c.spacing), Observed::Real(c.hausdorff)),
        Err(e) => r.check(name, Expected::Below(0.0), err(e)),
    }
    r
}

/// `E_λ(M)` and `E_{1−λ}(M)` coincide as traced point sets.
pub fn check_symmetry(an: &CurveAnalysis, lambda: f64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let pts = |l: f64| full_equidistant(an, l).map(|bs| bs.iter().flat_map(|b| b.positions()).collect::<Vec<_>>());
    let obs = match (pts(lambda), pts(1.0 - lambda)) {
        (Ok(a), Ok(b)) => Observed::Real(hausdorff(&a, &b)),
        (Err(e), _) | (_, Err(e)) => err(e),
    };
    r.check(named(an, format!("symmetry.l{lambda}")), Expected::Below(1e-6), obs);
    r
}

/// On a convex curve every tangent direction occurs once on the Wigner
/// caustic and twice on any other equidistant.
pub fn check_direction_counting(an: &CurveAnalysis, lambda: f64, seed: u64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let names = [named(an, "directions.half"), named(an, format!("directions.l{lambda}"))];
    if !is_convex(an) {
        for n in names {
            r.push(Check::skipped(n, Expected::Count(0), "curve is not convex"));
        }
        return r;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas: Vec<f64> = (0..DIRECTIONS).map(|_| rng.gen_range(0.0..PI)).collect();
    for (name, (l, expect)) in names.into_iter().zip([(0.5, 1usize), (lambda, 2)]) {
        let obs = match full_equidistant(an, l) {
            Ok(bs) => Observed::Count(
                alphas
                    .iter()
                    .filter(|&&a| bs.iter().map(|b| direction_matches(&b.positions(), b.closed, a)).sum::<usize>() != expect)
                    .count(),
            ),
            Err(e) => err(e),
        };
        r.check(name, Expected::Count(0), obs);
    }
    r
}

/// Pair at angle offset `u` on step `si`, solved afresh from the curve
/// between the two nodes around `u`.
fn pair_at(an: &CurveAnalysis, branch: &Branch, si: usize, u: f64) -> Option<(f64, f64)> {
    let scheme = branch.scheme.as_ref()?;
    let st = scheme.steps[si];
    let nodes = branch.step_nodes(si);
    let (u0, u1) = (nodes[0].u, nodes[nodes.len() - 1].u);
    let i = if u0 <= u1 { nodes.partition_point(|n| n.u < u) } else { nodes.partition_point(|n| n.u > u) };
    let i = i.clamp(1, nodes.len() - 1);
    let (l, r) = (&nodes[i - 1], &nodes[i]);
    an.pair_at(st.top, st.bottom, u, (l.s, l.t), (r.s, r.t))
}

fn point_at(an: &CurveAnalysis, branch: &Branch, si: usize, u: f64) -> Option<Vec2> {
    let (s, t) = pair_at(an, branch, si, u)?;
    Some(an.curve.point(s) * branch.lambda + an.curve.point(t) * (1.0 - branch.lambda))
}

/// Largest errors of the branch curvature and of the branch tangent
/// against finite differences of freshly solved nearby points. The
/// stencil steps in the curve parameter on the side of smaller curvature,
/// which stays a regular parameter of the branch near the ends of a step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CrossValidation {
    pub nodes: usize,
    pub curvature_rel_err: f64,
    pub tangent_err: f64,
}

pub fn cross_validate(an: &CurveAnalysis, branch: &Branch) -> CrossValidation {
    let mut out = CrossValidation::default();
    let Some(scheme) = branch.scheme.as_ref() else {
        return out;
    };
    let h = FD_STEP;
    for (si, st) in scheme.steps.iter().enumerate() {
        let nodes = branch.step_nodes(si);
        let (u0, u1) = (nodes[0].u, nodes[nodes.len() - 1].u);
        let (ul, uh) = (u0.min(u1), u0.max(u1));
        for n in &nodes {
            if n.cusp || !n.margin.is_finite() || n.margin.abs() < CUSP_CLEARANCE {
                continue;
            }
            let (arc, x) = if n.kappa_a.abs() <= n.kappa_b.abs() { (st.top, n.s) } else { (st.bottom, n.t) };
            let (um, up) = (an.offset_on(arc, x - h), an.offset_on(arc, x + h));
            if [um, up].iter().any(|&u| u <= ul || u >= uh) || (um - n.u) * (up - n.u) >= 0.0 {
                continue;
            }
            let at = |dx: f64| point_at(an, branch, si, an.offset_on(arc, x + dx));
            let pts = [at(-h), at(-0.5 * h), Some(n.position), at(0.5 * h), at(h)];
            let [Some(m2), Some(m1), Some(p), Some(p1), Some(p2)] = pts else {
                continue;
            };
            // central differences in the stencil parameter, Richardson-extrapolated
            let d1 = ((p1 - m1) * 8.0 - (p2 - m2)) * (1.0 / (6.0 * h));
            let d2 = ((p1 + m1 - p * 2.0) * 16.0 - (p2 + m2 - p * 2.0)) * (1.0 / (3.0 * h * h));
            let mut k = d1.cross(d2) / d1.norm().powi(3);
            if (um > up) == st.ascending {
                k = -k;
            }
            out.curvature_rel_err = out.curvature_rel_err.max((k - n.kappa_e).abs() / n.kappa_e.abs());
            let tangent = d1.angle();
            out.tangent_err = out.tangent_err.max(wrap_half(tangent - an.curve.tangent_angle(n.s)).abs());
            out.nodes += 1;
        }
    }
    out
}

/// Branch curvature and tangent against finite differences, and the
/// limit `κ(s)/κ(t(s)) → −1` at every inflexion.
pub fn check_cross_validation(an: &CurveAnalysis, lambda: f64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let (cn, tn) = (named(an, format!("crosscheck.l{lambda}.curvature")), named(an, format!("crosscheck.l{lambda}.tangent")));
    match full_equidistant(an, lambda) {
        Ok(bs) => {
            let mut total = CrossValidation::default();
            for b in &bs {
                let c = cross_validate(an, b);
                total.nodes += c.nodes;
                total.curvature_rel_err = total.curvature_rel_err.max(c.curvature_rel_err);
                total.tangent_err = total.tangent_err.max(c.tangent_err);
            }
            r.check(cn, Expected::Below(1e-4), Observed::Real(total.curvature_rel_err));
            r.check(tn, Expected::Below(1e-6), Observed::Real(total.tangent_err));
            r.check(named(an, format!("crosscheck.l{lambda}.nodes")), Expected::AtLeast(1), Observed::Count(total.nodes));
        }
        Err(e) => {
            r.check(cn, Expected::Below(1e-4), err(&e));
            r.check(tn, Expected::Below(1e-6), err(&e));
        }
    }
    let infl = an.structure.inflexion_points();
    if !infl.is_empty() {
        let mut worst = Ok(0.0f64);
        for &k in &infl {
            for side in [ArcSide::Forward, ArcSide::Backward] {
                match classify_onshell_endpoint(an, an.structure.points[k].t, side) {
                    Ok(c) => {
                        if let Ok(w) = worst.as_mut() {
                            *w = w.max((c.ratio_limit + 1.0).abs());
                        }
                    }
                    Err(e) => worst = Err(e),
                }
            }
        }
        let obs = match worst {
            Ok(w) => Observed::Real(w),
            Err(e) => err(e),
        };
        r.check(named(an, "crosscheck.ratio_limit"), Expected::Below(1e-3), obs);
    }
    r
}

/// Common tangent lines of `M`: pairs whose chord is parallel to their
/// tangents, as `(step, s, t, angle error)` where the error compares the
/// branch tangent with the bitangent line.
pub fn bitangents(an: &CurveAnalysis, branch: &Branch) -> Vec<(usize, f64, f64, f64)> {
    let mut out = Vec::new();
    let Some(scheme) = branch.scheme.as_ref() else {
        return out;
    };
    let chord = |s: f64, t: f64| {
        let j = an.curve.jet(s);
        let d = an.curve.point(t) - j.p;
        j.tangent().cross(d) / d.norm()
    };
    for si in 0..scheme.steps.len() {
        let nodes: Vec<_> = branch.step_nodes(si).into_iter().filter(|n| !n.cusp && n.margin.is_finite()).collect();
        for w in nodes.windows(2) {
            let (fl, fr) = (chord(w[0].s, w[0].t), chord(w[1].s, w[1].t));
            if (fl < 0.0) == (fr < 0.0) {
                continue;
            }
            let f = |u: f64| pair_at(an, branch, si, u).map(|(s, t)| chord(s, t)).unwrap_or(f64::NAN);
            let u = crate::roots::bisect(f, w[0].u, w[1].u, fl, an.settings.tol.root_width);
            let h = FD_STEP;
            let (Some(m), Some(a), Some(b)) =
                (pair_at(an, branch, si, u), point_at(an, branch, si, u - h), point_at(an, branch, si, u + h))
            else {
                continue;
            };
            let line = an.curve.point(m.1) - an.curve.point(m.0);
            let err = wrap_half((b - a).angle() - line.angle()).abs();
            out.push((si, m.0, m.1, err));
        }
    }
    out
}

/// `E_λ` is tangent to every bitangent line of `M` at the corresponding
/// point.
pub fn check_bitangents(an: &CurveAnalysis, lambda: f64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let (cn, an_) = (named(an, format!("bitangents.l{lambda}.count")), named(an, format!("bitangents.l{lambda}.angle")));
    match full_equidistant(an, lambda) {
        Ok(bs) => {
            let found: Vec<_> = bs.iter().flat_map(|b| bitangents(an, b)).collect();
            let worst = found.iter().map(|x| x.3).fold(0.0, f64::max);
            r.check(cn, Expected::AtLeast(1), Observed::Count(found.len()));
            r.check(an_, Expected::Below(1e-5), Observed::Real(worst));
        }
        Err(e) => {
            r.check(cn, Expected::AtLeast(1), err(&e));
            r.check(an_, Expected::Below(1e-5), err(&e));
        }
    }
    r
}

/// Traced branches against what their schemes predict: cusp parity and
/// half-integer rotation of closed branches, the number of inflexions
/// against the sign changes of the branch curvature, and even inflexion
/// counts.
pub fn check_branch_predictions(an: &CurveAnalysis, lambda: f64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let keys = ["cusp_parity", "rotation_class", "inflexion_sign_changes", "inflexion_parity"];
    match full_equidistant(an, lambda) {
        Ok(bs) => {
            let mut bad = [0usize; 4];
            for b in &bs {
                let Some(scheme) = b.scheme.as_ref() else { continue };
                let p = scheme.predict(&an.structure);
                if let Some(par) = p.cusp_parity {
                    bad[0] += usize::from(par != Parity::of(b.cusp_count()));
                }
                if let (Some(rc), Some(rot)) = (p.rotation, b.rotation) {
                    let half = rc == crate::gluing::RotationClass::HalfInteger;
                    bad[1] += usize::from(half != rot.is_half_integer());
                }
                bad[2] += usize::from(curvature_sign_changes(b) != b.inflexions.len() || p.inflexions != b.inflexions.len());
                bad[3] += usize::from(b.inflexions.len() % 2 != 0);
            }
            for (k, n) in keys.iter().zip(bad) {
                r.check(named(an, format!("predictions.l{lambda}.{k}")), Expected::Count(0), Observed::Count(n));
            }
        }
        Err(e) => {
            for k in keys {
                r.check(named(an, format!("predictions.l{lambda}.{k}")), Expected::Count(0), err(&e));
            }
        }
    }
    r
}

/// Total inflexion counts `2m − 2n` (Wigner caustic) and `4m − 2n` (other
/// λ) for `#S_M = 2m` and `2n` inflexions, and every branch inflexion on a
/// chord through an inflexion of `M`.
pub fn check_inflexion_counts(an: &CurveAnalysis, lambda: f64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let infl: Vec<f64> = an.structure.inflexion_points().iter().map(|&k| an.structure.points[k].t).collect();
    let m = an.structure.points.len() / 2;
    let n = infl.len() / 2;
    let (eh, eg) = if n == 0 { (0, 0) } else { (2 * m - 2 * n, 4 * m - 2 * n) };
    for (l, e, key) in [(0.5, eh, "half"), (lambda, eg, "generic")] {
        let name = named(an, format!("inflexions.{key}.total"));
        let chord = named(an, format!("inflexions.{key}.off_chord"));
        match full_equidistant(an, l) {
            Ok(bs) => {
                r.check(name, Expected::Count(e), Observed::Count(bs.iter().map(|b| b.inflexions.len()).sum()));
                let off = bs
                    .iter()
                    .flat_map(|b| b.inflexions.iter().map(move |&i| &b.nodes[i]))
                    .filter(|nd| !infl.iter().any(|&x| circular_distance(x, nd.s, TAU) < 1e-9 || circular_distance(x, nd.t, TAU) < 1e-9))
                    .count();
                r.check(chord, Expected::Count(0), Observed::Count(off));
            }
            Err(e2) => {
                r.check(name, Expected::Count(e), err(&e2));
                r.check(chord, Expected::Count(0), err(&e2));
            }
        }
    }
    r
}

/// Parity checks on the Wigner-caustic branches that end at inflexions:
/// the cusp count is odd exactly when one endpoint is singular, the
/// branch and the arc of `M` between its ends carry even numbers of
/// inflexions, and the numeric endpoint derivative agrees in sign with
/// the closed form.
pub fn check_onshell_parity(an: &CurveAnalysis) -> VerificationReport {
    let mut r = VerificationReport::new();
    let bs = match full_equidistant(an, 0.5) {
        Ok(bs) => bs,
        Err(e) => {
            r.check(named(an, "onshell"), Expected::Truth, err(e));
            return r;
        }
    };
    let infl = an.curve.inflexions(&an.settings).unwrap_or_default();
    for (i, b) in bs.iter().filter(|b| on_shell(b)).enumerate() {
        let Some((t1, t2)) = b.endpoints else { continue };
        let ends = (classify_onshell_endpoint(an, t1, ArcSide::Forward), classify_onshell_endpoint(an, t2, ArcSide::Backward));
        let name = named(an, format!("onshell.{i}.cusp_parity"));
        match ends {
            (Ok(a), Ok(c)) => {
                let odd = (a.kind == EndpointType::Singular) != (c.kind == EndpointType::Singular);
                let par = if odd { Parity::Odd } else { Parity::Even };
                r.check(name, Expected::Parity(par), Observed::Count(b.cusp_count()));
                let agree = [a, c].iter().all(|e| (e.derivative_limit > 0.0) == (e.closed_form > 0.0));
                r.check(named(an, format!("onshell.{i}.closed_form_sign")), Expected::Truth, Observed::Truth(agree));
            }
            (Err(e), _) | (_, Err(e)) => r.check(name, Expected::Parity(Parity::Even), err(e)),
        }
        let span = modulo(t2 - t1, TAU);
        let inner = infl
            .iter()
            .filter(|&&x| {
                let d = modulo(x - t1, TAU);
                d > 1e-9 && d < span - 1e-9
            })
            .count();
        r.check(named(an, format!("onshell.{i}.arc_inflexions")), Expected::Parity(Parity::Even), Observed::Count(inner));
        r.check(named(an, format!("onshell.{i}.inflexions")), Expected::Parity(Parity::Even), Observed::Count(b.inflexions.len()));
    }
    r
}

/// Self-intersections of `M` as parameter pairs `(s₁, s₂)`, `s₁ < s₂`,
/// found on a polyline with `n` vertices and refined by Newton's method.
pub fn self_intersections(curve: &FourierCurve, n: usize) -> Vec<(f64, f64)> {
    let ts: Vec<f64> = (0..=n).map(|i| TAU * i as f64 / n as f64).collect();
    let pts: Vec<Vec2> = ts.iter().map(|&t| curve.point(t)).collect();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let (p0, p1) = (pts[i], pts[i + 1]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (q0, q1) = (pts[j], pts[j + 1]);
            let (d, e) = (p1 - p0, q1 - q0);
            let den = d.cross(e);
            if den == 0.0 {
                continue;
            }
            let w = q0 - p0;
            let (a, b) = (w.cross(e) / den, w.cross(d) / den);
            if !(0.0..1.0).contains(&a) || !(0.0..1.0).contains(&b) {
                continue;
            }
            let (mut s1, mut s2) = (ts[i] + a * (ts[i + 1] - ts[i]), ts[j] + b * (ts[j + 1] - ts[j]));
            for _ in 0..20 {
                let (ja, jb) = (curve.jet(s1), curve.jet(s2));
                let f = ja.p - jb.p;
                let det = ja.d1.cross(-jb.d1);
                if det == 0.0 {
                    break;
                }
                let ds1 = f.cross(-jb.d1) / det;
                let ds2 = ja.d1.cross(f) / det;
                s1 -= ds1;
                s2 -= ds2;
                if ds1.abs() + ds2.abs() < 1e-15 {
                    break;
                }
            }
            let (s1, s2) = (modulo(s1, TAU), modulo(s2, TAU));
            let pair = if s1 < s2 { (s1, s2) } else { (s2, s1) };
            if !out.iter().any(|q| (q.0 - pair.0).abs() < 1e-9 && (q.1 - pair.1).abs() < 1e-9) {
                out.push(pair);
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

fn within(x: f64, arc: (f64, f64)) -> bool {
    let d = modulo(x - arc.0, TAU);
    d > 1e-9 && d < arc.1 - arc.0 - 1e-9
}

/// Loops of `M`: arcs `(s₁, s₂)` (with `s₂ > s₁`, possibly past `2π`)
/// between the two passes through a self-intersection that contain no
/// other self-intersection and along which the curvature keeps its sign.
pub fn loops(curve: &FourierCurve, n: usize) -> Vec<(f64, f64)> {
    let xs = self_intersections(curve, n);
    let mut out = Vec::new();
    for &(a, b) in &xs {
        for arc in [(a, b), (b, a + TAU)] {
            let simple = !xs.iter().any(|&(u, v)| (u, v) != (a, b) && within(u, arc) && within(v, arc));
            let k0 = curve.kappa(arc.0);
            let convex = (0..=64).all(|i| {
                let t = arc.0 + (arc.1 - arc.0) * i as f64 / 64.0;
                curve.kappa(t) * k0 > 0.0
            });
            if simple && convex {
                out.push(arc);
            }
        }
    }
    out
}

/// Wigner-caustic cusps whose source pair lies in a loop, as
/// `(loop, branch)` index pairs.
fn loop_cusps(loops: &[(f64, f64)], half: &[Branch]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (li, &arc) in loops.iter().enumerate() {
        for (bi, b) in half.iter().enumerate() {
            for c in &b.cusps {
                if within(c.s, arc) && within(c.t, arc) {
                    out.push((li, bi));
                }
            }
        }
    }
    out
}

/// The Wigner caustic of every loop of `M` has a cusp.
pub fn check_loops(an: &CurveAnalysis) -> VerificationReport {
    let mut r = VerificationReport::new();
    let ls = loops(&an.curve, 1024);
    r.check(named(an, "loops.count"), Expected::AtLeast(1), Observed::Count(ls.len()));
    match full_equidistant(an, 0.5) {
        Ok(half) => {
            let lc = loop_cusps(&ls, &half);
            for li in 0..ls.len() {
                let n = lc.iter().filter(|x| x.0 == li).count();
                r.check(named(an, format!("loops.{li}.wigner_cusps")), Expected::AtLeast(1), Observed::Count(n));
            }
        }
        Err(e) => r.check(named(an, "loops.wigner_cusps"), Expected::AtLeast(1), err(e)),
    }
    r
}

/// The branch counts, rotation numbers and cusp parities of a rosette
/// `C_n`.
pub fn check_rosette(an: &CurveAnalysis, n: usize) -> VerificationReport {
    let mut r = VerificationReport::new();
    let nm = |k: &str| named(an, format!("rosette.{k}"));
    let n2 = 2 * n as i64;
    r.check(nm("rotation"), Expected::Count(n), Observed::Count(an.structure.angle.rotation().unsigned_abs() as usize));
    r.check(nm("parallel_points"), Expected::Count(2 * n), Observed::Count(an.structure.points.len()));
    r.check(nm("inflexions"), Expected::Count(0), Observed::Count(an.structure.inflexion_points().len()));
    match full_equidistant(an, 0.5) {
        Ok(half) => {
            let refs: Vec<&Branch> = half.iter().collect();
            r.check(nm("half.branches"), Expected::Count(n), Observed::Count(half.len()));
            r.check(
                nm("half.regular_branches"),
                Expected::AtLeast(n / 2),
                Observed::Count(half.iter().filter(|b| is_regular_convex(b)).count()),
            );
            let mut rot = alloc::vec![n2; n - 1];
            rot.push(n as i64);
            r.check(nm("half.rotations"), Expected::Multiset(rot), Observed::Multiset(rotations(&refs)));
            r.check(
                nm("half.odd_cusp_branches"),
                Expected::Count(n % 2),
                Observed::Count(half.iter().filter(|b| b.cusp_count() % 2 == 1).count()),
            );
            r.check(nm("half.cusps"), Expected::AtLeast(2), Observed::Count(half.iter().map(Branch::cusp_count).sum()));
            let lc = loop_cusps(&loops(&an.curve, 1024), &half);
            let mut branches: Vec<usize> = lc.iter().map(|x| x.1).collect();
            branches.sort_unstable();
            branches.dedup();
            r.check(nm("half.loop_cusp_branches"), Expected::AtMost(1), Observed::Count(branches.len()));
        }
        Err(e) => r.check(nm("half.branches"), Expected::Count(n), err(e)),
    }
    for (l, key, min_regular) in [(0.4, "generic", n - 1), (-0.3, "outside", n)] {
        match full_equidistant(an, l) {
            Ok(bs) => {
                let refs: Vec<&Branch> = bs.iter().collect();
                r.check(nm(&format!("{key}.branches")), Expected::Count(2 * n - 1), Observed::Count(bs.len()));
                r.check(
                    nm(&format!("{key}.rotations")),
                    Expected::Multiset(alloc::vec![n2; 2 * n - 1]),
                    Observed::Multiset(rotations(&refs)),
                );
                r.check(
                    nm(&format!("{key}.regular_branches")),
                    Expected::AtLeast(min_regular),
                    Observed::Count(bs.iter().filter(|b| is_regular_convex(b)).count()),
                );
            }
            Err(e) => r.check(nm(&format!("{key}.branches")), Expected::Count(2 * n - 1), err(e)),
        }
    }
    r
}

/// The branch counts, rotation numbers and inflexion counts of a curve
/// `W_n` with two inflexions.
pub fn check_wn(an: &CurveAnalysis, n: usize) -> VerificationReport {
    let mut r = VerificationReport::new();
    let nm = |k: &str| named(an, format!("wn.{k}"));
    let n2 = 2 * n as i64;
    r.check(nm("rotation"), Expected::Count(n), Observed::Count(an.structure.angle.rotation().unsigned_abs() as usize));
    r.check(nm("inflexions"), Expected::Count(2), Observed::Count(an.structure.inflexion_points().len()));
    match full_equidistant(an, 0.5) {
        Ok(half) => {
            r.check(nm("half.branches"), Expected::Count(n + 1), Observed::Count(half.len()));
            r.check(nm("half.on_shell"), Expected::Count(1), Observed::Count(half.iter().filter(|b| on_shell(b)).count()));
            let closed: Vec<&Branch> = half.iter().filter(|b| !on_shell(b)).collect();
            let mut rot = alloc::vec![n2; n - 1];
            rot.push(n as i64);
            r.check(nm("half.rotations"), Expected::Multiset(rot), Observed::Multiset(rotations(&closed)));
            let mut infl = alloc::vec![4i64; n - 1];
            infl.extend([2, 2]);
            r.check(
                nm("half.inflexions"),
                Expected::Multiset(infl),
                Observed::Multiset(half.iter().map(|b| b.inflexions.len() as i64).collect()),
            );
            r.check(
                nm("half.odd_cusp_branches"),
                Expected::Count(n % 2),
                Observed::Count(closed.iter().filter(|b| b.cusp_count() % 2 == 1).count()),
            );
            for b in half.iter().filter(|b| on_shell(b)) {
                r.check(nm("half.on_shell_inflexions"), Expected::Parity(Parity::Even), Observed::Count(b.inflexions.len()));
            }
        }
        Err(e) => r.check(nm("half.branches"), Expected::Count(n + 1), err(e)),
    }
    match full_equidistant(an, 0.3) {
        Ok(bs) => {
            r.check(nm("generic.branches"), Expected::Count(2 * n), Observed::Count(bs.len()));
            let through = |b: &Branch| b.scheme.as_ref().is_some_and(|s| passes_inflexion(s, an));
            let others: Vec<&Branch> = bs.iter().filter(|b| !through(b)).collect();
            r.check(
                nm("generic.through_inflexions"),
                Expected::Count(1),
                Observed::Count(bs.len() - others.len()),
            );
            r.check(
                nm("generic.rotations"),
                Expected::Multiset(alloc::vec![n2; 2 * n - 1]),
                Observed::Multiset(rotations(&others)),
            );
            let mut infl = alloc::vec![4i64; 2 * n - 1];
            infl.push(6);
            r.check(
                nm("generic.inflexions"),
                Expected::Multiset(infl),
                Observed::Multiset(bs.iter().map(|b| b.inflexions.len() as i64).collect()),
            );
            let six = bs.iter().filter(|b| through(b)).all(|b| b.inflexions.len() == 6);
            r.check(nm("generic.six_on_connecting_branch"), Expected::Truth, Observed::Truth(six));
        }
        Err(e) => r.check(nm("generic.branches"), Expected::Count(2 * n), err(e)),
    }
    r
}

/// Every λ of the grid gives an equidistant with at least one cusp.
pub fn check_singular_for_all(an: &CurveAnalysis, grid: &[f64]) -> VerificationReport {
    let mut r = VerificationReport::new();
    for &l in grid {
        let obs = match full_equidistant(an, l) {
            Ok(bs) => Observed::Count(bs.iter().map(Branch::cusp_count).sum()),
            Err(e) => err(e),
        };
        r.check(named(an, format!("singular.l{l}")), Expected::AtLeast(1), obs);
    }
    r
}

/// Interior grid `j/16`, `j = 1, …, 15`.
pub fn unit_grid() -> Vec<f64> {
    (1..16).map(|j| j as f64 / 16.0).collect()
}

/// Predicted singular λ for two arcs, checked at eight values in each
/// predicted interval.
pub fn check_singular_intervals(an: &CurveAnalysis, pair: ArcPair) -> VerificationReport {
    let mut r = VerificationReport::new();
    let pred = match predict_singular_intervals(an, pair) {
        Ok(p) => p,
        Err(e) => {
            r.check(named(an, "intervals.hypotheses"), Expected::Truth, err(e));
            return r;
        }
    };
    r.check(named(an, "intervals.hypotheses"), Expected::Truth, Observed::Truth(true));
    for (i, &iv) in pred.intervals.iter().enumerate() {
        for (j, l) in interval_samples(iv).into_iter().enumerate() {
            let obs = match arc_pair_cusps(an, pair, l) {
                Ok(c) => Observed::Count(c),
                Err(e) => err(e),
            };
            r.check(named(an, format!("intervals.{i}.{j}.cusps")), Expected::AtLeast(1), obs);
        }
    }
    r
}

/// Runs every check that applies to a built-in fixture.
pub fn verify_fixture(fixture: &Fixture, settings: Settings) -> VerificationReport {
    let mut r = VerificationReport::new();
    let an = match CurveAnalysis::new(fixture.curve.clone(), settings) {
        Ok(an) => an,
        Err(e) => {
            r.check(format!("{}.analysis", fixture.name), Expected::Truth, err(e));
            return r;
        }
    };
    let an = &an;
    match fixture.kind {
        FixtureKind::Analytic => {
            r.merge(check_analytic(an, &[0.2, 0.3, 0.4]));
            r.merge(check_cusp_parity(an, &PARITY_GRID));
        }
        FixtureKind::Convex => {
            r.merge(check_cusp_parity(an, &PARITY_GRID));
            for (l, d) in COMPOSITION_PAIRS {
                r.merge(check_composition(an, l, d));
            }
            r.merge(check_reconstruction(an, 0.3));
            r.merge(check_direction_counting(an, 0.3, 7));
            r.merge(check_symmetry(an, 0.3));
            r.merge(check_branch_predictions(an, 0.5));
            r.merge(check_branch_predictions(an, 0.3));
            r.merge(check_cross_validation(an, 0.3));
            r.merge(check_inflexion_counts(an, 0.3));
            if fixture.name == "three-lobed" {
                r.merge(check_singular_intervals(an, crate::fixtures::three_lobed_arcs()));
            }
        }
        FixtureKind::Rosette(n) => {
            r.merge(check_rosette(an, n as usize));
            r.merge(check_loops(an));
            r.merge(check_symmetry(an, 0.3));
            r.merge(check_branch_predictions(an, 0.5));
            r.merge(check_branch_predictions(an, 0.4));
        }
        FixtureKind::TwoInflexion(n) => {
            r.merge(check_wn(an, n as usize));
            r.merge(check_inflexion_counts(an, 0.3));
            r.merge(check_onshell_parity(an));
            r.merge(check_symmetry(an, 0.3));
            r.merge(check_branch_predictions(an, 0.5));
            r.merge(check_branch_predictions(an, 0.3));
            r.merge(check_bitangents(an, 0.3));
            r.merge(check_cross_validation(an, 0.3));
            r.merge(check_singular_for_all(an, &unit_grid()));
        }
        FixtureKind::Inflected => {
            r.merge(check_inflexion_counts(an, 0.3));
            r.merge(check_onshell_parity(an));
            r.merge(check_symmetry(an, 0.3));
            r.merge(check_branch_predictions(an, 0.5));
            r.merge(check_branch_predictions(an, 0.3));
            r.merge(check_cross_validation(an, 0.5));
        }
    }
    r
}

/// Rotation numbers of closed branches as half-turn counts, for reports.
pub fn half_turns(branches: &[Branch]) -> Vec<HalfTurns> {
    branches.iter().filter_map(|b| b.rotation).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composed_lambda_values() {
        assert!((composed_lambda(0.3, 0.3) - 0.42).abs() < 1e-15);
        assert_eq!(composed_lambda(0.3, 0.5), 0.5);
        assert_eq!(composed_lambda(0.3, reconstruction_delta(0.3)), 0.0);
        assert!((composed_lambda(0.25, 0.4) - 0.45).abs() < 1e-15);
    }

    #[test]
    fn square_polyline_directions() {
        let sq = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0), Vec2::new(0.0, 0.0)];
        assert_eq!(direction_matches(&sq, true, 0.3), 2);
    }

    #[test]
    fn polyline_equidistant_of_a_circle() {
        let pts: Vec<Vec2> = (0..=720).map(|i| Vec2::from_angle(TAU * i as f64 / 720.0)).collect();
        let e = polyline_equidistant(&[(pts, true)], 0.3);
        assert!(!e.is_empty());
        for p in e {
            assert!((p.norm() - 0.4).abs() < 1e-4, "{}", p.norm());
        }
    }

    #[test]
    fn limacon_has_an_inner_loop() {
        let c = crate::fixtures::polar(&[(1, 2.0, 0.0)]);
        let xs = self_intersections(&c, 512);
        assert_eq!(xs.len(), 1);
        let p = c.point(xs[0].0);
        assert!(p.dist(c.point(xs[0].1)) < 1e-12);
    }
}
