//! One PASS/FAIL line per acceptance criterion.

use std::process::ExitCode;

use equidist_core::equidistant::{classify_onshell_endpoint, css_curve, full_equidistant, trace_branch, ArcSide};
use equidist_core::fixtures;
use equidist_core::geom::Bounds;
use equidist_core::theorems::{
    arc_pair_cusps, check_onshell_parity, check_random, composition, cross_validate, interval_samples, loops,
    predict_singular_intervals, reconstruction_delta, Status,
};
use equidist_core::{Branch, CurveAnalysis, FourierCurve, LambdaClass, Settings};

const SAMPLES: usize = 4096;

fn settings() -> Settings {
    Settings::with_samples(SAMPLES)
}

fn analysis(c: FourierCurve) -> Result<CurveAnalysis, String> {
    CurveAnalysis::new(c, settings()).map_err(|e| e.to_string())
}

fn equidistant(an: &CurveAnalysis, l: f64) -> Result<Vec<Branch>, String> {
    full_equidistant(an, l).map_err(|e| format!("λ = {l}: {e}"))
}

fn cusps(bs: &[Branch]) -> usize {
    bs.iter().map(Branch::cusp_count).sum()
}

type Criterion = fn() -> Result<Outcome, String>;

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }
}

fn analytic() -> Result<Outcome, String> {
    let mut o = Outcome::new();
    let an = analysis(fixtures::circle())?;
    let (mut dev, mut kerr) = (0.0f64, 0.0f64);
    for l in [0.2, 0.3, 0.4, 0.7, -0.5, 1.5] {
        let r = (2.0 * l - 1.0f64).abs();
        for b in equidistant(&an, l)? {
            for n in &b.nodes {
                dev = dev.max((n.position.norm() - r).abs());
                kerr = kerr.max((n.kappa_e.abs() * r - 1.0).abs());
            }
        }
    }
    o.require(dev < 1e-8, format!("circle radial deviation {dev:.1e}"));
    o.require(kerr < 1e-8, format!("circle κ_E rel. error {kerr:.1e}"));
    for f in [fixtures::circle(), fixtures::ellipse()] {
        let name = f.label.clone().unwrap_or_default();
        let an = analysis(f)?;
        // The margin vanishes identically, so branches are traced without
        // cusp detection.
        let mut pts = Vec::new();
        for s in an.schemes(LambdaClass::Half).map_err(|e| e.to_string())? {
            pts.extend(trace_branch(&an, &s, 0.5).map_err(|e| e.to_string())?.positions());
        }
        let d = Bounds::of(pts).diameter();
        o.require(d < 1e-6, format!("{name} Wigner caustic diameter {d:.1e}"));
    }
    Ok(o)
}

fn convex_parity() -> Result<Outcome, String> {
    let mut o = Outcome::new();
    let an = analysis(fixtures::perturbed_ellipse())?;
    let half = cusps(&equidistant(&an, 0.5)?);
    o.require(half % 2 == 1 && half >= 3, format!("HALF cusps {half}"));
    o.require(half == 3, format!("HALF cusps match the margin scan ({half} = 3)"));
    for l in [0.2, 0.3, 0.4, 0.45] {
        let c = cusps(&equidistant(&an, l)?);
        o.require(c.is_multiple_of(2), format!("λ = {l}: {c} cusps"));
    }
    let css = css_curve(&an).map_err(|e| e.to_string())?.cusp_count();
    o.require(css % 2 == 1 && css >= 3 && css >= half, format!("CSS cusps {css}"));
    Ok(o)
}

fn composition_suite() -> Result<Outcome, String> {
    let mut o = Outcome::new();
    let an = analysis(fixtures::perturbed_ellipse())?;
    let d = reconstruction_delta(0.3);
    for (l, dl) in [(0.3, 0.3), (0.3, 0.5), (0.25, 0.4), (0.3, d)] {
        let c = composition(&an, l, dl).map_err(|e| e.to_string())?;
        let tol = 5.0 * c.spacing;
        o.require(c.hausdorff < tol, format!("(λ, δ) = ({l}, {dl:.4}): {:.1e} < {tol:.1e}", c.hausdorff));
    }
    Ok(o)
}

fn rotations(bs: &[&Branch]) -> Vec<i64> {
    let mut v: Vec<i64> = bs.iter().filter_map(|b| b.rotation.map(|r| r.0)).collect();
    v.sort_unstable();
    v
}

fn rosettes() -> Result<Outcome, String> {
    let mut o = Outcome::new();
    for n in [2usize, 3] {
        let an = analysis(fixtures::rosette(n as u32))?;
        let half = equidistant(&an, 0.5)?;
        let generic = equidistant(&an, 0.4)?;
        o.require(half.len() == n && generic.len() == 2 * n - 1, format!("C{n}: {}/{} branches", half.len(), generic.len()));
        // Half-turn counts: n−1 branches turning n times, one turning n/2.
        let mut want_half = vec![2 * n as i64; n - 1];
        want_half.insert(0, n as i64);
        let got_half = rotations(&half.iter().collect::<Vec<_>>());
        o.require(got_half == want_half, format!("C{n} HALF rotations (half-turns) {got_half:?}"));
        let got_generic = rotations(&generic.iter().collect::<Vec<_>>());
        o.require(got_generic == vec![2 * n as i64; 2 * n - 1], format!("C{n} GENERIC rotations (half-turns) {got_generic:?}"));
        let odd = half.iter().filter(|b| b.cusp_count() % 2 == 1).count();
        o.require(odd == n % 2, format!("C{n}: {odd} odd-cusp HALF branches"));
        let total = cusps(&half);
        o.require(total >= 2, format!("C{n}: {total} HALF cusps"));
    }
    Ok(o)
}

fn w1() -> Result<Outcome, String> {
    let mut o = Outcome::new();
    let an = analysis(fixtures::w1())?;
    let half = equidistant(&an, 0.5)?;
    let on_shell: Vec<&Branch> = half.iter().filter(|b| b.endpoints.is_some()).collect();
    o.require(half.len() == 2 && on_shell.len() == 1, format!("{} HALF branches, {} on shell", half.len(), on_shell.len()));
    let generic = equidistant(&an, 0.3)?;
    let mut infl: Vec<usize> = generic.iter().map(|b| b.inflexions.len()).collect();
    infl.sort_unstable();
    o.require(generic.len() == 2 && infl == [4, 6], format!("GENERIC inflexions {infl:?}"));
    let m = an.structure.points.len() / 2;
    let n = an.structure.inflexion_points().len() / 2;
    let total: usize = half.iter().map(|b| b.inflexions.len()).sum();
    o.require(total == 2 * m - 2 * n, format!("HALF inflexions {total} = 2·{m} − 2·{n}"));
    for b in &on_shell {
        o.require(b.inflexions.len() % 2 == 0, format!("on-shell inflexions {}", b.inflexions.len()));
    }
    let parity = check_onshell_parity(&an);
    let bad: Vec<&str> = parity.failures().map(|c| c.name.as_str()).collect();
    let cusp_checks = parity.checks.iter().filter(|c| c.name.ends_with("cusp_parity") && c.status == Status::Pass).count();
    o.require(bad.is_empty() && cusp_checks == on_shell.len(), format!("on-shell cusp parity vs endpoint types ({cusp_checks} checked) {bad:?}"));
    Ok(o)
}

fn singular_intervals() -> Result<Outcome, String> {
    let mut o = Outcome::new();
    let an = analysis(fixtures::three_lobed())?;
    let pair = fixtures::three_lobed_arcs();
    let pred = predict_singular_intervals(&an, pair).map_err(|e| e.to_string())?;
    o.require(
        (pred.rho_min - 2.0).abs() < 1e-9 && (pred.rho_max - 3.0).abs() < 1e-9,
        format!("endpoint ratios {:.9}, {:.9}", pred.rho_min, pred.rho_max),
    );
    let want = [(0.25, 1.0 / 3.0), (2.0 / 3.0, 0.75)];
    let close = pred.intervals.len() == 2
        && pred.intervals.iter().zip(want).all(|(a, b)| (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
    o.require(close, format!("intervals {:?}", pred.intervals));
    let mut hits = 0;
    for &iv in &pred.intervals {
        for l in interval_samples(iv) {
            let c = arc_pair_cusps(&an, pair, l).map_err(|e| e.to_string())?;
            hits += usize::from(c >= 1);
        }
    }
    o.require(hits == 16, format!("{hits}/16 sampled λ with a cusp"));
    let c2 = fixtures::rosette(2);
    let l = loops(&c2, 1024).len();
    let an = analysis(c2)?;
    let wc = cusps(&equidistant(&an, 0.5)?);
    o.require(l >= 1 && wc >= 1, format!("loop fixture: {l} loops, {wc} Wigner caustic cusps"));
    Ok(o)
}

fn crosschecks() -> Result<Outcome, String> {
    let mut o = Outcome::new();
    let cases = [
        (fixtures::perturbed_ellipse(), 0.3),
        (fixtures::three_lobed(), 0.3),
        (fixtures::w1(), 0.3),
        (fixtures::w2(), 0.3),
        (fixtures::eight_inflexions(), 0.5),
        (fixtures::rosette(3), 0.4),
    ];
    let (mut kerr, mut terr, mut nodes) = (0.0f64, 0.0f64, 0usize);
    for (c, l) in cases {
        let an = analysis(c)?;
        for b in equidistant(&an, l)? {
            let cv = cross_validate(&an, &b);
            kerr = kerr.max(cv.curvature_rel_err);
            terr = terr.max(cv.tangent_err);
            nodes += cv.nodes;
        }
    }
    o.require(kerr < 1e-4, format!("curvature rel. error {kerr:.1e} over {nodes} nodes"));
    o.require(terr < 1e-6, format!("tangent error {terr:.1e} rad"));
    let mut worst = 0.0f64;
    for c in [fixtures::w1(), fixtures::w2(), fixtures::eight_inflexions()] {
        let infl = c.inflexions(&settings()).map_err(|e| e.to_string())?;
        let an = analysis(c)?;
        for t in infl {
            for side in [ArcSide::Forward, ArcSide::Backward] {
                let e = classify_onshell_endpoint(&an, t, side).map_err(|e| e.to_string())?;
                worst = worst.max((e.ratio_limit + 1.0).abs());
            }
        }
    }
    o.require(worst < 1e-3, format!("κ-ratio limit at inflexions within {worst:.1e} of −1"));
    Ok(o)
}

fn randomized() -> Result<Outcome, String> {
    let mut o = Outcome::new();
    let r = check_random(100, 7, settings());
    let curves = r.get("random.curves").map(|c| c.status == Status::Pass).unwrap_or(false);
    o.require(curves, "100 generic curves".into());
    for c in r.checks.iter().filter(|c| c.name.starts_with("random.") && c.name.matches('.').count() == 1) {
        o.require(c.status == Status::Pass, c.to_string());
    }
    for c in r.failures() {
        o.failures.push(c.to_string());
    }
    Ok(o)
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("circle and ellipse analytic suite", analytic),
        ("convex parity suite", convex_parity),
        ("composition and reconstruction", composition_suite),
        ("rosette counts", rosettes),
        ("W_1 suite", w1),
        ("singular intervals", singular_intervals),
        ("numerical cross-checks", crosschecks),
        ("randomized invariants", randomized),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let (ok, detail) = match run() {
            Ok(o) if o.failures.is_empty() => (true, o.notes.join("; ")),
            Ok(o) => (false, o.failures.join("; ")),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        let status = if ok { "PASS" } else { "FAIL" };
        println!("criterion {} {status}: {name} [{:.1}s] {detail}", i + 1, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
