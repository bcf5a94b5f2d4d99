//! The commands behind the command-line interface.

use std::fmt::Write as _;
use std::thread;

use equidist_core::curve::GenericityIssue;
use equidist_core::equidistant::{css_curve, full_equidistant};
use equidist_core::fixtures::{self, Fixture, FixtureKind};
use equidist_core::gluing::{Closure, LambdaClass, Parity, RotationClass};
use equidist_core::theorems::{aggregate_random, check_random_curve, random_generic_curve, verify_fixture};
use equidist_core::theorems::VerificationReport;
use equidist_core::{Branch, CurveAnalysis, FourierCurve, Settings};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::curve_file::write_curve;
use crate::error::CliError;
use crate::output::{branch_csv, css_csv, lambda_tag, svg, write, Drawing};

/// Points used to draw the curve itself.
const CURVE_POINTS: usize = 1024;

fn describe(issue: &GenericityIssue) -> String {
    match issue {
        GenericityIssue::Curve(e) => e.to_string(),
        GenericityIssue::ParallelInflexionTangents { t1, t2, gap } => {
            format!("inflexions at t = {t1} and t = {t2} have parallel tangents (gap {gap:e})")
        }
        GenericityIssue::CentrallySymmetric => "curve is centrally symmetric".into(),
    }
}

/// Genericity check followed by the parallel structure. Central symmetry
/// is tolerated when `symmetric_ok`.
pub fn analyse(curve: FourierCurve, settings: Settings, symmetric_ok: bool) -> Result<CurveAnalysis, CliError> {
    let report = curve.genericity(&settings);
    for issue in &report.issues {
        match issue {
            GenericityIssue::Curve(e) => {
                return Err(equidist_core::EquidistantError::Curve(e.clone()).into());
            }
            GenericityIssue::CentrallySymmetric if symmetric_ok => {}
            _ => return Err(CliError::NonGeneric(describe(issue))),
        }
    }
    Ok(CurveAnalysis::new(curve, settings)?)
}

pub fn curve_points(curve: &FourierCurve) -> Vec<equidist_core::Vec2> {
    use equidist_core::Curve;
    (0..=CURVE_POINTS).map(|i| curve.point(std::f64::consts::TAU * i as f64 / CURVE_POINTS as f64)).collect()
}

fn label(curve: &FourierCurve) -> String {
    curve.label.clone().unwrap_or_else(|| "curve".into())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchSummary {
    pub scheme: Option<String>,
    pub closed: bool,
    pub nodes: usize,
    pub cusps: usize,
    pub inflexions: usize,
    /// `None` for a branch ending on the curve.
    pub rotation: Option<f64>,
    pub csv: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSummary {
    pub lambda: f64,
    pub branch_count: usize,
    pub cusps: usize,
    pub inflexions: usize,
    pub branches: Vec<BranchSummary>,
    pub svg: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComputeSummary {
    pub curve: String,
    pub config: RunConfig,
    pub lambdas: Vec<LambdaSummary>,
}

impl ComputeSummary {
    pub fn human(&self) -> String {
        let mut s = String::new();
        for l in &self.lambdas {
            let rot: Vec<String> =
                l.branches.iter().map(|b| b.rotation.map_or_else(|| "open".to_string(), |r| format!("{r}"))).collect();
            let _ = writeln!(
                s,
                "{} λ={}: {} branch(es), {} cusp(s), {} inflexion(s), rotation [{}]",
                self.curve,
                l.lambda,
                l.branch_count,
                l.cusps,
                l.inflexions,
                rot.join(", ")
            );
        }
        s
    }
}

fn branch_summary(b: &Branch, csv: Option<String>) -> BranchSummary {
    BranchSummary {
        scheme: b.scheme.as_ref().map(|s| s.to_string()),
        closed: b.closed,
        nodes: b.nodes.len(),
        cusps: b.cusp_count(),
        inflexions: b.inflexions.len(),
        rotation: b.rotation.map(|r| r.value()),
        csv,
    }
}

/// Traces `E_λ` for every requested λ, one thread per λ, and writes the
/// requested files. Results are written in the order of the λ list.
pub fn compute(config: &RunConfig, curve: FourierCurve) -> Result<ComputeSummary, CliError> {
    config.validate()?;
    let an = analyse(curve, config.settings()?, false)?;
    let name = label(&an.curve);
    let traced: Vec<Result<Vec<Branch>, CliError>> = thread::scope(|scope| {
        let handles: Vec<_> = config
            .lambdas
            .iter()
            .map(|&l| {
                let an = &an;
                scope.spawn(move || full_equidistant(an, l).map_err(CliError::from))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let curve_pts = curve_points(&an.curve);
    let mut lambdas = Vec::with_capacity(traced.len());
    for (&l, branches) in config.lambdas.iter().zip(traced) {
        let branches = branches?;
        let tag = lambda_tag(l);
        let mut summaries = Vec::with_capacity(branches.len());
        for (i, b) in branches.iter().enumerate() {
            let csv = config.wants(Format::Csv).then(|| format!("{name}_l{tag}_b{i}.csv"));
            if let Some(file) = &csv {
                write(&config.out, file, &branch_csv(b))?;
            }
            summaries.push(branch_summary(b, csv));
        }
        let svg_name = config.wants(Format::Svg).then(|| format!("{name}_l{tag}.svg"));
        if let Some(file) = &svg_name {
            let drawing = Drawing {
                title: format!("{name} λ = {l}"),
                curve: curve_pts.clone(),
                branches: branches.iter().map(|b| b.positions()).collect(),
                cusps: branches.iter().flat_map(|b| b.cusps.iter().map(|c| c.position)).collect(),
                inflexions: branches.iter().flat_map(|b| b.inflexions.iter().map(|&i| b.nodes[i].position)).collect(),
            };
            write(&config.out, file, &svg(&drawing))?;
        }
        lambdas.push(LambdaSummary {
            lambda: l,
            branch_count: branches.len(),
            cusps: summaries.iter().map(|b| b.cusps).sum(),
            inflexions: summaries.iter().map(|b| b.inflexions).sum(),
            branches: summaries,
            svg: svg_name,
        });
    }
    let summary = ComputeSummary { curve: name.clone(), config: config.clone(), lambdas };
    if config.wants(Format::Json) {
        write(&config.out, &format!("{name}_summary.json"), &to_json(&summary))?;
    }
    Ok(summary)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s
}

fn class_name(c: LambdaClass) -> &'static str {
    match c {
        LambdaClass::Half => "HALF",
        LambdaClass::Generic => "GENERIC",
    }
}

/// The maximal glueing schemes for the classes of the requested λ, in
/// two-row notation, with what each scheme predicts about its branch.
pub fn branches(config: &RunConfig, curve: FourierCurve) -> Result<String, CliError> {
    config.validate()?;
    let an = analyse(curve, config.settings()?, false)?;
    let mut classes: Vec<LambdaClass> = Vec::new();
    if config.lambdas.is_empty() {
        classes = vec![LambdaClass::Half, LambdaClass::Generic];
    }
    for &l in &config.lambdas {
        let c = LambdaClass::of(l).ok_or(CliError::Invalid(format!("λ = {l} is the curve itself")))?;
        if !classes.contains(&c) {
            classes.push(c);
        }
    }
    let ps = &an.structure;
    let mut s = String::new();
    let _ = writeln!(s, "{}: {} parallel points, {} arcs, {} sets", label(&an.curve), ps.points.len(), ps.arcs.len(), ps.sets.len());
    for c in classes {
        let schemes = an.schemes(c)?;
        let _ = writeln!(s, "{} ({} scheme(s))", class_name(c), schemes.len());
        for sc in &schemes {
            let p = sc.predict(ps);
            let closure = match p.closure {
                Some(Closure::OnShell) => "on shell",
                Some(_) => "closed",
                None => "open",
            };
            let rotation = match p.rotation {
                Some(RotationClass::Integer) => ", integer rotation",
                Some(RotationClass::HalfInteger) => ", half-integer rotation",
                None => "",
            };
            let cusps = match p.cusp_parity {
                Some(Parity::Even) => ", even cusps",
                Some(Parity::Odd) => ", odd cusps",
                None => ", cusp parity from endpoints",
            };
            let _ = writeln!(s, "  {sc}    {closure}{rotation}{cusps}, {} inflexion(s)", p.inflexions);
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CssBranchSummary {
    pub scheme: String,
    pub closed: bool,
    pub nodes: usize,
    pub cusps: Vec<[f64; 2]>,
    pub poles: usize,
    pub endpoints: Option<[[f64; 2]; 2]>,
    pub degenerate: bool,
    pub csv: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CssSummary {
    pub curve: String,
    pub cusps: usize,
    /// Set when the Centre Symmetry Set is a single point.
    pub centre: Option<[f64; 2]>,
    pub branches: Vec<CssBranchSummary>,
    pub svg: Option<String>,
}

impl CssSummary {
    pub fn human(&self) -> String {
        match self.centre {
            Some([x, y]) => format!("{} CSS: the single point ({x}, {y})\n", self.curve),
            None => format!("{} CSS: {} branch(es), {} cusp(s)\n", self.curve, self.branches.len(), self.cusps),
        }
    }
}

pub fn css(config: &RunConfig, curve: FourierCurve) -> Result<CssSummary, CliError> {
    config.validate()?;
    let an = analyse(curve, config.settings()?, true)?;
    let name = label(&an.curve);
    let c = css_curve(&an)?;
    let xy = |p: equidist_core::Vec2| [p.x, p.y];
    let centre = c.branches.iter().all(|b| b.degenerate).then(|| {
        let pts: Vec<_> = c.branches.iter().flat_map(|b| b.nodes.iter().map(|n| n.point)).filter(|p| p.is_finite()).collect();
        let m = pts.iter().fold(equidist_core::Vec2::ZERO, |a, &p| a + p) * (1.0 / pts.len().max(1) as f64);
        xy(m)
    });
    let mut branches = Vec::new();
    for (i, b) in c.branches.iter().enumerate() {
        let csv = (config.wants(Format::Csv) && centre.is_none()).then(|| format!("{name}_css_b{i}.csv"));
        if let Some(file) = &csv {
            write(&config.out, file, &css_csv(b))?;
        }
        branches.push(CssBranchSummary {
            scheme: b.scheme.to_string(),
            closed: b.closed,
            nodes: b.nodes.len(),
            cusps: b.cusps.iter().map(|c| xy(c.2)).collect(),
            poles: b.poles.len(),
            endpoints: b.endpoints.map(|(p, q)| [xy(p), xy(q)]),
            degenerate: b.degenerate,
            csv,
        });
    }
    let svg_name = config.wants(Format::Svg).then(|| format!("{name}_css.svg"));
    if let Some(file) = &svg_name {
        let drawing = match centre {
            Some([x, y]) => Drawing {
                title: format!("{name} centre symmetry set"),
                curve: curve_points(&an.curve),
                cusps: vec![equidist_core::Vec2::new(x, y)],
                ..Drawing::default()
            },
            None => Drawing {
                title: format!("{name} centre symmetry set"),
                curve: curve_points(&an.curve),
                branches: c.branches.iter().map(|b| b.nodes.iter().map(|n| n.point).collect()).collect(),
                cusps: c.branches.iter().flat_map(|b| b.cusps.iter().map(|c| c.2)).collect(),
                inflexions: c.branches.iter().filter_map(|b| b.endpoints).flat_map(|(p, q)| [p, q]).collect(),
            },
        };
        write(&config.out, file, &svg(&drawing))?;
    }
    let summary = CssSummary { curve: name.clone(), cusps: c.cusp_count(), centre, branches, svg: svg_name };
    if config.wants(Format::Json) {
        write(&config.out, &format!("{name}_css_summary.json"), &to_json(&summary))?;
    }
    Ok(summary)
}

/// Which checks to run on a curve read from a file.
pub fn infer_kind(curve: &FourierCurve, settings: &Settings) -> Result<FixtureKind, CliError> {
    let infl = curve.inflexions(settings).map_err(|e| CliError::from(equidist_core::EquidistantError::Curve(e)))?;
    let rot = curve.rotation_number(settings).map_err(|e| CliError::from(equidist_core::EquidistantError::Curve(e)))?;
    let n = rot.unsigned_abs() as u32;
    Ok(match infl.len() {
        0 if n == 1 && curve.is_centrally_symmetric() => FixtureKind::Analytic,
        0 if n == 1 => FixtureKind::Convex,
        0 => FixtureKind::Rosette(n),
        2 => FixtureKind::TwoInflexion(n),
        _ => FixtureKind::Inflected,
    })
}

/// What `verify` should run.
#[derive(Clone, Debug, Default)]
pub struct VerifyPlan {
    pub fixtures: Vec<Fixture>,
    pub curve: Option<FourierCurve>,
    pub random: Option<usize>,
}

fn workers() -> usize {
    thread::available_parallelism().map_or(4, |n| n.get())
}

/// Runs every requested check concurrently; the merged report is sorted
/// by check name and does not depend on scheduling.
pub fn verify(config: &RunConfig, plan: VerifyPlan) -> Result<VerificationReport, CliError> {
    config.validate()?;
    let settings = config.settings()?;
    let mut jobs = plan.fixtures;
    if let Some(c) = plan.curve {
        let kind = infer_kind(&c, &settings)?;
        jobs.push(Fixture { name: "input", kind, curve: c });
    }
    let mut report = VerificationReport::new();
    let reports: Vec<VerificationReport> = thread::scope(|scope| {
        let handles: Vec<_> = jobs.iter().map(|f| scope.spawn(move || verify_fixture(f, settings))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    for r in reports {
        report.merge(r);
    }
    if let Some(k) = plan.random {
        let seed = config.seed;
        let per = k.div_ceil(workers()).max(1);
        let chunks: Vec<Vec<VerificationReport>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..k)
                .step_by(per)
                .map(|start| {
                    scope.spawn(move || {
                        (start..(start + per).min(k))
                            .map(|i| {
                                let (_, an) = random_generic_curve(seed, i, settings);
                                check_random_curve(&format!("random.{i:03}"), &an)
                            })
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        report.merge(aggregate_random(k, chunks.into_iter().flatten().collect()));
    }
    if config.wants(Format::Json) {
        write(&config.out, "report.json", &to_json(&report))?;
    }
    Ok(report)
}

/// Writes every built-in fixture as a curve file.
pub fn write_fixtures(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let mut names = Vec::new();
    std::fs::create_dir_all(&config.out).map_err(|e| CliError::io(&config.out, e))?;
    for f in fixtures::all() {
        let file = format!("{}.json", f.name);
        write_curve(&config.out.join(&file), &f.curve)?;
        names.push(file);
    }
    Ok(names)
}
