//! Invariants on random generic curves.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{Check, Expected, Observed, Status, VerificationReport};
use crate::curve::{CurveError, FourierCurve};
use crate::equidistant::{
    classify_onshell_endpoint, full_equidistant, ArcSide, Branch, CurveAnalysis, EndpointType, EquidistantError,
};
use crate::geom::hausdorff;
use crate::gluing::{expected_pair_count, Closure, LambdaClass, Parity};
use crate::parallelism::ParallelError;
use crate::settings::Settings;

pub const RANDOM_MAX_DEGREE: usize = 6;

/// Draws per curve before giving up.
const MAX_ATTEMPTS: usize = 1000;

const INVARIANTS: [&str; 7] = [
    "analysis",
    "even_parallel_points",
    "even_inflexions",
    "arc_accounting",
    "cusp_parity",
    "inflexion_parity",
    "symmetry",
];

/// Degree uniform in `2..=max_degree`, coefficients of harmonic `k`
/// uniform in `[−1/k², 1/k²)`.
pub fn random_curve<R: Rng>(rng: &mut R, max_degree: usize) -> FourierCurve {
    let d = rng.gen_range(2..=max_degree.max(2));
    let mut c = [vec![0.0; d + 1], vec![0.0; d + 1], vec![0.0; d + 1], vec![0.0; d + 1]];
    for k in 1..=d {
        let w = 1.0 / (k * k) as f64;
        for v in c.iter_mut() {
            v[k] = rng.gen_range(-w..w);
        }
    }
    let [xc, xs, yc, ys] = c;
    FourierCurve::new(xc, xs, yc, ys).expect("random coefficients are finite")
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomCurve {
    pub index: usize,
    /// Draws needed to reach a generic curve.
    pub attempts: usize,
    pub curve: FourierCurve,
}

/// Failures that make a curve non-generic rather than the pipeline wrong.
fn non_generic(e: &EquidistantError) -> bool {
    matches!(
        e,
        EquidistantError::Curve(_)
            | EquidistantError::Parallel(ParallelError::Curve(_))
            | EquidistantError::Parallel(ParallelError::CoincidentLevels { .. })
            | EquidistantError::Parallel(ParallelError::TangentCoincidence { .. })
    )
}

/// The `index`-th curve of the stream `seed`, redrawn until it passes the
/// genericity checks. Each index has its own random stream, so curves can
/// be produced in any order.
pub fn random_generic_curve(
    seed: u64,
    index: usize,
    settings: Settings,
) -> (RandomCurve, Result<CurveAnalysis, EquidistantError>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut last = None;
    for attempts in 1..=MAX_ATTEMPTS {
        let curve = random_curve(&mut rng, RANDOM_MAX_DEGREE).with_label(format!("random-{seed}-{index}"));
        if !curve.genericity(&settings).is_generic() {
            continue;
        }
        let rc = RandomCurve { index, attempts, curve: curve.clone() };
        match CurveAnalysis::new(curve, settings) {
            Err(e) if non_generic(&e) => last = Some(e),
            res => return (rc, res),
        }
    }
    let curve = random_curve(&mut rng, RANDOM_MAX_DEGREE);
    let e = last.unwrap_or(EquidistantError::Curve(CurveError::InvalidCoefficients));
    (RandomCurve { index, attempts: MAX_ATTEMPTS, curve }, Err(e))
}

fn onshell_parity_ok(an: &CurveAnalysis, b: &Branch) -> Result<bool, EquidistantError> {
    let (t1, t2) = b.endpoints.ok_or(EquidistantError::OpenBranch)?;
    let a = classify_onshell_endpoint(an, t1, ArcSide::Forward)?;
    let c = classify_onshell_endpoint(an, t2, ArcSide::Backward)?;
    let odd = (a.kind == EndpointType::Singular) != (c.kind == EndpointType::Singular);
    Ok(odd == (b.cusp_count() % 2 == 1))
}

/// Invariants of one curve, named `<prefix>.<invariant>`.
pub fn check_random_curve(prefix: &str, analysis: &Result<CurveAnalysis, EquidistantError>) -> VerificationReport {
    let mut r = VerificationReport::new();
    let name = |k: &str| format!("{prefix}.{k}");
    let an = match analysis {
        Ok(an) => an,
        Err(e) => {
            r.check(name("analysis"), Expected::Truth, Observed::Error(format!("{e}")));
            return r;
        }
    };
    r.check(name("analysis"), Expected::Truth, Observed::Truth(true));
    let ps = &an.structure;
    r.check(name("even_parallel_points"), Expected::Parity(Parity::Even), Observed::Count(ps.points.len()));
    let infl = an.curve.inflexions(&an.settings).map(|v| v.len());
    r.check(
        name("even_inflexions"),
        Expected::Parity(Parity::Even),
        match infl {
            Ok(n) => Observed::Count(n),
            Err(e) => Observed::Error(format!("{e}")),
        },
    );
    let mut accounting = Ok(true);
    for class in [LambdaClass::Half, LambdaClass::Generic] {
        match an.schemes(class) {
            Ok(s) => {
                let used: usize = s.iter().map(|x| x.steps.len()).sum();
                if used != expected_pair_count(ps, class) {
                    accounting = Ok(false);
                }
            }
            Err(e) => accounting = Err(e),
        }
    }
    r.check(
        name("arc_accounting"),
        Expected::Truth,
        match accounting {
            Ok(t) => Observed::Truth(t),
            Err(e) => Observed::Error(format!("{e}")),
        },
    );
    let mut cusp_bad: Result<usize, EquidistantError> = Ok(0);
    let mut infl_bad: Result<usize, EquidistantError> = Ok(0);
    let mut sets: Vec<Vec<crate::geom::Vec2>> = Vec::new();
    for l in [0.5, 0.3, 0.7] {
        match full_equidistant(an, l) {
            Ok(bs) => {
                for b in &bs {
                    let Some(scheme) = b.scheme.as_ref() else { continue };
                    if let Ok(n) = infl_bad.as_mut() {
                        *n += usize::from(b.inflexions.len() % 2 != 0);
                    }
                    let ok = if scheme.closure == Some(Closure::OnShell) {
                        onshell_parity_ok(an, b)
                    } else {
                        Ok(scheme.predict(ps).cusp_parity.is_none_or(|p| p == Parity::of(b.cusp_count())))
                    };
                    match ok {
                        Ok(ok) => {
                            if let Ok(n) = cusp_bad.as_mut() {
                                *n += usize::from(!ok);
                            }
                        }
                        Err(e) => cusp_bad = Err(e),
                    }
                }
                if l != 0.5 {
                    sets.push(bs.iter().flat_map(|b| b.positions()).collect());
                }
            }
            Err(e) => {
                cusp_bad = Err(e.clone());
                infl_bad = Err(e);
            }
        }
    }
    let obs = |x: Result<usize, EquidistantError>| match x {
        Ok(n) => Observed::Count(n),
        Err(e) => Observed::Error(format!("{e}")),
    };
    r.check(name("cusp_parity"), Expected::Count(0), obs(cusp_bad));
    r.check(name("inflexion_parity"), Expected::Count(0), obs(infl_bad));
    let sym = if sets.len() == 2 {
        Observed::Real(hausdorff(&sets[0], &sets[1]))
    } else {
        Observed::Error(String::from("equidistant not traced"))
    };
    r.check(name("symmetry"), Expected::Below(1e-6), sym);
    r
}

/// Aggregates per-curve reports: one check per invariant counting the
/// curves that violate it, plus every failing per-curve check.
pub fn aggregate_random(count: usize, reports: Vec<VerificationReport>) -> VerificationReport {
    let mut out = VerificationReport::new();
    let mut bad = [0usize; INVARIANTS.len()];
    for rep in &reports {
        for c in &rep.checks {
            if c.status == Status::Fail {
                if let Some(i) = INVARIANTS.iter().position(|k| c.name.ends_with(&format!(".{k}"))) {
                    bad[i] += 1;
                }
                out.push(c.clone());
            }
        }
    }
    out.push(Check::new("random.curves", Expected::Count(count), Observed::Count(reports.len())));
    for (k, n) in INVARIANTS.iter().zip(bad) {
        out.push(Check::new(format!("random.{k}"), Expected::Count(0), Observed::Count(n)));
    }
    out
}

/// Randomised mode: `count` generic curves from the stream `seed`.
pub fn check_random(count: usize, seed: u64, settings: Settings) -> VerificationReport {
    let reports = (0..count)
        .map(|i| {
            let (_, an) = random_generic_curve(seed, i, settings);
            check_random_curve(&format!("random.{i:03}"), &an)
        })
        .collect();
    aggregate_random(count, reports)
}
