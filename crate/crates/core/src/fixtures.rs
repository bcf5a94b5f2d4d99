//! Built-in test curves and the builders that produce them.
//!
//! Every fixture is a plain [`FourierCurve`]; the builders only compute
//! coefficients. The same curves are shipped as JSON files in the
//! repository's `fixtures/` directory.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use crate::curve::FourierCurve;
use crate::theorems::ArcPair;
#[allow(unused_imports)]
use num_traits::Float;

/// A complex Fourier term `c·e^{imt}` with `c = re + i·im`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub m: i32,
    pub re: f64,
    pub im: f64,
}

const fn term(m: i32, re: f64, im: f64) -> Term {
    Term { m, re, im }
}

/// Curve `t ↦ Σ c_m e^{imt}` read as a point of the complex plane.
pub fn from_terms(terms: &[Term]) -> FourierCurve {
    let deg = terms.iter().map(|t| t.m.unsigned_abs() as usize).max().unwrap_or(0).max(1);
    let (mut xc, mut xs, mut yc, mut ys) = (vec![0.0; deg + 1], vec![0.0; deg + 1], vec![0.0; deg + 1], vec![0.0; deg + 1]);
    for t in terms {
        let k = t.m.unsigned_abs() as usize;
        let sg = if t.m < 0 { -1.0 } else { 1.0 };
        // (re + i·im)(cos kt + i·sg·sin kt)
        xc[k] += t.re;
        xs[k] -= sg * t.im;
        yc[k] += t.im;
        ys[k] += sg * t.re;
    }
    FourierCurve::new(xc, xs, yc, ys).expect("fixture coefficients are valid")
}

/// Real trigonometric polynomial `c0 + Σ a_k cos ku + b_k sin ku` as
/// complex terms.
fn real_terms(c0: f64, harmonics: &[(i32, f64, f64)]) -> Vec<Term> {
    let mut out = vec![term(0, c0, 0.0)];
    for &(k, a, b) in harmonics {
        out.push(term(k, 0.5 * a, -0.5 * b));
        out.push(term(-k, 0.5 * a, 0.5 * b));
    }
    out
}

fn multiply(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for x in a {
        for y in b {
            let m = x.m + y.m;
            let re = x.re * y.re - x.im * y.im;
            let im = x.re * y.im + x.im * y.re;
            match out.iter_mut().find(|t| t.m == m) {
                Some(t) => {
                    t.re += re;
                    t.im += im;
                }
                None => out.push(term(m, re, im)),
            }
        }
    }
    out
}

/// Polar curve `ρ(u)·(cos u, sin u)` with
/// `ρ = 1 + Σ a_k cos ku + b_k sin ku`.
pub fn polar(harmonics: &[(i32, f64, f64)]) -> FourierCurve {
    from_terms(&multiply(&real_terms(1.0, harmonics), &[term(1, 1.0, 0.0)]))
}

/// Curve with tangent angle `n·u` and speed `n·r(u)`, where
/// `r = 1 + Σ a_k cos ku + b_k sin ku`. Harmonic `n` must be absent so the
/// curve closes; for `r > 0` the curvature never vanishes and the rotation
/// number is `n`.
pub fn radius_of_curvature(n: i32, harmonics: &[(i32, f64, f64)]) -> FourierCurve {
    assert!(harmonics.iter().all(|h| h.0 != n), "harmonic n would open the curve");
    let velocity = multiply(&real_terms(n as f64, &scale(harmonics, n as f64)), &[term(n, 1.0, 0.0)]);
    let terms: Vec<Term> = velocity
        .iter()
        .filter(|t| t.m != 0)
        .map(|t| {
            // ∫ c e^{imu} du = c/(im) e^{imu}
            let m = t.m as f64;
            term(t.m, t.im / m, -t.re / m)
        })
        .collect();
    from_terms(&terms)
}

fn scale(h: &[(i32, f64, f64)], s: f64) -> Vec<(i32, f64, f64)> {
    h.iter().map(|&(k, a, b)| (k, a * s, b * s)).collect()
}

/// What a fixture is meant to exercise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FixtureKind {
    /// Non-generic symmetric curve with closed-form equidistants.
    Analytic,
    Convex,
    /// Rosette `C_n`: no inflexions, rotation number `n`.
    Rosette(u32),
    /// Rotation number `n`, exactly two inflexions.
    TwoInflexion(u32),
    /// Several inflexions.
    Inflected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub kind: FixtureKind,
    pub curve: FourierCurve,
}

fn labelled(c: FourierCurve, name: &str) -> FourierCurve {
    c.with_label(String::from(name))
}

pub fn circle() -> FourierCurve {
    labelled(crate::curve::circle(1.0), "circle")
}

pub fn ellipse() -> FourierCurve {
    labelled(FourierCurve::new(vec![0.0, 2.0], vec![], vec![], vec![0.0, 1.0]).unwrap(), "ellipse")
}

/// Circle with a small counter-rotating second harmonic: convex, three-fold
/// symmetric and not centrally symmetric.
pub fn perturbed_ellipse() -> FourierCurve {
    labelled(
        FourierCurve::new(vec![0.0, 1.0, 0.06], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 1.0, -0.06]).unwrap(),
        "perturbed-ellipse",
    )
}

/// Rosette `C_n` for `n ∈ {2, 3, 4}`.
pub fn rosette(n: u32) -> FourierCurve {
    let h: &[(i32, f64, f64)] = match n {
        2 => &[(1, 0.5, 0.0), (3, 0.0, 0.1)],
        3 => &[(1, 0.5, 0.0), (2, 0.0, 0.1)],
        4 => &[(1, 0.5, 0.0), (3, 0.0, 0.1)],
        _ => panic!("rosette fixtures exist for n = 2, 3, 4"),
    };
    let name = match n {
        2 => "c2",
        3 => "c3",
        _ => "c4",
    };
    labelled(radius_of_curvature(n as i32, h), name)
}

/// Dimpled curve with rotation number 1 and two inflexions.
pub fn w1() -> FourierCurve {
    labelled(polar(&[(1, 0.75, 0.0), (2, 0.0, 0.05)]), "w1")
}

/// Rotation number 2 with two inflexions: a doubly wound curve with a
/// narrow dip in its radius.
pub fn w2() -> FourierCurve {
    let mut rho = fejer_bump(W2_BUMP_POWER, -W2_DIP);
    rho.extend(real_terms(1.0, &[(2, 0.0, 0.03)]));
    labelled(from_terms(&multiply(&rho, &[term(2, 1.0, 0.0)])), "w2")
}

/// Depth of the dip that turns a doubly wound oval into `W_2`.
pub const W2_DIP: f64 = 0.7;
pub const W2_BUMP_POWER: u32 = 6;

/// `scale·((1 + cos u)/2)^p`, a bump of width about `1/√p` at `u = 0`.
pub fn fejer_bump(p: u32, scale: f64) -> Vec<Term> {
    let mut b = vec![term(0, scale, 0.0)];
    for _ in 0..p {
        b = multiply(&b, &[term(0, 0.5, 0.0), term(1, 0.25, 0.0), term(-1, 0.25, 0.0)]);
    }
    b
}

/// Oval with four dimples and eight inflexions.
pub fn eight_inflexions() -> FourierCurve {
    labelled(polar(&[(4, 0.12, 0.0), (3, 0.02, 0.0), (1, 0.0, 0.03)]), "eight-inflexions")
}

/// Convex curve with radius of curvature `1 + 0.6·cos 3θ`; opposite points
/// have curvature ratio `(1 − 0.6c)/(1 + 0.6c)` with `c = cos 3θ`.
pub fn three_lobed() -> FourierCurve {
    labelled(radius_of_curvature(1, &[(3, 0.6, 0.0)]), "three-lobed")
}

/// Arcs of [`three_lobed`] on which `κ(u)/κ(u + π)` runs from 2 to 3, paired
/// with the opposite arcs. With `c = cos 3u` the ratio is
/// `(1 − 0.6c)/(1 + 0.6c)`, so the ends solve `c = −5/9` and `c = −5/6`.
pub fn three_lobed_arcs() -> ArcPair {
    let lo = (-5.0f64 / 9.0).acos() / 3.0;
    let hi = (-5.0f64 / 6.0).acos() / 3.0;
    ArcPair { first: (lo, hi), second: (lo + PI, hi + PI) }
}

pub const NAMES: [&str; 10] = [
    "circle",
    "ellipse",
    "perturbed-ellipse",
    "three-lobed",
    "c2",
    "c3",
    "c4",
    "w1",
    "w2",
    "eight-inflexions",
];

/// Every built-in fixture, in a fixed order.
pub fn all() -> Vec<Fixture> {
    vec![
        Fixture { name: "circle", kind: FixtureKind::Analytic, curve: circle() },
        Fixture { name: "ellipse", kind: FixtureKind::Analytic, curve: ellipse() },
        Fixture { name: "perturbed-ellipse", kind: FixtureKind::Convex, curve: perturbed_ellipse() },
        Fixture { name: "three-lobed", kind: FixtureKind::Convex, curve: three_lobed() },
        Fixture { name: "c2", kind: FixtureKind::Rosette(2), curve: rosette(2) },
        Fixture { name: "c3", kind: FixtureKind::Rosette(3), curve: rosette(3) },
        Fixture { name: "c4", kind: FixtureKind::Rosette(4), curve: rosette(4) },
        Fixture { name: "w1", kind: FixtureKind::TwoInflexion(1), curve: w1() },
        Fixture { name: "w2", kind: FixtureKind::TwoInflexion(2), curve: w2() },
        Fixture { name: "eight-inflexions", kind: FixtureKind::Inflected, curve: eight_inflexions() },
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}
