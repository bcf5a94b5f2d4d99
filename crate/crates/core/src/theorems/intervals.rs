//! Values of λ for which the equidistant of two arcs must be singular,
//! predicted from curvature ratios at the ends of the arcs.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::curve::{Curve, FourierCurve};
use crate::equidistant::{opposite_curvatures, singularity_margin, CurveAnalysis};
use crate::geom::{circular_distance, modulo, wrap_pi};
use crate::parallelism::parallel_partners;

/// Samples per arc when scanning a two-arc equidistant.
pub const ARC_SAMPLES: usize = 512;

/// Length of the sampled stretch of an unbounded interval.
pub const UNBOUNDED_SPAN: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TheoremError {
    #[error("hypothesis {clause} does not hold")]
    HypothesisViolated { clause: &'static str },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Sides {
    Same,
    Different,
}

/// Whether `M` is curved in the same side at the parallel pair `(s, t)`:
/// the centre of curvature at `a` and that of the translate of `M` taking
/// `b` to `a` lie in the same half-plane of the tangent line at `a`.
/// `None` at a point of zero curvature.
pub fn curved_sides(curve: &FourierCurve, s: f64, t: f64) -> Option<Sides> {
    let (ja, jb) = (curve.jet(s), curve.jet(t));
    if ja.kappa() == 0.0 || jb.kappa() == 0.0 {
        return None;
    }
    let ca = ja.centre();
    let cb = jb.centre() + (ja.p - jb.p);
    let ta = ja.tangent();
    let da = ta.cross(ca - ja.p);
    let db = ta.cross(cb - ja.p);
    Some(if (da > 0.0) == (db > 0.0) { Sides::Same } else { Sides::Different })
}

/// Two arcs of one curve as parameter intervals. The curvature ratios are
/// read as `κ(first)/κ(second)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArcPair {
    pub first: (f64, f64),
    pub second: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingularIntervalPrediction {
    pub rho_min: f64,
    pub rho_max: f64,
    pub sides: Sides,
    /// `(p₁, p₀)` and `(q₁, q₀)`: parameters of the paired endpoints.
    pub endpoints: [(f64, f64); 2],
    /// Closed intervals of λ, possibly unbounded, sorted.
    pub intervals: Vec<(f64, f64)>,
}

fn in_interval(p: f64, iv: (f64, f64)) -> bool {
    modulo(p - iv.0, TAU) <= iv.1 - iv.0 + 1e-9
}

/// The unique partner of `s` on the arc `iv`.
fn partner_on(an: &CurveAnalysis, s: f64, iv: (f64, f64)) -> Result<f64, TheoremError> {
    let found: Vec<f64> =
        parallel_partners(&an.curve, &an.structure.angle, s).into_iter().filter(|&p| in_interval(p, iv)).collect();
    match found.as_slice() {
        [p] => Ok(iv.0 + modulo(p - iv.0, TAU)),
        _ => Err(TheoremError::HypothesisViolated { clause: "(ii) every point of the first arc has one partner" }),
    }
}

fn samples(iv: (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| iv.0 + (iv.1 - iv.0) * i as f64 / n as f64)
}

/// Intervals of λ with a singular point, given the extreme curvature
/// ratios at the ends of the arcs.
pub fn singular_intervals(rho_min: f64, rho_max: f64, sides: Sides) -> Vec<(f64, f64)> {
    let sorted = |a: f64, b: f64| if a <= b { (a, b) } else { (b, a) };
    let mut out = match sides {
        Sides::Different => {
            let f = |r: f64| r / (1.0 + r);
            alloc::vec![sorted(f(rho_min), f(rho_max)), sorted(1.0 - f(rho_max), 1.0 - f(rho_min))]
        }
        Sides::Same => {
            let g = |r: f64| r / (r - 1.0);
            if rho_min < 1.0 && 1.0 < rho_max {
                alloc::vec![(f64::NEG_INFINITY, 1.0 - g(rho_max)), (g(rho_max), f64::INFINITY)]
            } else {
                alloc::vec![sorted(g(rho_min), g(rho_max)), sorted(1.0 - g(rho_max), 1.0 - g(rho_min))]
            }
        }
    };
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out.dedup();
    out
}

/// Checks the hypotheses on the two arcs and predicts the singular λ.
pub fn predict_singular_intervals(an: &CurveAnalysis, pair: ArcPair) -> Result<SingularIntervalPrediction, TheoremError> {
    let curve = &an.curve;
    let (p1, q1) = pair.first;
    let (p0, q0) = (partner_on(an, p1, pair.second)?, partner_on(an, q1, pair.second)?);
    let ends = [pair.second.0, pair.second.1];
    for e in [p0, q0] {
        if ends.iter().all(|&x| circular_distance(x, e, TAU) > an.settings.tol.parallel) {
            return Err(TheoremError::HypothesisViolated { clause: "(i) endpoints form parallel pairs" });
        }
    }
    let k0: Vec<f64> = samples(pair.second, ARC_SAMPLES).map(|t| curve.kappa(t)).collect();
    let tol = an.settings.tol.regularity;
    let sign = k0[0].signum();
    if k0.iter().any(|k| k.abs() < tol || k.signum() != sign) || curve.kappa(p1).abs() < tol || curve.kappa(q1).abs() < tol {
        return Err(TheoremError::HypothesisViolated { clause: "(iii) curvature does not vanish" });
    }
    let mut turn = 0.0;
    let mut prev = curve.tangent_angle(pair.second.0);
    for t in samples(pair.second, ARC_SAMPLES).skip(1) {
        let a = curve.tangent_angle(t);
        turn += wrap_pi(a - prev);
        prev = a;
    }
    if turn.abs() >= PI {
        return Err(TheoremError::HypothesisViolated { clause: "(iv) rotation of the second arc is below 1/2" });
    }
    let sp = curved_sides(curve, p1, p0);
    let sq = curved_sides(curve, q1, q0);
    let sides = match (sp, sq) {
        (Some(a), Some(b)) if a == b => a,
        _ => return Err(TheoremError::HypothesisViolated { clause: "(v) both endpoint pairs curve to one kind of side" }),
    };
    let rp = (curve.kappa(p1) / curve.kappa(p0)).abs();
    let rq = (curve.kappa(q1) / curve.kappa(q0)).abs();
    let (rho_min, rho_max) = (rp.min(rq), rp.max(rq));
    Ok(SingularIntervalPrediction {
        rho_min,
        rho_max,
        sides,
        endpoints: [(p1, p0), (q1, q0)],
        intervals: singular_intervals(rho_min, rho_max, sides),
    })
}

/// Eight sample values inside an interval, at the midpoints of eight equal
/// parts; unbounded intervals are sampled over [`UNBOUNDED_SPAN`] from the
/// finite end.
pub fn interval_samples(iv: (f64, f64)) -> [f64; 8] {
    let (lo, hi) = match (iv.0.is_finite(), iv.1.is_finite()) {
        (true, true) => iv,
        (false, true) => (iv.1 - UNBOUNDED_SPAN, iv.1),
        (true, false) => (iv.0, iv.0 + UNBOUNDED_SPAN),
        (false, false) => (-UNBOUNDED_SPAN, UNBOUNDED_SPAN),
    };
    core::array::from_fn(|j| lo + (hi - lo) * (j as f64 + 0.5) / 8.0)
}

/// Number of singular points of `E_λ` of the two arcs, counted as sign
/// changes of the singularity margin along the first arc, for both
/// orders of each pair.
pub fn arc_pair_cusps(an: &CurveAnalysis, pair: ArcPair, lambda: f64) -> Result<usize, TheoremError> {
    let mut prev: Option<(f64, f64)> = None;
    let mut count = 0;
    for s in samples(pair.first, ARC_SAMPLES) {
        let t = partner_on(an, s, pair.second)?;
        let (ja, jb) = (an.curve.jet(s), an.curve.jet(t));
        let (ka, kb, _) = opposite_curvatures(&ja, &jb);
        let (kb2, ka2, _) = opposite_curvatures(&jb, &ja);
        let m = (singularity_margin(lambda, ka, kb), singularity_margin(lambda, kb2, ka2));
        if let Some(p) = prev {
            count += usize::from((p.0 < 0.0) != (m.0 < 0.0)) + usize::from((p.1 < 0.0) != (m.1 < 0.0));
        }
        prev = Some(m);
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15
    }

    #[test]
    fn different_sides_ratios_two_and_three() {
        let iv = singular_intervals(2.0, 3.0, Sides::Different);
        assert!(close(iv[0], (0.25, 1.0 / 3.0)));
        assert!(close(iv[1], (2.0 / 3.0, 0.75)));
    }

    #[test]
    fn symmetric_arcs_give_one_half() {
        assert_eq!(singular_intervals(1.0, 1.0, Sides::Different), [(0.5, 0.5)]);
    }

    #[test]
    fn same_side_bounded_and_unbounded() {
        let iv = singular_intervals(2.0, 3.0, Sides::Same);
        assert!(close(iv[0], (-1.0, -0.5)));
        assert!(close(iv[1], (1.5, 2.0)));
        let iv = singular_intervals(0.5, 3.0, Sides::Same);
        assert_eq!(iv[0].0, f64::NEG_INFINITY);
        assert!((iv[0].1 + 0.5).abs() < 1e-15);
        assert!((iv[1].0 - 1.5).abs() < 1e-15);
        assert_eq!(iv[1].1, f64::INFINITY);
    }

    #[test]
    fn samples_are_interior() {
        let s = interval_samples((0.25, 1.0 / 3.0));
        assert!(s.iter().all(|&x| x > 0.25 && x < 1.0 / 3.0));
        let s = interval_samples((1.5, f64::INFINITY));
        assert!(s.iter().all(|&x| x > 1.5 && x < 3.5));
    }
}
