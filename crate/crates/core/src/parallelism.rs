//! The angle function, the parallel set `S_M` and parallel pairings.
//!
//! After shifting the origin off the inflexions, the tangent-angle lift `θ`
//! reduced modulo `π` gives the angle function `ψ`. Its extremum values are
//! the *levels*; the points whose tangent is parallel to an inflexion
//! tangent form `S_M`, which cuts `M` into arcs. Every arc sweeps exactly
//! one interval between consecutive levels, and the arcs sweeping the same
//! interval form a set `Φ_i`. Any two arcs of one set are paired by parallel
//! tangents.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::curve::{AngleSamples, Curve, CurveError, FourierCurve};
use crate::geom::{circular_distance, modulo};
use crate::roots::safe_newton;
use crate::settings::Settings;
#[allow(unused_imports)]
use num_traits::Float;

/// Number of candidate origins tried when the default one is an inflexion.
pub const ORIGIN_CANDIDATES: usize = 101;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParallelError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("no admissible origin away from the inflexions")]
    OriginUnavailable,
    #[error("extremum levels at t = {t1} and t = {t2} coincide modulo π (gap {gap:e})")]
    CoincidentLevels { t1: f64, t2: f64, gap: f64 },
    #[error("points of the parallel set at t = {t1} and t = {t2} coincide")]
    TangentCoincidence { t1: f64, t2: f64 },
    #[error("arc {arc} does not sweep a whole level interval")]
    Inconsistent { arc: usize },
    #[error("continuation stalled pairing arcs {a} and {b} at angle offset {u}")]
    ContinuationStall { a: usize, b: usize, u: f64 },
    #[error("arcs {a} and {b} do not belong to the same set")]
    NotPaired { a: usize, b: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ExtremumKind {
    Max,
    Min,
}

/// An inflexion of the curve seen as an extremum of the angle function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    /// Parameter in `[origin, origin + 2π)`.
    pub t: f64,
    pub theta: f64,
    pub psi: f64,
    pub kind: ExtremumKind,
}

/// Tangent-angle lift with an origin that avoids the inflexions.
#[derive(Clone, Debug)]
pub struct AngleFunction {
    pub origin: f64,
    /// Index `j` of the origin `j·2π/101` that was used.
    pub shift_index: usize,
    pub samples: AngleSamples,
    pub theta0: f64,
    pub extrema: Vec<Extremum>,
}

impl AngleFunction {
    pub fn new(curve: &FourierCurve, settings: &Settings) -> Result<Self, ParallelError> {
        let infl = curve.inflexions(settings)?;
        let shift_index = (0..ORIGIN_CANDIDATES)
            .find(|&j| {
                let o = TAU * j as f64 / ORIGIN_CANDIDATES as f64;
                infl.iter().all(|&t| circular_distance(o, t, TAU) > 1e-3)
            })
            .ok_or(ParallelError::OriginUnavailable)?;
        let origin = TAU * shift_index as f64 / ORIGIN_CANDIDATES as f64;
        let samples = curve.angle_samples(origin, settings.samples)?;
        let theta0 = samples.theta[0];
        let mut extrema: Vec<Extremum> = infl
            .iter()
            .map(|&t| {
                let t = origin + modulo(t - origin, TAU);
                let theta = samples.lift(curve, t);
                let kind = if curve.jet(t).theta_accel() < 0.0 { ExtremumKind::Max } else { ExtremumKind::Min };
                Extremum { t, theta, psi: modulo(theta - theta0, PI), kind }
            })
            .collect();
        extrema.sort_by(|a, b| a.t.total_cmp(&b.t));
        for i in 0..extrema.len() {
            for j in i + 1..extrema.len() {
                let gap = circular_distance(extrema[i].psi, extrema[j].psi, PI);
                if gap < settings.tol.parallel {
                    return Err(ParallelError::CoincidentLevels { t1: extrema[i].t, t2: extrema[j].t, gap });
                }
            }
        }
        Ok(AngleFunction { origin, shift_index, samples, theta0, extrema })
    }

    pub fn rotation(&self) -> i64 {
        self.samples.rotation
    }

    pub fn theta(&self, curve: &FourierCurve, t: f64) -> f64 {
        self.samples.lift(curve, t)
    }

    pub fn psi(&self, curve: &FourierCurve, t: f64) -> f64 {
        modulo(self.theta(curve, t) - self.theta0, PI)
    }

    /// Pieces of `[origin, origin + 2π]` on which `θ` is monotone, as
    /// `(t_start, t_end)` with `t_end` possibly past `origin + 2π`.
    pub fn monotone_pieces(&self) -> Vec<(f64, f64)> {
        let e = &self.extrema;
        if e.is_empty() {
            return alloc::vec![(self.origin, self.origin + TAU)];
        }
        (0..e.len())
            .map(|k| if k + 1 < e.len() { (e[k].t, e[k + 1].t) } else { (e[k].t, e[0].t + TAU) })
            .collect()
    }

    /// All parameters in `[origin, origin + 2π)` where `ψ = level`, other
    /// than the extrema themselves. Returned as `(t, θ)` pairs.
    pub fn level_points(&self, curve: &FourierCurve, level: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (a, b) in self.monotone_pieces() {
            let (ta, tb) = (self.theta(curve, a), self.theta(curve, b));
            let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
            let base = self.theta0 + level;
            let jmin = ((lo - base) / PI).ceil() as i64 - 1;
            let jmax = ((hi - base) / PI).floor() as i64 + 1;
            for j in jmin..=jmax {
                let target = base + PI * j as f64;
                let end_gap = (target - lo).abs().min((target - hi).abs());
                if target <= lo || target >= hi || end_gap < 1e-12 {
                    continue;
                }
                let f = |t: f64| (self.theta(curve, t) - target, curve.jet(t).theta_rate());
                if let Some(t) = safe_newton(f, a, b, 0.5 * (a + b), 1e-14) {
                    let t = self.origin + modulo(t - self.origin, TAU);
                    out.push((t, self.theta(curve, t)));
                }
            }
            if self.extrema.is_empty() && circular_distance(level, 0.0, PI) < 1e-14 {
                out.push((self.origin, self.theta0));
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }
}

/// A point of `S_M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParallelPoint {
    /// Parameter in `[origin, origin + 2π)`.
    pub t: f64,
    pub theta: f64,
    /// Index into [`ParallelStructure::levels`].
    pub level: usize,
    pub inflexion: Option<ExtremumKind>,
    /// Parity of `j` in `θ = θ0 + level + jπ`; points of one level with
    /// equal parity have equal (not opposite) tangent directions.
    pub parity: u8,
}

/// The arc of `M` between two consecutive points of `S_M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParallelArc {
    pub start: usize,
    pub end: usize,
    pub t_start: f64,
    /// Unwrapped so that `t_end > t_start`.
    pub t_end: f64,
    pub theta_start: f64,
    pub theta_end: f64,
    /// Index of the level interval (the set `Φ_i`) this arc sweeps.
    pub set: usize,
}

impl ParallelArc {
    pub fn increasing(&self) -> bool {
        self.theta_end > self.theta_start
    }

    pub fn width(&self) -> f64 {
        (self.theta_end - self.theta_start).abs()
    }

    /// Endpoint with the smaller `ψ`, as a point index.
    pub fn lower(&self) -> usize {
        if self.increasing() { self.start } else { self.end }
    }

    pub fn upper(&self) -> usize {
        if self.increasing() { self.end } else { self.start }
    }

    pub fn t_lower(&self) -> f64 {
        if self.increasing() { self.t_start } else { self.t_end }
    }

    pub fn t_upper(&self) -> f64 {
        if self.increasing() { self.t_end } else { self.t_start }
    }

    pub fn theta_lower(&self) -> f64 {
        self.theta_start.min(self.theta_end)
    }

    /// Parameter of the point where `θ = θ_lower + u`.
    pub fn solve(&self, curve: &FourierCurve, angle: &AngleFunction, u: f64, from: f64, guess: f64) -> Option<f64> {
        let target = self.theta_lower() + u;
        let f = |t: f64| (angle.theta(curve, t) - target, curve.jet(t).theta_rate());
        safe_newton(f, from, self.t_upper(), guess, 1e-14)
    }
}

/// `S_M` together with its arcs and level sets.
#[derive(Clone, Debug)]
pub struct ParallelStructure {
    pub angle: AngleFunction,
    /// Sorted extremum values of `ψ` in `[0, π)`.
    pub levels: Vec<f64>,
    pub points: Vec<ParallelPoint>,
    pub arcs: Vec<ParallelArc>,
    /// Arc indices of each set `Φ_i`, sorted.
    pub sets: Vec<Vec<usize>>,
}

impl ParallelStructure {
    pub fn new(curve: &FourierCurve, settings: &Settings) -> Result<Self, ParallelError> {
        let angle = AngleFunction::new(curve, settings)?;
        Self::from_angle(curve, angle, settings)
    }

    pub fn from_angle(curve: &FourierCurve, angle: AngleFunction, settings: &Settings) -> Result<Self, ParallelError> {
        let mut levels: Vec<f64> = angle.extrema.iter().map(|e| e.psi).collect();
        if levels.is_empty() {
            levels.push(0.0);
        }
        levels.sort_by(|a, b| a.total_cmp(b));
        let level_of = |psi: f64| {
            (0..levels.len())
                .min_by(|&i, &j| circular_distance(psi, levels[i], PI).total_cmp(&circular_distance(psi, levels[j], PI)))
                .unwrap()
        };
        let parity = |theta: f64, level: f64| {
            let j = ((theta - angle.theta0 - level) / PI).round() as i64;
            j.rem_euclid(2) as u8
        };
        let mut points = Vec::new();
        for (li, &l) in levels.iter().enumerate() {
            for (t, theta) in angle.level_points(curve, l) {
                points.push(ParallelPoint { t, theta, level: li, inflexion: None, parity: parity(theta, l) });
            }
        }
        for e in &angle.extrema {
            let li = level_of(e.psi);
            points.push(ParallelPoint { t: e.t, theta: e.theta, level: li, inflexion: Some(e.kind), parity: parity(e.theta, levels[li]) });
        }
        points.sort_by(|a, b| a.t.total_cmp(&b.t));
        let n = points.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if n > 1 && circular_distance(points[i].t, points[j].t, TAU) < settings.tol.coincidence {
                return Err(ParallelError::TangentCoincidence { t1: points[i].t, t2: points[j].t });
            }
        }
        let rot = angle.rotation() as f64;
        let q = levels.len();
        let width = |i: usize| if i + 1 < q { levels[i + 1] - levels[i] } else { levels[0] + PI - levels[i] };
        let mut arcs = Vec::with_capacity(n);
        let mut sets = alloc::vec![Vec::new(); q];
        for i in 0..n {
            let j = (i + 1) % n;
            let wrap = j == 0;
            let arc0 = ParallelArc {
                start: i,
                end: j,
                t_start: points[i].t,
                t_end: points[j].t + if wrap { TAU } else { 0.0 },
                theta_start: points[i].theta,
                theta_end: points[j].theta + if wrap { TAU * rot } else { 0.0 },
                set: 0,
            };
            let set = points[arc0.lower()].level;
            if (arc0.width() - width(set)).abs() > 1e-6 {
                return Err(ParallelError::Inconsistent { arc: i });
            }
            arcs.push(ParallelArc { set, ..arc0 });
            sets[set].push(i);
        }
        Ok(ParallelStructure { angle, levels, points, arcs, sets })
    }

    /// Width of the level interval of set `i`.
    pub fn set_width(&self, i: usize) -> f64 {
        let q = self.levels.len();
        if i + 1 < q { self.levels[i + 1] - self.levels[i] } else { self.levels[0] + PI - self.levels[i] }
    }

    /// Index of the point of `S_M` at an inflexion, in the order of the
    /// points.
    pub fn inflexion_points(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| self.points[i].inflexion.is_some()).collect()
    }

    /// The two arcs meeting at point `p`: `(arc ending at p, arc starting at p)`.
    pub fn arcs_at(&self, p: usize) -> (usize, usize) {
        let n = self.points.len();
        ((p + n - 1) % n, p)
    }

    /// Pairs two arcs of the same set by parallel tangents.
    pub fn pair(&self, curve: &FourierCurve, a: usize, b: usize, settings: &Settings) -> Result<ParallelPairing, ParallelError> {
        let (arc_a, arc_b) = (&self.arcs[a], &self.arcs[b]);
        if arc_a.set != arc_b.set {
            return Err(ParallelError::NotPaired { a, b });
        }
        let w = self.set_width(arc_a.set);
        let h = settings.param_step();
        let stall = |u: f64| ParallelError::ContinuationStall { a, b, u };
        let k = ((w / settings.max_angle_step).ceil() as usize).max(2);
        let mut nodes = Vec::with_capacity(k + 1);
        nodes.push(PairNode { u: 0.0, s: arc_a.t_lower(), t: arc_b.t_lower() });
        for i in 1..k {
            let u = w * i as f64 / k as f64;
            let prev = *nodes.last().unwrap();
            let predict = |from: f64| {
                let rate = curve.jet(from).theta_rate();
                let du = u - prev.u;
                let step = du / rate;
                if step.is_finite() { from + step } else { from }
            };
            let s = arc_a.solve(curve, &self.angle, u, prev.s, predict(prev.s)).ok_or_else(|| stall(u))?;
            let t = arc_b.solve(curve, &self.angle, u, prev.t, predict(prev.t)).ok_or_else(|| stall(u))?;
            nodes.push(PairNode { u, s, t });
        }
        nodes.push(PairNode { u: w, s: arc_a.t_upper(), t: arc_b.t_upper() });
        // Bisect in the angle until both parameters move by at most `h`.
        let mut out = Vec::with_capacity(nodes.len() * 2);
        out.push(nodes[0]);
        for win in nodes.windows(2) {
            let mut stack = alloc::vec![(win[0], win[1])];
            while let Some((l, r)) = stack.pop() {
                if (r.s - l.s).abs() <= h && (r.t - l.t).abs() <= h {
                    out.push(r);
                    continue;
                }
                let u = 0.5 * (l.u + r.u);
                if r.u - l.u < 1e-13 {
                    return Err(stall(u));
                }
                let s = arc_a.solve(curve, &self.angle, u, l.s, 0.5 * (l.s + r.s)).ok_or_else(|| stall(u))?;
                let t = arc_b.solve(curve, &self.angle, u, l.t, 0.5 * (l.t + r.t)).ok_or_else(|| stall(u))?;
                let m = PairNode { u, s, t };
                stack.push((m, r));
                stack.push((l, m));
            }
        }
        Ok(ParallelPairing { a, b, width: w, nodes: out })
    }
}

/// Corresponding parameters on two paired arcs at angle offset `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairNode {
    pub u: f64,
    pub s: f64,
    pub t: f64,
}

/// The parallel-tangent correspondence between two arcs of one set.
#[derive(Clone, Debug, PartialEq)]
pub struct ParallelPairing {
    pub a: usize,
    pub b: usize,
    pub width: f64,
    /// Sorted by `u`, from the lower to the upper endpoints.
    pub nodes: Vec<PairNode>,
}

impl ParallelPairing {
    /// The same correspondence read from the other arc.
    pub fn swapped(&self) -> ParallelPairing {
        ParallelPairing {
            a: self.b,
            b: self.a,
            width: self.width,
            nodes: self.nodes.iter().map(|n| PairNode { u: n.u, s: n.t, t: n.s }).collect(),
        }
    }
}

/// Every parameter `t' ≠ t` whose tangent is parallel to the tangent at `t`.
pub fn parallel_partners(curve: &FourierCurve, angle: &AngleFunction, t: f64) -> Vec<f64> {
    let t = angle.origin + modulo(t - angle.origin, TAU);
    let psi = angle.psi(curve, t);
    let mut out: Vec<f64> = angle
        .level_points(curve, psi)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| circular_distance(p, t, TAU) > 1e-9)
        .collect();
    for e in &angle.extrema {
        if circular_distance(e.psi, psi, PI) < 1e-12 && circular_distance(e.t, t, TAU) > 1e-9 {
            out.push(e.t);
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}
