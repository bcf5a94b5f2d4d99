//! Closed regular plane curves given by finite Fourier series.
//!
//! A curve of degree `K` is
//!
//! ```text
//! x(t) = Σ_{k=0..K} xc[k]·cos kt + xs[k]·sin kt
//! y(t) = Σ_{k=0..K} yc[k]·cos kt + ys[k]·sin kt
//! ```
//!
//! with `t ∈ [0, 2π)`. Derivatives are exact. The sine coefficient at
//! index 0 is ignored.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::geom::{circular_distance, modulo, wrap_pi, Vec2};
use crate::roots::{bisect, golden_min};
use crate::settings::Settings;
#[allow(unused_imports)]
use num_traits::Float;

/// Highest harmonic accepted by [`FourierCurve::new`].
pub const MAX_DEGREE: usize = 64;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("coefficients must be finite and at least one harmonic must be non-zero")]
    InvalidCoefficients,
    #[error("degree {0} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("curve is not regular near t = {t} (|f'| = {speed:e})")]
    Irregular { t: f64, speed: f64 },
    #[error("degenerate inflexion near t = {t} (|φ''| = {second:e})")]
    DegenerateInflexion { t: f64, second: f64 },
    #[error("tangent-angle lift does not close up (residual {residual:e})")]
    LiftInconsistent { residual: f64 },
}

/// Value and first four derivatives of a curve at one parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub t: f64,
    pub p: Vec2,
    pub d1: Vec2,
    pub d2: Vec2,
    pub d3: Vec2,
    pub d4: Vec2,
}

impl Jet {
    #[inline]
    pub fn speed(&self) -> f64 {
        self.d1.norm()
    }

    #[inline]
    pub fn tangent(&self) -> Vec2 {
        self.d1 / self.speed()
    }

    /// `det[f', f'']`; vanishes exactly at inflexions.
    #[inline]
    pub fn det12(&self) -> f64 {
        self.d1.cross(self.d2)
    }

    /// `det[f', f''']`, the parameter derivative of [`Jet::det12`].
    #[inline]
    pub fn det13(&self) -> f64 {
        self.d1.cross(self.d3)
    }

    /// Signed curvature.
    #[inline]
    pub fn kappa(&self) -> f64 {
        let v = self.speed();
        self.det12() / (v * v * v)
    }

    /// `dθ/dt` where θ is the tangent angle.
    #[inline]
    pub fn theta_rate(&self) -> f64 {
        self.det12() / self.d1.norm2()
    }

    /// `d²θ/dt²`.
    #[inline]
    pub fn theta_accel(&self) -> f64 {
        let v2 = self.d1.norm2();
        self.det13() / v2 - 2.0 * self.det12() * self.d1.dot(self.d2) / (v2 * v2)
    }

    /// `dκ/dt`.
    #[inline]
    pub fn kappa_dt(&self) -> f64 {
        let v = self.speed();
        let v3 = v * v * v;
        self.det13() / v3 - 3.0 * self.det12() * self.d1.dot(self.d2) / (v3 * v * v)
    }

    /// Derivative of curvature with respect to arc length.
    #[inline]
    pub fn kappa_ds(&self) -> f64 {
        self.kappa_dt() / self.speed()
    }

    /// Centre of curvature; infinite at an inflexion.
    pub fn centre(&self) -> Vec2 {
        self.p + self.tangent().perp() / self.kappa()
    }
}

/// A closed parametrised curve with parameter period `2π`.
pub trait Curve {
    fn jet(&self, t: f64) -> Jet;

    fn point(&self, t: f64) -> Vec2 {
        self.jet(t).p
    }

    fn kappa(&self, t: f64) -> f64 {
        self.jet(t).kappa()
    }

    /// Tangent direction angle in `(-π, π]`.
    fn tangent_angle(&self, t: f64) -> f64 {
        self.jet(t).d1.angle()
    }
}

/// A closed curve given by trigonometric polynomials.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FourierCurve {
    pub xc: Vec<f64>,
    pub xs: Vec<f64>,
    pub yc: Vec<f64>,
    pub ys: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub label: Option<String>,
}

impl FourierCurve {
    /// Builds a curve and pads the four coefficient vectors to a common
    /// length. Regularity is checked separately by [`FourierCurve::validate`].
    pub fn new(
        xc: Vec<f64>,
        xs: Vec<f64>,
        yc: Vec<f64>,
        ys: Vec<f64>,
    ) -> Result<Self, CurveError> {
        let len = xc.len().max(xs.len()).max(yc.len()).max(ys.len());
        if len == 0 {
            return Err(CurveError::InvalidCoefficients);
        }
        if len - 1 > MAX_DEGREE {
            return Err(CurveError::DegreeTooLarge(len - 1));
        }
        let pad = |mut v: Vec<f64>| {
            v.resize(len, 0.0);
            v
        };
        let mut c = FourierCurve {
            xc: pad(xc),
            xs: pad(xs),
            yc: pad(yc),
            ys: pad(ys),
            label: None,
        };
        c.xs[0] = 0.0;
        c.ys[0] = 0.0;
        let all = c.xc.iter().chain(&c.xs).chain(&c.yc).chain(&c.ys);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(CurveError::InvalidCoefficients);
        }
        let nonconst = (1..len).any(|k| c.xc[k] != 0.0 || c.xs[k] != 0.0 || c.yc[k] != 0.0 || c.ys[k] != 0.0);
        if !nonconst {
            return Err(CurveError::InvalidCoefficients);
        }
        Ok(c)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Highest harmonic present.
    pub fn degree(&self) -> usize {
        self.xc.len() - 1
    }

    /// Checks regularity on a dense grid and returns the curve on success.
    pub fn validate(self, settings: &Settings) -> Result<Self, CurveError> {
        let n = settings.samples.max(256) * 4;
        let mut worst = (0.0, f64::INFINITY);
        for i in 0..n {
            let t = TAU * i as f64 / n as f64;
            let v = self.jet(t).speed();
            if v < worst.1 {
                worst = (t, v);
            }
        }
        // Refine the slowest grid point; a cusp may sit between samples.
        let h = TAU / n as f64;
        let (tm, vm) = golden_min(|t| self.jet(t).speed(), worst.0 - h, worst.0 + h, 1e-12);
        if vm.min(worst.1) < settings.tol.regularity {
            return Err(CurveError::Irregular { t: modulo(tm, TAU), speed: vm.min(worst.1) });
        }
        Ok(self)
    }

    /// Curve whose points are `A·f(t) + b`.
    pub fn affine_image(&self, a: [[f64; 2]; 2], b: Vec2) -> FourierCurve {
        let mut c = self.clone();
        for k in 0..self.xc.len() {
            c.xc[k] = a[0][0] * self.xc[k] + a[0][1] * self.yc[k];
            c.yc[k] = a[1][0] * self.xc[k] + a[1][1] * self.yc[k];
            c.xs[k] = a[0][0] * self.xs[k] + a[0][1] * self.ys[k];
            c.ys[k] = a[1][0] * self.xs[k] + a[1][1] * self.ys[k];
        }
        c.xc[0] += b.x;
        c.yc[0] += b.y;
        c
    }

    /// Same trace with parameter shifted: `g(t) = f(t + shift)`.
    pub fn shifted(&self, shift: f64) -> FourierCurve {
        let mut c = self.clone();
        for k in 1..self.xc.len() {
            let (s, co) = (k as f64 * shift).sin_cos();
            c.xc[k] = self.xc[k] * co + self.xs[k] * s;
            c.xs[k] = self.xs[k] * co - self.xc[k] * s;
            c.yc[k] = self.yc[k] * co + self.ys[k] * s;
            c.ys[k] = self.ys[k] * co - self.yc[k] * s;
        }
        c
    }

    /// Tangent-angle lift on a uniform grid starting at `origin`.
    pub fn angle_samples(&self, origin: f64, samples: usize) -> Result<AngleSamples, CurveError> {
        let mut n = samples.max(64);
        loop {
            let h = TAU / n as f64;
            let mut theta = Vec::with_capacity(n + 1);
            let mut prev = self.tangent_angle(origin);
            theta.push(prev);
            let mut fine = true;
            for i in 1..=n {
                let a = self.tangent_angle(origin + h * i as f64);
                let d = wrap_pi(a - wrap_pi(prev));
                if d.abs() >= PI / 4.0 {
                    fine = false;
                    break;
                }
                prev += d;
                theta.push(prev);
            }
            if fine {
                let turns = (theta[n] - theta[0]) / TAU;
                let rotation = turns.round();
                let residual = (turns - rotation).abs();
                if residual > 0.01 {
                    return Err(CurveError::LiftInconsistent { residual });
                }
                return Ok(AngleSamples { origin, step: h, theta, rotation: rotation as i64 });
            }
            if n >= 1 << 22 {
                return Err(CurveError::LiftInconsistent { residual: f64::NAN });
            }
            n *= 2;
        }
    }

    /// Rotation number (turning number) of the tangent.
    pub fn rotation_number(&self, settings: &Settings) -> Result<i64, CurveError> {
        Ok(self.angle_samples(0.0, settings.samples)?.rotation)
    }

    /// Parameters of all inflexion points in `[0, 2π)`, sorted.
    ///
    /// Fails with [`CurveError::DegenerateInflexion`] when `det[f', f'']` has
    /// a multiple root, i.e. when an inflexion is not ordinary.
    pub fn inflexions(&self, settings: &Settings) -> Result<Vec<f64>, CurveError> {
        let n = settings.samples.max(256);
        let h = TAU / n as f64;
        let rate = |t: f64| self.jet(t).theta_rate();
        let vals: Vec<f64> = (0..n).map(|i| rate(h * i as f64)).collect();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let width = settings.tol.root_width;
        let mut roots = Vec::new();
        for i in 0..n {
            let (a, b) = (h * i as f64, h * (i + 1) as f64);
            let (fa, fb) = (vals[i], vals[(i + 1) % n]);
            if fa == 0.0 || (fa < 0.0) != (fb < 0.0) {
                roots.push(self.polish_inflexion(a, b, fa, width));
            }
        }
        // Pairs of roots hidden inside a single cell, and double roots.
        for i in 0..n {
            let (vp, v, vn) = (vals[(i + n - 1) % n], vals[i], vals[(i + 1) % n]);
            let same = (vp < 0.0) == (v < 0.0) && (v < 0.0) == (vn < 0.0) && v != 0.0;
            if !same || v.abs() > vp.abs() || v.abs() > vn.abs() || v.abs() > 0.05 * scale {
                continue;
            }
            let sg = v.signum();
            let (a, b) = (h * i as f64 - h, h * i as f64 + h);
            let (tm, m) = golden_min(|t| sg * rate(t), a, b, 1e-13);
            if m < 0.0 {
                roots.push(self.polish_inflexion(a, tm, vp, width));
                roots.push(self.polish_inflexion(tm, b, m, width));
            } else if m < settings.tol.extremum {
                return Err(CurveError::DegenerateInflexion { t: modulo(tm, TAU), second: 0.0 });
            }
        }
        let mut out: Vec<f64> = roots.into_iter().map(|t| modulo(t, TAU)).collect();
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup_by(|a, b| circular_distance(*a, *b, TAU) < 1e3 * width);
        for &t in &out {
            let second = self.jet(t).theta_accel().abs();
            if second < settings.tol.extremum {
                return Err(CurveError::DegenerateInflexion { t, second });
            }
        }
        Ok(out)
    }

    fn polish_inflexion(&self, a: f64, b: f64, fa: f64, width: f64) -> f64 {
        let r = bisect(|t| self.jet(t).theta_rate(), a, b, fa, width);
        let j = self.jet(r);
        let next = r - j.det12() / j.det13();
        if next.is_finite() && (next - r).abs() <= width {
            next
        } else {
            r
        }
    }

    /// Runs every genericity test and collects the failures.
    pub fn genericity(&self, settings: &Settings) -> GenericityReport {
        let mut issues = Vec::new();
        if let Err(e) = self.clone().validate(settings) {
            issues.push(GenericityIssue::Curve(e));
            return GenericityReport { issues };
        }
        if let Err(e) = self.angle_samples(0.0, settings.samples) {
            issues.push(GenericityIssue::Curve(e));
        }
        match self.inflexions(settings) {
            Err(e) => issues.push(GenericityIssue::Curve(e)),
            Ok(infl) => {
                let dirs: Vec<f64> = infl.iter().map(|&t| modulo(self.tangent_angle(t), PI)).collect();
                for i in 0..dirs.len() {
                    for j in i + 1..dirs.len() {
                        let gap = circular_distance(dirs[i], dirs[j], PI);
                        if gap < settings.tol.parallel {
                            issues.push(GenericityIssue::ParallelInflexionTangents { t1: infl[i], t2: infl[j], gap });
                        }
                    }
                }
            }
        }
        if self.is_centrally_symmetric() {
            issues.push(GenericityIssue::CentrallySymmetric);
        }
        GenericityReport { issues }
    }

    /// True when `f(t + π)` is the reflection of `f(t)` through a centre,
    /// which happens exactly when every even harmonic above 0 vanishes.
    pub fn is_centrally_symmetric(&self) -> bool {
        let scale = self.coefficient_scale();
        (2..self.xc.len()).step_by(2).all(|k| {
            [self.xc[k], self.xs[k], self.yc[k], self.ys[k]]
                .iter()
                .all(|c| c.abs() <= 1e-12 * scale)
        })
    }

    fn coefficient_scale(&self) -> f64 {
        self.xc.iter().chain(&self.xs).chain(&self.yc).chain(&self.ys).fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

impl Curve for FourierCurve {
    fn jet(&self, t: f64) -> Jet {
        let (s1, c1) = t.sin_cos();
        let (mut ck, mut sk) = (1.0f64, 0.0f64);
        let mut j = Jet { t, p: Vec2::ZERO, d1: Vec2::ZERO, d2: Vec2::ZERO, d3: Vec2::ZERO, d4: Vec2::ZERO };
        for k in 0..self.xc.len() {
            if k > 0 {
                let nc = ck * c1 - sk * s1;
                sk = sk * c1 + ck * s1;
                ck = nc;
            }
            let kf = k as f64;
            let (k2, k3, k4) = (kf * kf, kf * kf * kf, kf * kf * kf * kf);
            let cos_part = Vec2::new(self.xc[k], self.yc[k]);
            let sin_part = Vec2::new(self.xs[k], self.ys[k]);
            let even = cos_part * ck + sin_part * sk;
            let odd = sin_part * ck - cos_part * sk;
            j.p = j.p + even;
            j.d1 = j.d1 + odd * kf;
            j.d2 = j.d2 - even * k2;
            j.d3 = j.d3 - odd * k3;
            j.d4 = j.d4 + even * k4;
        }
        j
    }
}

/// Tangent-angle lift on the grid `origin + i·step`, `i = 0..=n`.
#[derive(Clone, Debug)]
pub struct AngleSamples {
    pub origin: f64,
    pub step: f64,
    pub theta: Vec<f64>,
    pub rotation: i64,
}

impl AngleSamples {
    pub fn len(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Continuous lift at any real parameter, extended quasi-periodically.
    pub fn lift<C: Curve + ?Sized>(&self, curve: &C, t: f64) -> f64 {
        let n = self.len();
        let rel = t - self.origin;
        let wraps = (rel / TAU).floor();
        let local = rel - wraps * TAU;
        let i = ((local / self.step).round() as usize).min(n);
        let base = self.theta[i];
        let theta = base + wrap_pi(curve.tangent_angle(t) - base);
        theta + wraps * TAU * self.rotation as f64
    }
}

/// What kept a curve from being generic.
#[derive(Clone, Debug, PartialEq)]
pub enum GenericityIssue {
    Curve(CurveError),
    ParallelInflexionTangents { t1: f64, t2: f64, gap: f64 },
    CentrallySymmetric,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenericityReport {
    pub issues: Vec<GenericityIssue>,
}

impl GenericityReport {
    pub fn is_generic(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Unit circle, the simplest non-generic curve.
pub fn circle(radius: f64) -> FourierCurve {
    FourierCurve::new(vec![0.0, radius], vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, radius])
        .expect("circle coefficients are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse() -> FourierCurve {
        FourierCurve::new(vec![0.0, 2.0], vec![], vec![], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn circle_curvature_is_reciprocal_radius() {
        let c = circle(2.0);
        for i in 0..16 {
            assert!((c.kappa(i as f64 * 0.4) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn ellipse_vertices() {
        let e = ellipse();
        assert!((e.kappa(0.0) - 2.0).abs() < 1e-14);
        assert!((e.kappa(PI / 2.0) - 0.25).abs() < 1e-14);
        assert!(e.jet(0.0).kappa_dt().abs() < 1e-14);
    }

    #[test]
    fn shift_preserves_trace() {
        let c = FourierCurve::new(vec![0.1, 1.0, 0.2], vec![0.0, 0.3, -0.1], vec![0.0, 0.1, 0.05], vec![0.0, 1.0, 0.2]).unwrap();
        let s = c.shifted(0.7);
        for i in 0..10 {
            let t = i as f64 * 0.3;
            assert!(s.point(t).dist(c.point(t + 0.7)) < 1e-13);
        }
    }

    #[test]
    fn rejects_empty_and_large() {
        assert_eq!(FourierCurve::new(vec![1.0], vec![], vec![], vec![]), Err(CurveError::InvalidCoefficients));
        assert_eq!(
            FourierCurve::new(vec![0.0; 70], vec![], vec![], vec![]),
            Err(CurveError::DegreeTooLarge(69))
        );
    }

    #[test]
    fn convex_curve_has_no_inflexions() {
        let s = Settings::default();
        assert!(ellipse().inflexions(&s).unwrap().is_empty());
        assert_eq!(ellipse().rotation_number(&s).unwrap(), 1);
    }
}
