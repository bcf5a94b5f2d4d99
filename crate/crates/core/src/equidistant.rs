//! Branches of affine λ-equidistants and of the Centre Symmetry Set.
//!
//! A branch is traced by walking its glueing scheme: each step reads the
//! parallel pairing of two arcs and maps every pair `(a, b)` to
//! `λ·a + (1 − λ)·b`.
//!
//! Curvatures of a pair are taken with `b` read against the direction of
//! `a` (see [`opposite_curvatures`]). With that convention the point moves
//! with velocity `−g/(κ_a κ̃_b)·T_a` per unit of tangent angle, where
//! `g = (1 − λ)κ_a − λκ̃_b`. Cusps are the zeros of `g`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::curve::{Curve, CurveError, FourierCurve, Jet};
use crate::geom::{wrap_pi, Vec2};
use crate::gluing::{maximal_schemes, Closure, GlueingScheme, GluingError, LambdaClass};
use crate::parallelism::{PairNode, ParallelArc, ParallelError, ParallelPairing, ParallelStructure};
use crate::roots::{bisect, golden_min, safe_newton};
use crate::settings::Settings;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EquidistantError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Parallel(#[from] ParallelError),
    #[error(transparent)]
    Gluing(#[from] GluingError),
    #[error("λ = {0} is not admissible here")]
    InvalidLambda(f64),
    #[error("scheme class does not match λ = {0}")]
    ClassMismatch(f64),
    #[error("singularity margin touches zero without changing sign on step {step} near angle offset {u}")]
    TangentialRoot { step: usize, u: f64 },
    #[error("point is a cusp (margin {margin:e})")]
    AtCusp { margin: f64 },
    #[error("branch direction does not close up (residual {residual:e})")]
    LiftInconsistent { residual: f64 },
    #[error("branch is not closed")]
    OpenBranch,
    #[error("point {0} of the parallel set is not an inflexion")]
    NotInflexion(usize),
    #[error("fourth-order contact term vanishes at the inflexion (|F⁗| = {0:e})")]
    DegenerateQuartic(f64),
    #[error("no partner found near the inflexion")]
    PartnerMissing,
}

/// Curvatures `(κ_a, κ̃_b, σ)` of a parallel pair, where `σ = ±1` says
/// whether the tangents agree and `κ̃_b = −σ·κ_b` is the curvature at `b`
/// for the parametrisation running against the direction of `a`.
#[inline]
pub fn opposite_curvatures(ja: &Jet, jb: &Jet) -> (f64, f64, f64) {
    let sigma = if ja.d1.dot(jb.d1) >= 0.0 { 1.0 } else { -1.0 };
    (ja.kappa(), -sigma * jb.kappa(), sigma)
}

/// `g = (1 − λ)κ_a − λκ̃_b`; zero exactly at cusps.
#[inline]
pub fn singularity_margin(lambda: f64, kappa_a: f64, kappa_b: f64) -> f64 {
    (1.0 - lambda) * kappa_a - lambda * kappa_b
}

/// Curvature of `E_λ` at `λa + (1 − λ)b`:
/// `κ_a|κ̃_b| / |λκ̃_b − (1 − λ)κ_a|`.
pub fn equidistant_curvature(lambda: f64, kappa_a: f64, kappa_b: f64) -> Result<f64, EquidistantError> {
    let den = lambda * kappa_b - (1.0 - lambda) * kappa_a;
    if den.abs() < 1e-12 {
        return Err(EquidistantError::AtCusp { margin: den });
    }
    Ok(kappa_a * kappa_b.abs() / den.abs())
}

/// Curvature of `E_λ` at the point of the pair `(s, t)`.
pub fn branch_curvature(curve: &FourierCurve, lambda: f64, s: f64, t: f64) -> Result<f64, EquidistantError> {
    let (ka, kb, _) = opposite_curvatures(&curve.jet(s), &curve.jet(t));
    equidistant_curvature(lambda, ka, kb)
}

/// A curve together with its parallel structure and every pairing.
#[derive(Clone, Debug)]
pub struct CurveAnalysis {
    pub curve: FourierCurve,
    pub settings: Settings,
    pub structure: ParallelStructure,
    pairings: BTreeMap<(usize, usize), ParallelPairing>,
}

impl CurveAnalysis {
    pub fn new(curve: FourierCurve, settings: Settings) -> Result<Self, EquidistantError> {
        let curve = curve.validate(&settings)?;
        let structure = ParallelStructure::new(&curve, &settings)?;
        let mut pairings = BTreeMap::new();
        for set in &structure.sets {
            for (i, &a) in set.iter().enumerate() {
                for &b in &set[i + 1..] {
                    pairings.insert((a, b), structure.pair(&curve, a, b, &settings)?);
                }
            }
        }
        Ok(CurveAnalysis { curve, settings, structure, pairings })
    }

    /// Pairing nodes read with `a` first.
    pub fn pairing(&self, a: usize, b: usize) -> Vec<PairNode> {
        if a < b {
            self.pairings[&(a, b)].nodes.clone()
        } else {
            self.pairings[&(b, a)].swapped().nodes
        }
    }

    pub fn schemes(&self, class: LambdaClass) -> Result<Vec<GlueingScheme>, EquidistantError> {
        Ok(maximal_schemes(&self.structure, class)?)
    }

    /// Parameters `(s, t)` at angle offset `u` of the step from arc `top`
    /// to arc `bottom`, searched between the parameters of two nearby pairs.
    pub fn pair_at(&self, top: usize, bottom: usize, u: f64, l: (f64, f64), r: (f64, f64)) -> Option<(f64, f64)> {
        Some((self.solve_on(top, u, l.0, r.0)?, self.solve_on(bottom, u, l.1, r.1)?))
    }

    /// Angle offset of the parameter `t` on arc `arc`.
    pub fn offset_on(&self, arc: usize, t: f64) -> f64 {
        self.structure.angle.theta(&self.curve, t) - self.arc(arc).theta_lower()
    }

    fn arc(&self, i: usize) -> &ParallelArc {
        &self.structure.arcs[i]
    }

    /// Parameter on arc `arc` where the angle offset is `u`, searched
    /// between two nearby known parameters, taken modulo 2π.
    fn solve_on(&self, arc: usize, u: f64, lo: f64, hi: f64) -> Option<f64> {
        let hi = lo + wrap_pi(hi - lo);
        let a = self.arc(arc);
        let target = a.theta_lower() + u;
        let angle = &self.structure.angle;
        let f = |t: f64| (angle.theta(&self.curve, t) - target, self.curve.jet(t).theta_rate());
        safe_newton(f, lo, hi, 0.5 * (lo + hi), 1e-15)
    }
}

/// One vertex of a traced branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchNode {
    /// Index of the scheme step this node belongs to.
    pub step: usize,
    /// Angle offset within the step.
    pub u: f64,
    pub s: f64,
    pub t: f64,
    pub position: Vec2,
    /// Tangent angle of the curve at `s`; the branch tangent is parallel.
    pub direction: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    /// `g / (|κ_a| + |κ̃_b|)`; NaN at inflexion nodes `(k, k)`.
    pub margin: f64,
    /// Curvature of the branch, signed along the direction of traversal.
    pub kappa_e: f64,
    pub cusp: bool,
}

/// A refined cusp of a branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cusp {
    pub step: usize,
    pub u: f64,
    pub s: f64,
    pub t: f64,
    pub position: Vec2,
}

/// Twice a rotation number, so that half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HalfTurns(pub i64);

impl HalfTurns {
    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_half_integer(self) -> bool {
        self.0 % 2 != 0
    }
}

impl core::fmt::Display for HalfTurns {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// One smooth branch of `E_λ(M)`, or `M` itself for `λ ∈ {0, 1}`.
#[derive(Clone, Debug)]
pub struct Branch {
    pub lambda: f64,
    pub scheme: Option<GlueingScheme>,
    /// For closed branches the last node repeats the first.
    pub nodes: Vec<BranchNode>,
    /// Node index of every column of the scheme.
    pub columns: Vec<usize>,
    pub cusps: Vec<Cusp>,
    /// Node indices of the inflexions of the branch.
    pub inflexions: Vec<usize>,
    pub closed: bool,
    pub rotation: Option<HalfTurns>,
    /// Parameters of the curve's inflexions at the ends of an on-shell branch.
    pub endpoints: Option<(f64, f64)>,
    /// Angle offset at the start of every step. A column node carries the
    /// offset of the step ending there.
    pub starts: Vec<f64>,
}

impl Branch {
    /// Angle offset of node `i` within step `si`.
    pub fn offset(&self, si: usize, i: usize) -> f64 {
        if i == self.columns[si] { self.starts[si] } else { self.nodes[i].u }
    }

    /// The nodes of step `si`, with offsets local to the step.
    pub fn step_nodes(&self, si: usize) -> Vec<BranchNode> {
        (self.columns[si]..=self.columns[si + 1]).map(|i| BranchNode { u: self.offset(si, i), ..self.nodes[i] }).collect()
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.nodes.iter().map(|n| n.position).collect()
    }

    pub fn cusp_count(&self) -> usize {
        self.cusps.len()
    }
}

fn make_node(an: &CurveAnalysis, lambda: f64, step: usize, ascending: bool, n: PairNode, diagonal: bool) -> BranchNode {
    let (ja, jb) = (an.curve.jet(n.s), an.curve.jet(n.t));
    let (ka, kb, _) = opposite_curvatures(&ja, &jb);
    let g = singularity_margin(lambda, ka, kb);
    let eps = if ascending { 1.0 } else { -1.0 };
    let (margin, kappa_e) = if diagonal {
        (f64::NAN, 0.0)
    } else {
        (g / (ka.abs() + kb.abs()), eps * (ka * kb).abs() / g.abs())
    };
    BranchNode {
        step,
        u: n.u,
        s: n.s,
        t: n.t,
        position: ja.p * lambda + jb.p * (1.0 - lambda),
        direction: ja.d1.angle(),
        kappa_a: ka,
        kappa_b: kb,
        margin,
        kappa_e,
        cusp: false,
    }
}

/// Traces the branch of `E_λ` described by a maximal scheme.
pub fn trace_branch(an: &CurveAnalysis, scheme: &GlueingScheme, lambda: f64) -> Result<Branch, EquidistantError> {
    let class = LambdaClass::of(lambda).ok_or(EquidistantError::InvalidLambda(lambda))?;
    if class != scheme.class {
        return Err(EquidistantError::ClassMismatch(lambda));
    }
    let ps = &an.structure;
    let mut nodes: Vec<BranchNode> = Vec::new();
    let mut columns = Vec::with_capacity(scheme.columns.len());
    let mut starts = Vec::with_capacity(scheme.steps.len());
    for (i, st) in scheme.steps.iter().enumerate() {
        let mut pn = an.pairing(st.top, st.bottom);
        if !st.ascending {
            pn.reverse();
        }
        starts.push(pn[0].u);
        let (c0, c1) = (scheme.columns[i], scheme.columns[i + 1]);
        let diag0 = c0.0 == c0.1;
        let diag1 = c1.0 == c1.1;
        let skip = usize::from(i > 0);
        if i == 0 {
            columns.push(0);
        }
        let count = pn.len();
        for (j, n) in pn.into_iter().enumerate().skip(skip) {
            let diagonal = (j == 0 && diag0) || (j + 1 == count && diag1);
            nodes.push(make_node(an, lambda, i, st.ascending, n, diagonal));
        }
        columns.push(nodes.len() - 1);
    }
    let closure = scheme.closure.ok_or(GluingError::OpenWalk)?;
    let closed = closure != Closure::OnShell;
    let inflexions = scheme.inflexion_columns(ps).into_iter().map(|c| columns[c]).collect();
    let endpoints = if closed {
        None
    } else {
        let (a, b) = (scheme.columns[0].0, scheme.columns[scheme.columns.len() - 1].0);
        Some((ps.points[a].t, ps.points[b].t))
    };
    let mut branch = Branch {
        lambda,
        scheme: Some(scheme.clone()),
        nodes,
        columns,
        cusps: Vec::new(),
        inflexions,
        closed,
        rotation: None,
        endpoints,
        starts,
    };
    if closed {
        branch.rotation = Some(branch_rotation_number(&branch)?);
    }
    Ok(branch)
}

/// Rotation number of a closed branch: the winding of the curve's tangent
/// at the first point of each pair, which is transported along the branch.
pub fn branch_rotation_number(branch: &Branch) -> Result<HalfTurns, EquidistantError> {
    if !branch.closed {
        return Err(EquidistantError::OpenBranch);
    }
    let mut total = 0.0;
    for w in branch.nodes.windows(2) {
        total += wrap_pi(w[1].direction - w[0].direction);
    }
    let halves = total / PI;
    let k = halves.round();
    let residual = (halves - k).abs();
    if residual > 0.05 {
        return Err(EquidistantError::LiftInconsistent { residual });
    }
    Ok(HalfTurns(k as i64))
}

/// Margins smaller than this everywhere on a step mean the margin vanishes
/// identically (a centrally symmetric piece at `λ = ½`).
const FLAT_MARGIN: f64 = 1e-9;

/// Finds the cusps of a traced branch.
///
/// Each step is scanned for sign changes of the normalised margin, and
/// each root is bisected to the configured width in the angle offset.
/// Local minima of `|margin|` are searched for hidden pairs of roots; a
/// minimum that reaches zero without a sign change is reported as
/// [`EquidistantError::TangentialRoot`].
pub fn detect_cusps(an: &CurveAnalysis, branch: &Branch) -> Result<Vec<Cusp>, EquidistantError> {
    let scheme = branch.scheme.as_ref().ok_or(EquidistantError::InvalidLambda(branch.lambda))?;
    let lambda = branch.lambda;
    let width = an.settings.tol.root_width;
    let mut cusps = Vec::new();
    for (si, st) in scheme.steps.iter().enumerate() {
        let nodes = &branch.step_nodes(si);
        let idx: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].margin.is_finite()).collect();
        if idx.len() < 2 {
            continue;
        }
        let scale = idx.iter().fold(0.0f64, |m, &i| m.max(nodes[i].margin.abs()));
        if scale < FLAT_MARGIN {
            return Err(EquidistantError::TangentialRoot { step: si, u: nodes[idx[0]].u });
        }
        let eval = |u: f64, l: &BranchNode, r: &BranchNode| -> Option<(f64, f64, f64)> {
            let s = an.solve_on(st.top, u, l.s, r.s)?;
            let t = an.solve_on(st.bottom, u, l.t, r.t)?;
            let (ka, kb, _) = opposite_curvatures(&an.curve.jet(s), &an.curve.jet(t));
            Some((s, t, singularity_margin(lambda, ka, kb) / (ka.abs() + kb.abs())))
        };
        let root = |l: &BranchNode, r: &BranchNode, fl: f64| -> Result<Cusp, EquidistantError> {
            let stall = EquidistantError::Parallel(ParallelError::ContinuationStall { a: st.top, b: st.bottom, u: l.u });
            let f = |u: f64| eval(u, l, r).map(|x| x.2).unwrap_or(f64::NAN);
            let u = bisect(f, l.u, r.u, fl, width);
            let (s, t, _) = eval(u, l, r).ok_or(stall)?;
            let p = an.curve.point(s) * lambda + an.curve.point(t) * (1.0 - lambda);
            Ok(Cusp { step: si, u, s, t, position: p })
        };
        for w in idx.windows(2) {
            let (l, r) = (&nodes[w[0]], &nodes[w[1]]);
            if l.margin == 0.0 || (l.margin < 0.0) != (r.margin < 0.0) && r.margin != 0.0 {
                cusps.push(root(l, r, l.margin)?);
            }
        }
        for w in idx.windows(3) {
            let (l, m, r) = (&nodes[w[0]], &nodes[w[1]], &nodes[w[2]]);
            let same = (l.margin < 0.0) == (m.margin < 0.0) && (m.margin < 0.0) == (r.margin < 0.0);
            let am = m.margin.abs();
            if !same || am > l.margin.abs() || am > r.margin.abs() || am > 0.05 * scale {
                continue;
            }
            let sg = m.margin.signum();
            let f = |u: f64| eval(u, l, r).map(|x| sg * x.2).unwrap_or(f64::INFINITY);
            let (um, fm) = golden_min(f, l.u, r.u, width);
            if fm < 0.0 {
                let (s, t, g) = eval(um, l, r).ok_or(EquidistantError::TangentialRoot { step: si, u: um })?;
                let mid = BranchNode { u: um, s, t, margin: g, ..*m };
                cusps.push(root(l, &mid, l.margin)?);
                cusps.push(root(&mid, r, g)?);
            } else if fm < FLAT_MARGIN {
                return Err(EquidistantError::TangentialRoot { step: si, u: um });
            }
        }
    }
    sort_cusps(scheme, &mut cusps);
    cusps.dedup_by(|a, b| a.step == b.step && (a.u - b.u).abs() <= 4.0 * width);
    Ok(cusps)
}

fn sort_cusps(scheme: &GlueingScheme, cusps: &mut [Cusp]) {
    cusps.sort_by(|a, b| {
        let dir = |c: &Cusp| if scheme.steps[c.step].ascending { c.u } else { -c.u };
        a.step.cmp(&b.step).then(dir(a).total_cmp(&dir(b)))
    });
}

/// Inserts cusps into the node list; each cusp appears as two identical
/// nodes so a polyline shows the corner.
pub fn with_cusps(an: &CurveAnalysis, mut branch: Branch, cusps: Vec<Cusp>) -> Branch {
    let scheme = branch.scheme.clone().expect("equidistant branch has a scheme");
    let mut out = Vec::with_capacity(branch.nodes.len() + 2 * cusps.len());
    let mut columns = Vec::with_capacity(branch.columns.len());
    let mut ci = 0;
    let mut col = 0;
    for (i, n) in branch.nodes.iter().enumerate() {
        let before = |c: &Cusp| {
            let asc = scheme.steps[c.step].ascending;
            c.step == n.step && if asc { c.u < n.u } else { c.u > n.u }
        };
        while ci < cusps.len() && (cusps[ci].step < n.step || before(&cusps[ci])) {
            let c = cusps[ci];
            let st = scheme.steps[c.step];
            let (ja, jb) = (an.curve.jet(c.s), an.curve.jet(c.t));
            let (ka, kb, _) = opposite_curvatures(&ja, &jb);
            let node = BranchNode {
                step: c.step,
                u: c.u,
                s: c.s,
                t: c.t,
                position: c.position,
                direction: ja.d1.angle(),
                kappa_a: ka,
                kappa_b: kb,
                margin: 0.0,
                kappa_e: if st.ascending { f64::INFINITY } else { f64::NEG_INFINITY },
                cusp: true,
            };
            out.push(node);
            out.push(node);
            ci += 1;
        }
        out.push(*n);
        while col < branch.columns.len() && branch.columns[col] == i {
            columns.push(out.len() - 1);
            col += 1;
        }
    }
    let remap: BTreeMap<usize, usize> = branch.columns.iter().copied().zip(columns.iter().copied()).collect();
    branch.inflexions = branch.inflexions.iter().map(|i| remap[i]).collect();
    branch.nodes = out;
    branch.columns = columns;
    branch.cusps = cusps;
    branch
}

/// Node indices of branch inflexions: every interior column that contains
/// an inflexion of the curve.
pub fn detect_inflexions(branch: &Branch) -> Vec<usize> {
    branch.inflexions.clone()
}

/// Traces and refines every branch of `E_λ(M)`.
pub fn full_equidistant(an: &CurveAnalysis, lambda: f64) -> Result<Vec<Branch>, EquidistantError> {
    let Some(class) = LambdaClass::of(lambda) else {
        if lambda == 0.0 || lambda == 1.0 {
            return Ok(alloc::vec![curve_itself(an, lambda)]);
        }
        return Err(EquidistantError::InvalidLambda(lambda));
    };
    an.schemes(class)?.iter().map(|s| traced(an, s, lambda)).collect()
}

/// Trace, cusp detection and cusp insertion for one scheme.
pub fn traced(an: &CurveAnalysis, scheme: &GlueingScheme, lambda: f64) -> Result<Branch, EquidistantError> {
    let b = trace_branch(an, scheme, lambda)?;
    let cusps = detect_cusps(an, &b)?;
    Ok(with_cusps(an, b, cusps))
}

fn curve_itself(an: &CurveAnalysis, lambda: f64) -> Branch {
    let n = an.settings.samples;
    let o = an.structure.angle.origin;
    let nodes: Vec<BranchNode> = (0..=n)
        .map(|i| {
            let s = o + TAU * i as f64 / n as f64;
            let j = an.curve.jet(s);
            BranchNode {
                step: 0,
                u: 0.0,
                s,
                t: s,
                position: j.p,
                direction: j.d1.angle(),
                kappa_a: j.kappa(),
                kappa_b: j.kappa(),
                margin: f64::NAN,
                kappa_e: j.kappa(),
                cusp: false,
            }
        })
        .collect();
    Branch {
        lambda,
        scheme: None,
        nodes,
        columns: Vec::new(),
        cusps: Vec::new(),
        inflexions: Vec::new(),
        closed: true,
        rotation: Some(HalfTurns(2 * an.structure.angle.rotation())),
        endpoints: None,
        starts: Vec::new(),
    }
}

/// One vertex of the Centre Symmetry Set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CssNode {
    pub step: usize,
    pub u: f64,
    pub s: f64,
    pub t: f64,
    /// `(κ_a·a + κ̃_b·b)/(κ_a + κ̃_b)`; non-finite at a pole.
    pub point: Vec2,
    /// `κ̃_b²κ'_a − κ_a²κ'_b` (arc-length derivatives); the CSS velocity
    /// changes direction exactly where this changes sign.
    pub speed_factor: f64,
    pub kappa: f64,
    pub pole: bool,
    pub cusp: bool,
}

#[derive(Clone, Debug)]
pub struct CssBranch {
    pub scheme: GlueingScheme,
    pub nodes: Vec<CssNode>,
    /// Refined cusps as `(step, u, point)`.
    pub cusps: Vec<(usize, f64, Vec2)>,
    pub poles: Vec<usize>,
    pub closed: bool,
    /// Inflexion points of the curve where an open branch ends.
    pub endpoints: Option<(Vec2, Vec2)>,
    /// The chord family has a constant envelope point (central symmetry);
    /// no cusps are reported.
    pub degenerate: bool,
}

/// The Centre Symmetry Set, one branch per `λ = ½` scheme.
#[derive(Clone, Debug)]
pub struct CssCurve {
    pub branches: Vec<CssBranch>,
}

impl CssCurve {
    pub fn cusp_count(&self) -> usize {
        self.branches.iter().map(|b| b.cusps.len()).sum()
    }
}

fn css_values(curve: &FourierCurve, s: f64, t: f64, pole_tol: f64) -> (Vec2, f64, f64, bool) {
    let (ja, jb) = (curve.jet(s), curve.jet(t));
    let (ka, kb, _) = opposite_curvatures(&ja, &jb);
    let (a, b) = (ja.p, jb.p);
    let sum = ka + kb;
    let pole = sum.abs() < pole_tol;
    let q = (a * ka + b * kb) / sum;
    let dka = ja.kappa_ds();
    // Reading b backwards flips both κ_b and the arc length, so κ'_b keeps
    // its value in the opposite convention.
    let dkb = jb.kappa_ds();
    let w = kb * kb * dka - ka * ka * dkb;
    let chord = a - b;
    let kappa = kb.signum() * sum * sum * sum / w.abs() * chord.cross(ja.tangent()) / chord.norm().powi(3);
    (q, w, kappa, pole)
}

/// Traces the Centre Symmetry Set along the `λ = ½` schemes.
pub fn css_curve(an: &CurveAnalysis) -> Result<CssCurve, EquidistantError> {
    let width = an.settings.tol.root_width;
    let pole_tol = an.settings.tol.pole;
    let mut branches = Vec::new();
    for scheme in an.schemes(LambdaClass::Half)? {
        let mut nodes: Vec<CssNode> = Vec::new();
        let mut cusps = Vec::new();
        let mut columns = alloc::vec![0usize];
        let mut starts = Vec::new();
        for (i, st) in scheme.steps.iter().enumerate() {
            let mut pn = an.pairing(st.top, st.bottom);
            if !st.ascending {
                pn.reverse();
            }
            starts.push(pn[0].u);
            for n in pn.into_iter().skip(usize::from(i > 0)) {
                let (point, w, kappa, pole) = css_values(&an.curve, n.s, n.t, pole_tol);
                let diagonal = (n.s - n.t).abs() < 1e-12;
                nodes.push(CssNode {
                    step: i,
                    u: n.u,
                    s: n.s,
                    t: n.t,
                    point,
                    speed_factor: if diagonal { f64::NAN } else { w },
                    kappa,
                    pole,
                    cusp: false,
                });
            }
            columns.push(nodes.len() - 1);
        }
        let scale = nodes.iter().filter(|n| n.speed_factor.is_finite()).fold(0.0f64, |m, n| m.max(n.speed_factor.abs()));
        let degenerate = scale < 1e-9;
        if !degenerate {
            for (si, st) in scheme.steps.iter().enumerate() {
                let idx: Vec<usize> =
                    (columns[si]..=columns[si + 1]).filter(|&i| nodes[i].speed_factor.is_finite()).collect();
                for w in idx.windows(2) {
                    let (l, r) = (nodes[w[0]], nodes[w[1]]);
                    if (l.speed_factor < 0.0) == (r.speed_factor < 0.0) {
                        continue;
                    }
                    let eval = |u: f64| -> Option<(f64, f64)> {
                        Some((an.solve_on(st.top, u, l.s, r.s)?, an.solve_on(st.bottom, u, l.t, r.t)?))
                    };
                    let f = |u: f64| eval(u).map(|(s, t)| css_values(&an.curve, s, t, pole_tol).1).unwrap_or(f64::NAN);
                    let lu = if w[0] == columns[si] { starts[si] } else { l.u };
                    let u = bisect(f, lu, r.u, l.speed_factor, width);
                    let (s, t) = eval(u).ok_or(EquidistantError::Parallel(ParallelError::ContinuationStall {
                        a: st.top,
                        b: st.bottom,
                        u,
                    }))?;
                    cusps.push((si, u, css_values(&an.curve, s, t, pole_tol).0));
                }
            }
        }
        let closed = scheme.closure != Some(Closure::OnShell);
        let endpoints = if closed {
            None
        } else {
            let ps = &an.structure;
            let (a, b) = (scheme.columns[0].0, scheme.columns[scheme.columns.len() - 1].0);
            Some((an.curve.point(ps.points[a].t), an.curve.point(ps.points[b].t)))
        };
        let poles = (0..nodes.len()).filter(|&i| nodes[i].pole).collect();
        branches.push(CssBranch { scheme, nodes, cusps, poles, closed, endpoints, degenerate });
    }
    Ok(CssCurve { branches })
}

/// Local type of the closure of a Wigner-caustic branch ending at an
/// inflexion together with the adjacent arc of the curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EndpointType {
    /// Branch and arc leave the inflexion on the same side: a corner.
    Singular,
    /// Branch and arc continue each other through the inflexion.
    C1Regular,
}

/// Which arc of the curve is attached at the inflexion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ArcSide {
    /// The arc leaving the inflexion with increasing parameter.
    Forward,
    /// The arc arriving at the inflexion.
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EndpointClassification {
    pub t: f64,
    pub side: ArcSide,
    /// Extrapolated limit of `κ(s)/κ(t(s))`; always close to −1.
    pub ratio_limit: f64,
    /// Extrapolated limit of `d/ds (κ(s)/κ(t(s)))` in the curve parameter.
    pub derivative_limit: f64,
    /// `−2F⁗/(3F‴)` for the curve written as a graph over its tangent,
    /// converted to the curve parameter.
    pub closed_form: f64,
    pub kind: EndpointType,
}

/// Classifies the endpoint of the on-shell Wigner-caustic branch at the
/// inflexion with parameter `t0`.
pub fn classify_onshell_endpoint(
    an: &CurveAnalysis,
    t0: f64,
    side: ArcSide,
) -> Result<EndpointClassification, EquidistantError> {
    let curve = &an.curve;
    let j = curve.jet(t0);
    let v = j.speed();
    let tan = j.tangent();
    let x1 = v;
    let x2 = j.d2.dot(tan);
    let y3 = j.d3.dot(tan.perp());
    let y4 = j.d4.dot(tan.perp());
    let f3 = y3 / (x1 * x1 * x1);
    let f4 = (y4 - 6.0 * f3 * x1 * x1 * x2) / (x1 * x1 * x1 * x1);
    if f4.abs() < 1e-8 {
        return Err(EquidistantError::DegenerateQuartic(f4.abs()));
    }
    let closed_form = -2.0 * f4 / (3.0 * f3) * x1;
    let ratio = |h: f64| -> Result<f64, EquidistantError> {
        let s = t0 + h;
        let t = local_partner(an, t0, s).ok_or(EquidistantError::PartnerMissing)?;
        Ok(curve.kappa(s) / curve.kappa(t))
    };
    let dir = if side == ArcSide::Forward { 1.0 } else { -1.0 };
    let h = 1e-3;
    let (r1, r2) = (ratio(dir * h)?, ratio(dir * h / 2.0)?);
    let ratio_limit = 2.0 * r2 - r1;
    let d1 = (r1 + 1.0) / (dir * h);
    let d2 = (r2 + 1.0) / (dir * h / 2.0);
    let derivative_limit = 2.0 * d2 - d1;
    let singular = (dir * derivative_limit) > 0.0;
    Ok(EndpointClassification {
        t: t0,
        side,
        ratio_limit,
        derivative_limit,
        closed_form,
        kind: if singular { EndpointType::Singular } else { EndpointType::C1Regular },
    })
}

/// The parallel partner of `s` on the other side of the inflexion `t0`.
pub fn local_partner(an: &CurveAnalysis, t0: f64, s: f64) -> Option<f64> {
    let angle = &an.structure.angle;
    let target = angle.theta(&an.curve, s);
    let h = s - t0;
    let (lo, hi) = (t0 - 0.25 * h, t0 - 4.0 * h);
    let f = |t: f64| (angle.theta(&an.curve, t) - target, an.curve.jet(t).theta_rate());
    safe_newton(f, lo, hi, t0 - h, 1e-15)
}
