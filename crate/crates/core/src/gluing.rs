//! Glueing schemes: how pairs of parallel arcs join into the branches of
//! an equidistant.
//!
//! A *node* is an ordered pair `(a, b)` of points of `S_M` on the same
//! level. An *edge* is an ordered pair `(A, B)` of distinct arcs of one set
//! `Φ_i`; it joins the node of their lower endpoints with the node of their
//! upper endpoints. In a generic configuration every node has exactly two
//! edges, so the edges split into cycles. For `λ ≠ ½` each cycle is one
//! branch of `E_λ`. For `λ = ½` the pairs `(a, b)` and `(b, a)` give the same
//! points, so nodes and edges are identified with their swaps. A walk then
//! either closes at its start, closes at its swapped start, or runs between
//! two inflexion nodes `(k, k)`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::parallelism::ParallelStructure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LambdaClass {
    /// `λ = ½`, the Wigner caustic.
    Half,
    /// Any other `λ` outside `{0, 1}`.
    Generic,
}

impl LambdaClass {
    /// `None` for `λ ∈ {0, 1}`, where the equidistant is the curve itself.
    pub fn of(lambda: f64) -> Option<Self> {
        if lambda == 0.0 || lambda == 1.0 || !lambda.is_finite() {
            None
        } else if lambda == 0.5 {
            Some(LambdaClass::Half)
        } else {
            Some(LambdaClass::Generic)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GluingError {
    #[error("node ({0}, {1}) does not have exactly two admissible continuations")]
    NonGenericBranching(usize, usize),
    #[error("scheme is already maximal")]
    AlreadyMaximal,
    #[error("schemes use {found} arc pairs, expected {expected}")]
    ArcAccountingMismatch { found: usize, expected: usize },
    #[error("walk did not close")]
    OpenWalk,
}

/// One edge of a scheme, oriented along the walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Step {
    /// Arc traced by the first point of each pair.
    pub top: usize,
    /// Arc traced by the second point.
    pub bottom: usize,
    /// True when the walk goes from the lower to the upper endpoints.
    pub ascending: bool,
}

impl Step {
    fn swapped(self) -> Step {
        Step { top: self.bottom, bottom: self.top, ascending: self.ascending }
    }

    fn reversed(self) -> Step {
        Step { ascending: !self.ascending, ..self }
    }

    /// Ordering key; ascending steps sort first so canonical schemes run
    /// with the orientation of the curve where possible.
    fn key(self) -> (usize, usize, bool) {
        (self.top, self.bottom, !self.ascending)
    }
}

/// How a maximal walk ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Closure {
    /// Returned to its first node.
    Cycle,
    /// Returned to the swap of its first node (`λ = ½` only).
    Twisted,
    /// Runs from one inflexion node to another (`λ = ½` only).
    OnShell,
}

/// A sequence of glued arc pairs, written in two rows of points of `S_M`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GlueingScheme {
    pub class: LambdaClass,
    pub steps: Vec<Step>,
    /// `steps.len() + 1` columns `(top, bottom)`.
    pub columns: Vec<(usize, usize)>,
    /// `None` while the scheme can still be prolonged.
    pub closure: Option<Closure>,
}

impl fmt::Display for GlueingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (row, pick) in [(0, 0usize), (1, 1)] {
            if row == 1 {
                f.write_str(" / ")?;
            }
            for (i, c) in self.columns.iter().enumerate() {
                if i > 0 {
                    f.write_str("-")?;
                }
                write!(f, "p{}", if pick == 0 { c.0 } else { c.1 })?;
            }
        }
        Ok(())
    }
}

fn start_node(ps: &ParallelStructure, s: Step) -> (usize, usize) {
    let (a, b) = (&ps.arcs[s.top], &ps.arcs[s.bottom]);
    if s.ascending { (a.lower(), b.lower()) } else { (a.upper(), b.upper()) }
}

fn end_node(ps: &ParallelStructure, s: Step) -> (usize, usize) {
    start_node(ps, s.reversed())
}

fn columns_of(ps: &ParallelStructure, steps: &[Step]) -> Vec<(usize, usize)> {
    let mut cols = Vec::with_capacity(steps.len() + 1);
    if let Some(&s) = steps.first() {
        cols.push(start_node(ps, s));
    }
    cols.extend(steps.iter().map(|&s| end_node(ps, s)));
    cols
}

/// The two steps leaving node `(a, b)`.
pub fn steps_from(ps: &ParallelStructure, node: (usize, usize)) -> Result<Vec<Step>, GluingError> {
    let (a, b) = node;
    let (a_in, a_out) = ps.arcs_at(a);
    let (b_in, b_out) = ps.arcs_at(b);
    let mut out = Vec::with_capacity(2);
    for ta in [a_in, a_out] {
        for tb in [b_in, b_out] {
            let (arc_a, arc_b) = (&ps.arcs[ta], &ps.arcs[tb]);
            if ta == tb || arc_a.set != arc_b.set {
                continue;
            }
            if arc_a.lower() == a && arc_b.lower() == b {
                out.push(Step { top: ta, bottom: tb, ascending: true });
            } else if arc_a.upper() == a && arc_b.upper() == b {
                out.push(Step { top: ta, bottom: tb, ascending: false });
            }
        }
    }
    out.sort();
    out.dedup();
    if out.len() != 2 {
        return Err(GluingError::NonGenericBranching(a, b));
    }
    Ok(out)
}

fn is_diagonal(ps: &ParallelStructure, n: (usize, usize)) -> bool {
    n.0 == n.1 && ps.points[n.0].inflexion.is_some()
}

fn same_edge(class: LambdaClass, x: Step, y: Step) -> bool {
    let ux = (x.top, x.bottom);
    let uy = (y.top, y.bottom);
    ux == uy || (class == LambdaClass::Half && ux == (uy.1, uy.0))
}

/// The step continuing a walk that arrived at `node` through `arrived`;
/// `None` when the only other edge is the same edge (an inflexion node at
/// `λ = ½`).
fn next_step(ps: &ParallelStructure, class: LambdaClass, node: (usize, usize), arrived: Step) -> Result<Option<Step>, GluingError> {
    let cands = steps_from(ps, node)?;
    let back = arrived.reversed();
    let mut rest = cands.into_iter().filter(|&c| c != back);
    let next = rest.next().ok_or(GluingError::NonGenericBranching(node.0, node.1))?;
    if same_edge(class, next, arrived) {
        return Ok(None);
    }
    Ok(Some(next))
}

/// Walks forward from `first` until the walk closes or stops at an
/// inflexion node.
fn walk(ps: &ParallelStructure, class: LambdaClass, first: Step) -> Result<(Vec<Step>, Option<Closure>), GluingError> {
    let n0 = start_node(ps, first);
    let limit = 4 * ps.arcs.len() * ps.arcs.len() + 4;
    let mut steps = alloc::vec![first];
    let mut cur = first;
    loop {
        let node = end_node(ps, cur);
        if node == n0 {
            return Ok((steps, Some(Closure::Cycle)));
        }
        if class == LambdaClass::Half && node == (n0.1, n0.0) {
            return Ok((steps, Some(Closure::Twisted)));
        }
        if class == LambdaClass::Half && is_diagonal(ps, node) {
            return Ok((steps, None));
        }
        match next_step(ps, class, node, cur)? {
            Some(s) => cur = s,
            None => return Ok((steps, None)),
        }
        steps.push(cur);
        if steps.len() > limit {
            return Err(GluingError::OpenWalk);
        }
    }
}

impl GlueingScheme {
    /// A one-step scheme.
    pub fn from_step(ps: &ParallelStructure, class: LambdaClass, step: Step) -> Self {
        let steps = alloc::vec![step];
        let columns = columns_of(ps, &steps);
        let mut s = GlueingScheme { class, steps, columns, closure: None };
        s.closure = s.detect_closure(ps);
        s
    }

    fn detect_closure(&self, ps: &ParallelStructure) -> Option<Closure> {
        let first = *self.columns.first()?;
        let last = *self.columns.last()?;
        if self.steps.is_empty() {
            return None;
        }
        if last == first {
            return Some(Closure::Cycle);
        }
        if self.class == LambdaClass::Half {
            if last == (first.1, first.0) {
                return Some(Closure::Twisted);
            }
            if is_diagonal(ps, first) && is_diagonal(ps, last) {
                return Some(Closure::OnShell);
            }
        }
        None
    }

    pub fn is_maximal(&self) -> bool {
        self.closure.is_some()
    }

    /// Appends the unique admissible next pair.
    pub fn prolong(&self, ps: &ParallelStructure) -> Result<GlueingScheme, GluingError> {
        if self.is_maximal() {
            return Err(GluingError::AlreadyMaximal);
        }
        let last = *self.steps.last().ok_or(GluingError::OpenWalk)?;
        let node = end_node(ps, last);
        let next = next_step(ps, self.class, node, last)?.ok_or(GluingError::AlreadyMaximal)?;
        let mut steps = self.steps.clone();
        steps.push(next);
        let columns = columns_of(ps, &steps);
        let mut s = GlueingScheme { class: self.class, steps, columns, closure: None };
        s.closure = s.detect_closure(ps);
        Ok(s)
    }

    /// The maximal scheme through a given step.
    pub fn maximal_from(ps: &ParallelStructure, class: LambdaClass, step: Step) -> Result<GlueingScheme, GluingError> {
        let (mut steps, closure) = walk(ps, class, step)?;
        let closure = match closure {
            Some(c) => c,
            None => {
                let n0 = start_node(ps, step);
                if !is_diagonal(ps, n0) {
                    let (back, c) = walk(ps, class, step.reversed())?;
                    if c.is_some() {
                        return Err(GluingError::OpenWalk);
                    }
                    let mut all: Vec<Step> = back[1..].iter().rev().map(|s| s.reversed()).collect();
                    all.extend(steps);
                    steps = all;
                }
                Closure::OnShell
            }
        };
        Ok(Self::canonical(ps, class, steps, closure))
    }

    /// Canonical representative: the lexicographically smallest step
    /// sequence among all equivalent readings of the same branch.
    fn canonical(ps: &ParallelStructure, class: LambdaClass, steps: Vec<Step>, closure: Closure) -> GlueingScheme {
        let keyed = |v: &[Step]| v.iter().map(|s| s.key()).collect::<Vec<_>>();
        let mut variants: Vec<Vec<Step>> = Vec::new();
        let swaps: &[bool] = if class == LambdaClass::Half { &[false, true] } else { &[false] };
        match closure {
            Closure::OnShell => {
                for &sw in swaps {
                    let base: Vec<Step> = steps.iter().map(|&s| if sw { s.swapped() } else { s }).collect();
                    let rev: Vec<Step> = base.iter().rev().map(|s| s.reversed()).collect();
                    variants.push(base);
                    variants.push(rev);
                }
            }
            Closure::Cycle | Closure::Twisted => {
                let mut cyc = steps.clone();
                if closure == Closure::Twisted {
                    cyc.extend(steps.iter().map(|s| s.swapped()));
                }
                let len = cyc.len();
                let keep = steps.len();
                for &sw in swaps {
                    let base: Vec<Step> = cyc.iter().map(|&s| if sw { s.swapped() } else { s }).collect();
                    let rev: Vec<Step> = base.iter().rev().map(|s| s.reversed()).collect();
                    for seq in [base, rev] {
                        for r in 0..len {
                            let v: Vec<Step> = (0..keep).map(|i| seq[(r + i) % len]).collect();
                            variants.push(v);
                        }
                    }
                }
            }
        }
        let best = variants.into_iter().min_by(|x, y| keyed(x).cmp(&keyed(y))).unwrap();
        let columns = columns_of(ps, &best);
        GlueingScheme { class, steps: best, columns, closure: Some(closure) }
    }

    /// Inflexion points of `S_M` met in the interior of the branch.
    pub fn inflexion_columns(&self, ps: &ParallelStructure) -> Vec<usize> {
        let cols = self.interior_columns();
        cols.filter(|&i| {
            let (a, b) = self.columns[i];
            ps.points[a].inflexion.is_some() || ps.points[b].inflexion.is_some()
        })
        .collect()
    }

    /// Column indices that are interior points of the branch; for closed
    /// schemes the repeated last column is left out.
    pub fn interior_columns(&self) -> core::ops::Range<usize> {
        match self.closure {
            Some(Closure::OnShell) => 1..self.columns.len().saturating_sub(1),
            _ => 0..self.columns.len().saturating_sub(1),
        }
    }

    /// Structural predictions for the branch this scheme describes.
    pub fn predict(&self, ps: &ParallelStructure) -> BranchPrediction {
        let closure = self.closure;
        let half_integer = closure == Some(Closure::Twisted) && {
            let (a, b) = self.columns[0];
            ps.points[a].parity != ps.points[b].parity
        };
        let rotation = match (self.class, closure) {
            (_, Some(Closure::OnShell)) | (_, None) => None,
            (LambdaClass::Generic, _) => Some(RotationClass::Integer),
            (LambdaClass::Half, _) => Some(if half_integer { RotationClass::HalfInteger } else { RotationClass::Integer }),
        };
        let cusp_parity = match (self.class, closure) {
            (_, Some(Closure::OnShell)) | (_, None) => None,
            (LambdaClass::Generic, _) => Some(Parity::Even),
            (LambdaClass::Half, _) => Some(if half_integer { Parity::Odd } else { Parity::Even }),
        };
        let endpoints = match closure {
            Some(Closure::OnShell) => Some((self.columns[0].0, self.columns[self.columns.len() - 1].0)),
            _ => None,
        };
        BranchPrediction {
            class: self.class,
            closure,
            rotation,
            cusp_parity,
            inflexions: self.inflexion_columns(ps).len(),
            endpoints,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RotationClass {
    Integer,
    HalfInteger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n.is_multiple_of(2) { Parity::Even } else { Parity::Odd }
    }
}

/// What the scheme alone says about its branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BranchPrediction {
    pub class: LambdaClass,
    pub closure: Option<Closure>,
    pub rotation: Option<RotationClass>,
    /// `None` for branches ending on the curve, whose parity depends on
    /// the endpoint types.
    pub cusp_parity: Option<Parity>,
    pub inflexions: usize,
    /// Inflexion points of `S_M` at the ends of an on-shell branch.
    pub endpoints: Option<(usize, usize)>,
}

/// Number of arc pairs the maximal schemes must use between them.
pub fn expected_pair_count(ps: &ParallelStructure, class: LambdaClass) -> usize {
    let unordered: usize = ps.sets.iter().map(|s| s.len() * s.len().saturating_sub(1) / 2).sum();
    match class {
        LambdaClass::Half => unordered,
        LambdaClass::Generic => 2 * unordered,
    }
}

/// All maximal glueing schemes, canonicalised and sorted: on-shell schemes
/// first (by their first inflexion), then closed schemes.
pub fn maximal_schemes(ps: &ParallelStructure, class: LambdaClass) -> Result<Vec<GlueingScheme>, GluingError> {
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let edge_id = |s: Step| match class {
        LambdaClass::Half => (s.top.min(s.bottom), s.top.max(s.bottom)),
        LambdaClass::Generic => (s.top, s.bottom),
    };
    let mut out = Vec::new();
    let mut found = 0usize;
    let mut take = |steps: Vec<Step>, closure: Closure, used: &mut BTreeSet<(usize, usize)>, out: &mut Vec<GlueingScheme>| {
        for &s in &steps {
            used.insert(edge_id(s));
        }
        found += steps.len();
        out.push(GlueingScheme::canonical(ps, class, steps, closure));
    };
    if class == LambdaClass::Half {
        for k in ps.inflexion_points() {
            let first = steps_from(ps, (k, k))?[0];
            if used.contains(&edge_id(first)) {
                continue;
            }
            let (steps, closure) = walk(ps, class, first)?;
            if closure.is_some() {
                return Err(GluingError::OpenWalk);
            }
            take(steps, Closure::OnShell, &mut used, &mut out);
        }
    }
    for set in &ps.sets {
        for &a in set {
            for &b in set {
                if a == b || (class == LambdaClass::Half && a > b) {
                    continue;
                }
                let first = Step { top: a, bottom: b, ascending: true };
                if used.contains(&edge_id(first)) {
                    continue;
                }
                let (steps, closure) = walk(ps, class, first)?;
                let closure = closure.ok_or(GluingError::OpenWalk)?;
                take(steps, closure, &mut used, &mut out);
            }
        }
    }
    let expected = expected_pair_count(ps, class);
    if found != expected || used.len() != expected {
        return Err(GluingError::ArcAccountingMismatch { found, expected });
    }
    out.sort_by(|x, y| {
        let rank = |s: &GlueingScheme| (s.closure != Some(Closure::OnShell)) as u8;
        rank(x).cmp(&rank(y)).then_with(|| x.steps.iter().map(|s| s.key()).cmp(y.steps.iter().map(|s| s.key())))
    });
    Ok(out)
}
