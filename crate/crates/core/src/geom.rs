//! Plane vectors and small geometric helpers.

use core::f64::consts::{PI, TAU};
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn from_angle(a: f64) -> Self {
        Vec2::new(a.cos(), a.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// `det[self, o]`
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    /// Rotation by +π/2.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn lerp(self, o: Vec2, w: f64) -> Vec2 {
        self + (o - self) * w
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[inline]
fn rem_euclid(a: f64, m: f64) -> f64 {
    a - m * (a / m).floor()
}

/// Wraps an angle into `(-π, π]`.
#[inline]
pub fn wrap_pi(a: f64) -> f64 {
    let r = rem_euclid(a + PI, TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Reduces `a` modulo `m` into `[0, m)`.
#[inline]
pub fn modulo(a: f64, m: f64) -> f64 {
    let r = rem_euclid(a, m);
    if r >= m || r < 0.0 {
        0.0
    } else {
        r
    }
}

/// Distance between two values on a circle of circumference `m`.
#[inline]
pub fn circular_distance(a: f64, b: f64, m: f64) -> f64 {
    let d = modulo(a - b, m);
    d.min(m - d)
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub fn empty() -> Self {
        Bounds {
            min: Vec2::new(f64::INFINITY, f64::INFINITY),
            max: Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn include(&mut self, p: Vec2) {
        if !p.is_finite() {
            return;
        }
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn of<I: IntoIterator<Item = Vec2>>(pts: I) -> Self {
        let mut b = Bounds::empty();
        for p in pts {
            b.include(p);
        }
        b
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diameter(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.width().hypot(self.height())
        }
    }
}

/// Symmetric Hausdorff distance between two finite point sets.
///
/// Nearest neighbours come from a uniform grid of buckets, searched in
/// growing rings until no closer bucket can exist. Non-finite points are
/// ignored. Returns infinity when exactly one set is empty.
pub fn hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    let fa: Vec<Vec2> = a.iter().copied().filter(|p| p.is_finite()).collect();
    let fb: Vec<Vec2> = b.iter().copied().filter(|p| p.is_finite()).collect();
    match (fa.is_empty(), fb.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    directed(&fa, &fb).max(directed(&fb, &fa))
}

fn directed(from: &[Vec2], to: &[Vec2]) -> f64 {
    let grid = Grid::new(to);
    from.iter().fold(0.0f64, |m, &p| m.max(grid.nearest(p)))
}

struct Grid<'a> {
    pts: &'a [Vec2],
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl<'a> Grid<'a> {
    fn new(pts: &'a [Vec2]) -> Self {
        let b = Bounds::of(pts.iter().copied());
        let side = (pts.len() as f64).sqrt().ceil().max(1.0);
        let extent = b.width().max(b.height()).max(1e-12);
        let cell = extent / side;
        let nx = ((b.width() / cell).floor() as usize + 1).min(1 << 12);
        let ny = ((b.height() / cell).floor() as usize + 1).min(1 << 12);
        let mut buckets = alloc::vec![Vec::new(); nx * ny];
        for (i, p) in pts.iter().enumerate() {
            let (cx, cy) = Self::cell_of(b.min, cell, nx, ny, *p);
            buckets[cy * nx + cx].push(i);
        }
        Grid { pts, origin: b.min, cell, nx, ny, buckets }
    }

    fn cell_of(origin: Vec2, cell: f64, nx: usize, ny: usize, p: Vec2) -> (usize, usize) {
        let cx = ((p.x - origin.x) / cell).floor().max(0.0) as usize;
        let cy = ((p.y - origin.y) / cell).floor().max(0.0) as usize;
        (cx.min(nx - 1), cy.min(ny - 1))
    }

    fn nearest(&self, p: Vec2) -> f64 {
        // Rings grow around the cell holding the projection of p onto the
        // grid box; a point r rings out is at least (r - 1)·cell from it.
        let (cx, cy) = Self::cell_of(self.origin, self.cell, self.nx, self.ny, p);
        let (cx, cy) = (cx as i64, cy as i64);
        let mut best = f64::INFINITY;
        for r in 0..=self.nx.max(self.ny) as i64 {
            for (x, y) in ring(cx, cy, r) {
                if x < 0 || y < 0 || x >= self.nx as i64 || y >= self.ny as i64 {
                    continue;
                }
                for &i in &self.buckets[y as usize * self.nx + x as usize] {
                    best = best.min(self.pts[i].dist(p));
                }
            }
            if best <= r as f64 * self.cell {
                break;
            }
        }
        best
    }
}

fn ring(cx: i64, cy: i64, r: i64) -> impl Iterator<Item = (i64, i64)> {
    let side = if r == 0 { 1 } else { 2 * r + 1 };
    (0..side).flat_map(move |i| {
        let x = cx - r + i;
        let mut v: Vec<(i64, i64)> = Vec::with_capacity(2 * side as usize);
        if r == 0 {
            v.push((cx, cy));
        } else if i == 0 || i == side - 1 {
            for j in 0..side {
                v.push((x, cy - r + j));
            }
        } else {
            v.push((x, cy - r));
            v.push((x, cy + r));
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_pi(PI), PI);
        assert_eq!(wrap_pi(-PI), PI);
        assert!((wrap_pi(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_matches_brute_force() {
        let a: Vec<Vec2> = (0..200).map(|i| Vec2::from_angle(i as f64 * 0.031) * (1.0 + 0.1 * (i as f64).sin())).collect();
        let b: Vec<Vec2> = (0..150).map(|i| Vec2::new(0.01 * i as f64 - 0.7, 0.3 * (i as f64 * 0.1).cos())).collect();
        let brute = |x: &[Vec2], y: &[Vec2]| {
            x.iter().map(|p| y.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
        };
        let want = brute(&a, &b).max(brute(&b, &a));
        assert!((hausdorff(&a, &b) - want).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_to_a_single_far_point() {
        let a = [Vec2::new(0.0, 0.0)];
        let b = [Vec2::new(3.0, 4.0), Vec2::new(-10.0, 0.0)];
        assert_eq!(hausdorff(&a, &b), 10.0);
        assert_eq!(hausdorff(&b, &a), 10.0);
    }

    #[test]
    fn circular_distance_wraps() {
        assert!((circular_distance(0.1, TAU - 0.1, TAU) - 0.2).abs() < 1e-12);
    }
}
