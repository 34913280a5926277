//! Six-direction frame built by the ruler-and-compass hexagon construction on
//! the unit ball, and the closed cones it induces.

use super::ball::UnitBall;
use super::point::{Point, EPS};
use crate::error::{Error, Result};

/// Boundary points `y₀..y₅` with `‖yᵢ‖ = ‖yᵢ − yᵢ₊₁‖ = 1` and their directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexFrame {
    pub points: [Point; 6],
    /// Direction of `o → yᵢ`, normalised to `[0, 2π)`.
    pub directions: [f64; 6],
}

impl HexFrame {
    /// Frame seeded at the boundary point in direction `(1, 0)`.
    pub fn new(ball: &UnitBall) -> HexFrame {
        let seed = ball.boundary_point(Point::new(1.0, 0.0));
        Self::construct(ball, seed).expect("default seed lies on the boundary")
    }

    /// Seeds `y₅ = seed`, takes `y₀` as the first intersection of `bd(B)` and
    /// `bd(B) + y₅` met anticlockwise from `y₅`, sets `y₁ = y₀ − y₅` and
    /// completes the rest by central symmetry.
    pub fn construct(ball: &UnitBall, seed: Point) -> Result<HexFrame> {
        if !seed.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = ball.norm(seed);
        if (n - 1.0).abs() > EPS {
            return Err(Error::SeedNotOnBoundary(n));
        }
        let hits = ball.boundary_boundary_intersection(Point::ORIGIN, seed)?;
        let ccw_angle = |p: Point| seed.cross(p).atan2(seed.dot(p));
        let mut candidates: Vec<Point> = hits.points.clone();
        for (a, b) in &hits.segments {
            candidates.push(*a);
            candidates.push(*b);
        }
        let y0 = candidates
            .into_iter()
            .filter(|p| seed.cross(*p) > 0.0)
            .min_by(|a, b| ccw_angle(*a).total_cmp(&ccw_angle(*b)))
            .ok_or_else(|| Error::Internal("no anticlockwise boundary intersection".into()))?;
        let y1 = y0 - seed;
        let points = [y0, y1, -seed, -y0, -y1, seed];
        let directions = points.map(|p| p.angle());
        Ok(HexFrame { points, directions })
    }

    #[inline]
    pub fn lo(&self, i: usize) -> Point {
        self.points[i % 6]
    }

    #[inline]
    pub fn hi(&self, i: usize) -> Point {
        self.points[(i + 1) % 6]
    }

    /// Whether direction `v` lies in the closed cone between `yᵢ` and `yᵢ₊₁`.
    #[inline]
    pub fn direction_in_cone(&self, i: usize, v: Point) -> bool {
        if v.x == 0.0 && v.y == 0.0 {
            return true;
        }
        self.lo(i).cross(v) >= 0.0 && v.cross(self.hi(i)) >= 0.0
    }

    pub fn cone(&self, apex: Point, i: usize) -> Cone<'_> {
        Cone {
            apex,
            lo: i % 6,
            frame: self,
        }
    }
}

/// `K(apex, θᵢ, θᵢ₊₁)`, closed on both bounding rays.
#[derive(Debug, Clone, Copy)]
pub struct Cone<'a> {
    pub apex: Point,
    pub lo: usize,
    pub frame: &'a HexFrame,
}

impl Cone<'_> {
    pub fn contains(&self, p: Point) -> bool {
        self.frame.direction_in_cone(self.lo, p - self.apex)
    }
}

/// Closest terminal to `y` inside the `i`-th cone at `y`; ties go to the lowest index.
pub fn nearest_in_cone(
    ball: &UnitBall,
    frame: &HexFrame,
    terminals: &[Point],
    y: Point,
    i: usize,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, x) in terminals.iter().enumerate() {
        if !frame.direction_in_cone(i, *x - y) {
            continue;
        }
        let d = ball.distance(*x, y);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((idx, d));
        }
    }
    best
}
