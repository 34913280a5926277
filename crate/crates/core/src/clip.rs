//! Convex polygons and half-plane clipping.

use rand::Rng;

use crate::geometry::{BBox, Point};

/// Closed half-plane `{p : normal · p + offset ≤ 0}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: Point,
    pub offset: f64,
}

impl HalfPlane {
    /// `a · p + c ≤ 0`; `None` when `a` vanishes (the constraint is constant).
    pub fn new(a: Point, c: f64) -> Option<HalfPlane> {
        let len = a.euclid();
        if len == 0.0 || !len.is_finite() {
            return None;
        }
        Some(HalfPlane {
            normal: a * (1.0 / len),
            offset: c / len,
        })
    }

    /// Points on the left of the directed line `origin → origin + dir` (inclusive).
    pub fn left_of(origin: Point, dir: Point) -> HalfPlane {
        // cross(dir, p - origin) >= 0  <=>  (dir.y, -dir.x)·p - (dir.y, -dir.x)·origin <= 0
        let a = Point::new(dir.y, -dir.x);
        HalfPlane::new(a, -a.dot(origin)).expect("non-zero direction")
    }

    pub fn complement(&self) -> HalfPlane {
        HalfPlane {
            normal: -self.normal,
            offset: -self.offset,
        }
    }

    #[inline]
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.normal.dot(p) + self.offset
    }
}

/// Counter-clockwise convex polygon. Empty when it has fewer than three vertices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    pub vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        ConvexPolygon { vertices }
    }

    pub fn from_box(b: &BBox) -> Self {
        ConvexPolygon::new(b.corners().to_vec())
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        ring_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        ring_centroid(&self.vertices)
    }

    /// Sutherland–Hodgman against one half-plane. `tol` snaps near-line vertices onto it.
    pub fn clip(&self, h: &HalfPlane, tol: f64) -> ConvexPolygon {
        let n = self.vertices.len();
        if n < 3 {
            return ConvexPolygon::default();
        }
        let d: Vec<f64> = self.vertices.iter().map(|p| h.signed_distance(*p)).collect();
        if d.iter().all(|v| *v <= tol) {
            return self.clone();
        }
        if d.iter().all(|v| *v >= -tol) {
            return ConvexPolygon::default();
        }
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (p, q) = (self.vertices[i], self.vertices[j]);
            let (dp, dq) = (d[i], d[j]);
            if dp <= tol {
                out.push(p);
            }
            if (dp < -tol && dq > tol) || (dp > tol && dq < -tol) {
                let t = dp / (dp - dq);
                out.push(p.lerp(q, t));
            }
        }
        dedup_ring(&mut out, tol);
        ConvexPolygon::new(out)
    }

    pub fn clip_all(&self, hs: &[HalfPlane], tol: f64) -> ConvexPolygon {
        let mut cur = self.clone();
        for h in hs {
            if cur.is_empty() {
                break;
            }
            cur = cur.clip(h, tol);
        }
        cur
    }

    /// `self` minus the convex region `∩ hs`, as disjoint convex pieces.
    /// Pieces with area at most `min_area` are dropped.
    pub fn subtract(&self, hs: &[HalfPlane], tol: f64, min_area: f64) -> Vec<ConvexPolygon> {
        let inside = self.clip_all(hs, tol);
        if inside.is_empty() || inside.area() <= min_area {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut cur = self.clone();
        for h in hs {
            let outside = cur.clip(&h.complement(), tol);
            if !outside.is_empty() && outside.area() > min_area {
                out.push(outside);
            }
            cur = cur.clip(h, tol);
            if cur.is_empty() {
                break;
            }
        }
        out
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = b - a;
            e.cross(p - a) >= -tol * e.euclid()
        })
    }

    /// Uniform sample via fan triangulation.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let v = &self.vertices;
        let areas: Vec<f64> = (1..v.len() - 1)
            .map(|i| ((v[i] - v[0]).cross(v[i + 1] - v[0]) * 0.5).max(0.0))
            .collect();
        let total: f64 = areas.iter().sum();
        let mut r = rng.gen::<f64>() * total;
        let mut k = 0;
        while k + 1 < areas.len() && r > areas[k] {
            r -= areas[k];
            k += 1;
        }
        let (a, b, c) = (v[0], v[k + 1], v[k + 2]);
        let mut s: f64 = rng.gen();
        let mut t: f64 = rng.gen();
        if s + t > 1.0 {
            s = 1.0 - s;
            t = 1.0 - t;
        }
        a + (b - a) * s + (c - a) * t
    }
}

fn dedup_ring(ring: &mut Vec<Point>, tol: f64) {
    ring.dedup_by(|a, b| (*a - *b).euclid() <= tol);
    while ring.len() > 1 && (ring[0] - ring[ring.len() - 1]).euclid() <= tol {
        ring.pop();
    }
}

/// Signed shoelace area (positive for counter-clockwise rings).
pub fn ring_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let o = ring[0];
    (1..n - 1)
        .map(|i| (ring[i] - o).cross(ring[i + 1] - o))
        .sum::<f64>()
        * 0.5
}

pub fn ring_centroid(ring: &[Point]) -> Point {
    let n = ring.len();
    let o = ring[0];
    let mut a = 0.0;
    let mut c = Point::ORIGIN;
    for i in 1..n.saturating_sub(1) {
        let p = ring[i] - o;
        let q = ring[i + 1] - o;
        let w = p.cross(q);
        a += w;
        c = c + (p + q) * w;
    }
    if a == 0.0 {
        let s = ring.iter().fold(Point::ORIGIN, |acc, p| acc + *p);
        return s * (1.0 / n as f64);
    }
    o + c * (1.0 / (3.0 * a))
}

/// Even-odd point-in-ring test.
pub fn point_in_ring(p: Point, ring: &[Point]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
