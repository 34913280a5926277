//! Unit balls of planar norms: centrally symmetric convex polygons and ellipses.

use serde::{Deserialize, Serialize};

use super::point::{Point, EPS};
use super::segment::{intersect_line_segment, intersect_segments, SegmentHit};
use crate::error::{Error, Result};

/// JSON norm description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NormSpec {
    Euclidean,
    Rectilinear,
    Linf,
    Polygon { vertices: Vec<[f64; 2]> },
    Ellipse {
        #[serde(rename = "Q")]
        q: [[f64; 2]; 2],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BallShape {
    /// Counter-clockwise vertices.
    Polygon(Vec<Point>),
    /// `‖v‖ = sqrt(vᵀ Q v)`.
    Ellipse([[f64; 2]; 2]),
}

/// A polygon facet in gauge form: `‖v‖ = normal · v` for `v` in the facet's cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub normal: Point,
    pub start: Point,
    pub end: Point,
}

/// Unit ball `B = {v : ‖v‖ ≤ 1}` of a norm in the polygon/ellipse class.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitBall {
    shape: BallShape,
    facets: Vec<Facet>,
    /// Upper-triangular `L` with `Q = LᵀL` (ellipse only).
    chol: [[f64; 2]; 2],
    chol_inv: [[f64; 2]; 2],
}

/// Points where a translated boundary meets a line or another boundary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundaryHits {
    pub points: Vec<Point>,
    /// Collinear polygon facet pieces, reported as closed segments.
    pub segments: Vec<(Point, Point)>,
}

impl BoundaryHits {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.segments.is_empty()
    }

    fn push_point(&mut self, p: Point, tol: f64) {
        let dup = self.points.iter().any(|q| (*q - p).euclid() <= tol)
            || self
                .segments
                .iter()
                .any(|(a, b)| super::segment::point_segment_distance(p, *a, *b) <= tol);
        if !dup {
            self.points.push(p);
        }
    }

    fn push_segment(&mut self, a: Point, b: Point, tol: f64) {
        if self
            .segments
            .iter()
            .any(|(c, d)| ((*c - a).euclid() <= tol && (*d - b).euclid() <= tol) || ((*c - b).euclid() <= tol && (*d - a).euclid() <= tol))
        {
            return;
        }
        self.segments.push((a, b));
        self.points
            .retain(|p| super::segment::point_segment_distance(*p, a, b) > tol);
    }
}

fn mat_vec(m: &[[f64; 2]; 2], v: Point) -> Point {
    Point::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
}

impl UnitBall {
    pub fn euclidean() -> Self {
        Self::ellipse([[1.0, 0.0], [0.0, 1.0]]).expect("identity is positive definite")
    }

    pub fn rectilinear() -> Self {
        Self::polygon(vec![
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, -1.0),
        ])
        .expect("diamond is a valid ball")
    }

    pub fn linf() -> Self {
        Self::polygon(vec![
            Point::new(1.0, -1.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
            Point::new(-1.0, -1.0),
        ])
        .expect("square is a valid ball")
    }

    pub fn ellipse(q: [[f64; 2]; 2]) -> Result<Self> {
        let [[a, b], [b2, c]] = q;
        if !(a.is_finite() && b.is_finite() && b2.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite);
        }
        if (b - b2).abs() > EPS * (a.abs() + c.abs()).max(1.0) {
            return Err(Error::InvalidBall("Q must be symmetric".into()));
        }
        let det = a * c - b * b;
        if a <= 0.0 || det <= 0.0 {
            return Err(Error::InvalidBall("Q must be positive definite".into()));
        }
        // Q = LᵀL with L = [[l11, l12], [0, l22]].
        let l11 = a.sqrt();
        let l12 = b / l11;
        let l22 = (c - l12 * l12).sqrt();
        let chol = [[l11, l12], [0.0, l22]];
        let chol_inv = [[1.0 / l11, -l12 / (l11 * l22)], [0.0, 1.0 / l22]];
        Ok(UnitBall {
            shape: BallShape::Ellipse([[a, b], [b, c]]),
            facets: Vec::new(),
            chol,
            chol_inv,
        })
    }

    /// Builds a polygonal ball from counter-clockwise vertices.
    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        let m = vertices.len();
        if m < 4 {
            return Err(Error::InvalidBall("polygon needs at least 4 vertices".into()));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = vertices.iter().map(|v| v.euclid()).fold(0.0, f64::max);
        let tol = EPS * scale.max(1.0);
        for i in 0..m {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            let c = vertices[(i + 2) % m];
            let turn = (b - a).cross(c - b);
            if turn <= tol * (b - a).euclid().max((c - b).euclid()) {
                return Err(Error::InvalidBall(
                    "vertices must be strictly convex and counter-clockwise".into(),
                ));
            }
        }
        let area: f64 = (0..m)
            .map(|i| vertices[i].cross(vertices[(i + 1) % m]))
            .sum::<f64>()
            * 0.5;
        if area <= 0.0 {
            return Err(Error::InvalidBall("vertices must be counter-clockwise".into()));
        }
        for v in &vertices {
            if !vertices.iter().any(|w| (*w + *v).euclid() <= 1e-7 * scale.max(1.0)) {
                return Err(Error::InvalidBall("polygon must be centrally symmetric".into()));
            }
        }
        let mut facets = Vec::with_capacity(m);
        for i in 0..m {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            // Outward normal scaled so that normal · a = 1.
            let e = b - a;
            let raw = Point::new(e.y, -e.x);
            let h = raw.dot(a);
            if h <= 0.0 {
                return Err(Error::InvalidBall("origin must be interior".into()));
            }
            facets.push(Facet {
                normal: raw * (1.0 / h),
                start: a,
                end: b,
            });
        }
        Ok(UnitBall {
            shape: BallShape::Polygon(vertices),
            facets,
            chol: [[0.0; 2]; 2],
            chol_inv: [[0.0; 2]; 2],
        })
    }

    pub fn from_spec(spec: &NormSpec) -> Result<Self> {
        match spec {
            NormSpec::Euclidean => Ok(Self::euclidean()),
            NormSpec::Rectilinear => Ok(Self::rectilinear()),
            NormSpec::Linf => Ok(Self::linf()),
            NormSpec::Polygon { vertices } => {
                Self::polygon(vertices.iter().map(|v| Point::from(*v)).collect())
            }
            NormSpec::Ellipse { q } => Self::ellipse(*q),
        }
    }

    pub fn to_spec(&self) -> NormSpec {
        match &self.shape {
            BallShape::Polygon(v) => NormSpec::Polygon {
                vertices: v.iter().map(|p| [p.x, p.y]).collect(),
            },
            BallShape::Ellipse(q) => NormSpec::Ellipse { q: *q },
        }
    }

    pub fn shape(&self) -> &BallShape {
        &self.shape
    }

    pub fn is_polygon(&self) -> bool {
        matches!(self.shape, BallShape::Polygon(_))
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Ellipse transform `L` with `‖v‖ = |L v|₂`; zero matrix for polygons.
    pub fn ellipse_transform(&self) -> Option<([[f64; 2]; 2], [[f64; 2]; 2])> {
        match self.shape {
            BallShape::Ellipse(_) => Some((self.chol, self.chol_inv)),
            BallShape::Polygon(_) => None,
        }
    }

    /// `‖v‖`.
    #[inline]
    pub fn norm(&self, v: Point) -> f64 {
        match &self.shape {
            BallShape::Ellipse(q) => {
                let s = q[0][0] * v.x * v.x + 2.0 * q[0][1] * v.x * v.y + q[1][1] * v.y * v.y;
                s.max(0.0).sqrt()
            }
            BallShape::Polygon(_) => self
                .facets
                .iter()
                .map(|f| f.normal.dot(v))
                .fold(0.0, f64::max),
        }
    }

    /// `‖a − b‖`, evaluated on a canonical argument order so it is exactly symmetric.
    #[inline]
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        if a.lex_cmp(&b).is_le() {
            self.norm(b - a)
        } else {
            self.norm(a - b)
        }
    }

    /// The boundary point in direction `d` (i.e. `d / ‖d‖`).
    pub fn boundary_point(&self, d: Point) -> Point {
        d * (1.0 / self.norm(d))
    }

    /// Largest Euclidean radius of the ball.
    pub fn euclid_radius(&self) -> f64 {
        match &self.shape {
            BallShape::Polygon(v) => v.iter().map(|p| p.euclid()).fold(0.0, f64::max),
            BallShape::Ellipse(q) => {
                // 1/sqrt(smallest eigenvalue).
                let tr = q[0][0] + q[1][1];
                let det = q[0][0] * q[1][1] - q[0][1] * q[0][1];
                let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
                1.0 / (tr / 2.0 - disc).sqrt()
            }
        }
    }

    /// Boundary of `B + center` intersected with the line through `p`, `q`.
    pub fn boundary_line_intersection(&self, center: Point, p: Point, q: Point) -> Result<BoundaryHits> {
        if (q - p).euclid() == 0.0 {
            return Err(Error::DegenerateLine);
        }
        let tol = EPS * self.euclid_radius().max(1.0);
        let mut hits = BoundaryHits::default();
        match &self.shape {
            BallShape::Polygon(verts) => {
                let m = verts.len();
                for i in 0..m {
                    let a = verts[i] + center;
                    let b = verts[(i + 1) % m] + center;
                    match intersect_line_segment(p, q, a, b, tol) {
                        SegmentHit::None => {}
                        SegmentHit::Point(x) => hits.push_point(x, tol),
                        SegmentHit::Overlap(x, y) => hits.push_segment(x, y, tol),
                    }
                }
            }
            BallShape::Ellipse(_) => {
                let u0 = mat_vec(&self.chol, p - center);
                let u1 = mat_vec(&self.chol, q - center);
                let d = u1 - u0;
                // |u0 + t d|² = 1
                let a = d.dot(d);
                let b = 2.0 * u0.dot(d);
                let c = u0.dot(u0) - 1.0;
                let disc = b * b - 4.0 * a * c;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                        let u = u0 + d * t;
                        hits.push_point(center + mat_vec(&self.chol_inv, u), tol);
                    }
                }
            }
        }
        Ok(hits)
    }

    /// Intersection of `bd(B) + c1` and `bd(B) + c2`.
    pub fn boundary_boundary_intersection(&self, c1: Point, c2: Point) -> Result<BoundaryHits> {
        if c1 == c2 {
            return Err(Error::IdenticalCenters);
        }
        let tol = EPS * self.euclid_radius().max(1.0);
        let mut hits = BoundaryHits::default();
        match &self.shape {
            BallShape::Polygon(verts) => {
                let m = verts.len();
                for i in 0..m {
                    let a = verts[i] + c1;
                    let b = verts[(i + 1) % m] + c1;
                    for j in 0..m {
                        let c = verts[j] + c2;
                        let d = verts[(j + 1) % m] + c2;
                        match intersect_segments(a, b, c, d, tol) {
                            SegmentHit::None => {}
                            SegmentHit::Point(x) => hits.push_point(x, tol),
                            SegmentHit::Overlap(x, y) => hits.push_segment(x, y, tol),
                        }
                    }
                }
            }
            BallShape::Ellipse(_) => {
                let u1 = mat_vec(&self.chol, c1);
                let u2 = mat_vec(&self.chol, c2);
                let d = u2 - u1;
                let dist = d.euclid();
                if dist <= 2.0 + 1e-15 {
                    let mid = u1 + d * 0.5;
                    let h = (1.0 - dist * dist / 4.0).max(0.0).sqrt();
                    let perp = Point::new(-d.y, d.x) * (1.0 / dist);
                    hits.push_point(mat_vec(&self.chol_inv, mid + perp * h), tol);
                    hits.push_point(mat_vec(&self.chol_inv, mid - perp * h), tol);
                }
            }
        }
        Ok(hits)
    }
}
