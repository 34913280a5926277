use super::point::Point;

/// Outcome of intersecting two closed segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentHit {
    None,
    Point(Point),
    Overlap(Point, Point),
}

/// Intersects closed segments `ab` and `cd`.
///
/// `tol` is an absolute distance tolerance. Collinear segments that share more
/// than a point are reported as an overlap ordered along `ab`.
pub fn intersect_segments(a: Point, b: Point, c: Point, d: Point, tol: f64) -> SegmentHit {
    let r = b - a;
    let s = d - c;
    let rl = r.euclid();
    let sl = s.euclid();
    if rl <= tol || sl <= tol {
        // Degenerate input: treat as a point test.
        let (p, q0, q1) = if rl <= tol { (a, c, d) } else { (c, a, b) };
        return if point_segment_distance(p, q0, q1) <= tol {
            SegmentHit::Point(p)
        } else {
            SegmentHit::None
        };
    }
    let denom = r.cross(s);
    let qp = c - a;
    if denom.abs() > 1e-12 * rl * sl {
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        let tt = tol / rl;
        let tu = tol / sl;
        if t >= -tt && t <= 1.0 + tt && u >= -tu && u <= 1.0 + tu {
            return SegmentHit::Point(a + r * t.clamp(0.0, 1.0));
        }
        return SegmentHit::None;
    }
    // Parallel.
    if (qp.cross(r) / rl).abs() > tol {
        return SegmentHit::None;
    }
    let rr = r.dot(r);
    let t0 = qp.dot(r) / rr;
    let t1 = (d - a).dot(r) / rr;
    let lo = t0.min(t1).max(0.0);
    let hi = t0.max(t1).min(1.0);
    let tt = tol / rl;
    if lo > hi + tt {
        SegmentHit::None
    } else if hi - lo <= tt {
        SegmentHit::Point(a + r * ((lo + hi) * 0.5))
    } else {
        SegmentHit::Overlap(a + r * lo, a + r * hi)
    }
}

/// Intersects the infinite line through `p`,`q` with the closed segment `ab`.
pub fn intersect_line_segment(p: Point, q: Point, a: Point, b: Point, tol: f64) -> SegmentHit {
    let dir = q - p;
    let dl = dir.euclid();
    let da = dir.cross(a - p) / dl;
    let db = dir.cross(b - p) / dl;
    if da.abs() <= tol && db.abs() <= tol {
        return SegmentHit::Overlap(a, b);
    }
    if (da > tol && db > tol) || (da < -tol && db < -tol) {
        return SegmentHit::None;
    }
    if da.abs() <= tol {
        return SegmentHit::Point(a);
    }
    if db.abs() <= tol {
        return SegmentHit::Point(b);
    }
    let t = da / (da - db);
    SegmentHit::Point(a.lerp(b, t))
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let r = b - a;
    let rr = r.dot(r);
    if rr == 0.0 {
        return (p - a).euclid();
    }
    let t = ((p - a).dot(r) / rr).clamp(0.0, 1.0);
    (p - (a + r * t)).euclid()
}
