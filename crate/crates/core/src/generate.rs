//! Seeded random balls and instances.

use rand::Rng;

use crate::geometry::{NormSpec, Point, UnitBall};
use crate::io::InstanceFile;
use crate::topology::CostFunction;

fn hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-9 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-9 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// A centrally symmetric convex polygon with 4 to 12 vertices.
pub fn random_polygon_ball<R: Rng>(rng: &mut R) -> UnitBall {
    loop {
        let m = rng.gen_range(2..=6);
        let mut pts = Vec::with_capacity(2 * m);
        for _ in 0..m {
            let a: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let r: f64 = rng.gen_range(0.4..2.0);
            let v = Point::new(r * a.cos(), r * a.sin());
            pts.push(v);
            pts.push(v * -1.0);
        }
        let h = hull(pts);
        if h.len() < 4 {
            continue;
        }
        if let Ok(b) = UnitBall::polygon(h) {
            return b;
        }
    }
}

/// An ellipse with random axes in `[0.3, 3]` and random orientation.
pub fn random_ellipse<R: Rng>(rng: &mut R) -> UnitBall {
    let (a, b): (f64, f64) = (rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0));
    let t: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (c, s) = (t.cos(), t.sin());
    let (ia, ib) = (1.0 / (a * a), 1.0 / (b * b));
    let q = [[c * c * ia + s * s * ib, c * s * (ia - ib)], [c * s * (ia - ib), s * s * ia + c * c * ib]];
    UnitBall::ellipse(q).expect("positive definite by construction")
}

/// `n` points uniform in `[0, side]²`.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, side: f64) -> Vec<Point> {
    (0..n).map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect()
}

pub fn random_instance<R: Rng>(rng: &mut R, n: usize, norm: NormSpec, k: usize, cost: CostFunction) -> InstanceFile {
    InstanceFile {
        terminals: random_points(rng, n, 1.0).into_iter().map(|p| [p.x, p.y]).collect(),
        norm,
        k,
        cost,
        tolerance: None,
        box_inflation: None,
        seed_direction: None,
    }
}
