//! Oriented Dirichlet cell partitions.
//!
//! The `i`-th partition assigns every point `y` the terminal closest to it
//! inside the cone `K(y, θᵢ, θᵢ₊₁)`. Equivalently it is the Voronoi diagram of
//! the terminals under the convex distance of the reflected sector
//! `B ∩ K(o, π + θᵢ, π + θᵢ₊₁)`. Cells are built as the intersection of
//! pairwise dominance regions, each kept as a list of disjoint convex
//! fragments. Cell boundaries are then recovered by cancelling edges shared
//! between fragments of the same cell.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::json;

use crate::clip::{ring_area, ConvexPolygon, HalfPlane};
use crate::geometry::segment::point_segment_distance;
use crate::geometry::{BBox, BallShape, HexFrame, Point, UnitBall};
use crate::error::{Error, Result};

/// How the norm behaves inside one angular piece of a sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gauge {
    /// `‖v‖ = normal · v` (one polygon facet).
    Linear(Point),
    /// `‖v‖ = sqrt(vᵀ Q v)`.
    Quadratic([[f64; 2]; 2]),
}

impl Gauge {
    pub fn eval(&self, v: Point) -> f64 {
        match self {
            Gauge::Linear(n) => n.dot(v),
            Gauge::Quadratic(q) => {
                (q[0][0] * v.x * v.x + 2.0 * q[0][1] * v.x * v.y + q[1][1] * v.y * v.y)
                    .max(0.0)
                    .sqrt()
            }
        }
    }
}

/// Angular piece of a sector, from `lo` anticlockwise to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubCone {
    pub lo: Point,
    pub hi: Point,
    pub gauge: Gauge,
}

/// The sector `B ∩ K(o, π + θᵢ, π + θᵢ₊₁)` used as the Voronoi wavefront for partition `i`.
#[derive(Debug, Clone)]
pub struct SectorShape {
    pub ball: UnitBall,
    pub frame: HexFrame,
    pub i: usize,
}

impl SectorShape {
    pub fn new(ball: &UnitBall, frame: &HexFrame, i: usize) -> Self {
        SectorShape {
            ball: ball.clone(),
            frame: *frame,
            i: i % 6,
        }
    }

    /// Bounding directions of the reflected cone, `(−yᵢ, −yᵢ₊₁)`.
    pub fn cone_dirs(&self) -> (Point, Point) {
        (-self.frame.lo(self.i), -self.frame.hi(self.i))
    }

    pub fn contains_direction(&self, v: Point) -> bool {
        if v.x == 0.0 && v.y == 0.0 {
            return true;
        }
        let (lo, hi) = self.cone_dirs();
        lo.cross(v) >= 0.0 && v.cross(hi) >= 0.0
    }

    /// Splits the sector at the polygon vertices it contains so that the norm is
    /// a single linear (or quadratic) form on every piece.
    pub fn pieces(&self) -> Vec<SubCone> {
        let (lo, hi) = self.cone_dirs();
        match self.ball.shape() {
            BallShape::Ellipse(q) => vec![SubCone {
                lo,
                hi,
                gauge: Gauge::Quadratic(*q),
            }],
            BallShape::Polygon(verts) => {
                let tol = 1e-12;
                let mut inner: Vec<Point> = verts
                    .iter()
                    .copied()
                    .filter(|v| lo.cross(*v) > tol * v.euclid() && v.cross(hi) > tol * v.euclid())
                    .collect();
                inner.sort_by(|a, b| {
                    let fa = lo.cross(*a).atan2(lo.dot(*a));
                    let fb = lo.cross(*b).atan2(lo.dot(*b));
                    fa.total_cmp(&fb)
                });
                let mut dirs = vec![lo];
                dirs.extend(inner);
                dirs.push(hi);
                dirs.windows(2)
                    .map(|w| {
                        let mid = self.ball.boundary_point(w[0]) + self.ball.boundary_point(w[1]);
                        let normal = self
                            .ball
                            .facets()
                            .iter()
                            .max_by(|a, b| a.normal.dot(mid).total_cmp(&b.normal.dot(mid)))
                            .expect("polygon has facets")
                            .normal;
                        SubCone {
                            lo: w[0],
                            hi: w[1],
                            gauge: Gauge::Linear(normal),
                        }
                    })
                    .collect()
            }
        }
    }

    /// Closed outline starting at the apex; elliptic arcs are sampled with `arc_samples` segments.
    pub fn outline(&self, arc_samples: usize) -> Vec<Point> {
        let (lo, hi) = self.cone_dirs();
        let mut out = vec![Point::ORIGIN];
        match self.ball.shape() {
            BallShape::Polygon(_) => {
                for p in self.pieces() {
                    out.push(self.ball.boundary_point(p.lo));
                }
                out.push(self.ball.boundary_point(hi));
            }
            BallShape::Ellipse(_) => {
                let a = lo.angle();
                let mut b = hi.angle();
                if b < a {
                    b += std::f64::consts::TAU;
                }
                let n = arc_samples.max(1);
                for k in 0..=n {
                    let t = a + (b - a) * k as f64 / n as f64;
                    out.push(self.ball.boundary_point(Point::new(t.cos(), t.sin())));
                }
            }
        }
        out
    }

    pub fn area(&self) -> f64 {
        match self.ball.ellipse_transform() {
            Some((l, _)) => {
                let (lo, hi) = self.cone_dirs();
                let map = |v: Point| Point::new(l[0][0] * v.x + l[0][1] * v.y, l[1][1] * v.y);
                let (u, w) = (map(lo), map(hi));
                let angle = u.cross(w).atan2(u.dot(w));
                0.5 * angle / (l[0][0] * l[1][1])
            }
            None => ring_area(&self.outline(0)),
        }
    }
}

/// `δ_C(from, to)`: the norm distance when `to − from` lies in the sector's cone, `+∞` otherwise.
pub fn convex_distance(sector: &SectorShape, from: Point, to: Point) -> f64 {
    let v = to - from;
    if v.x == 0.0 && v.y == 0.0 {
        return 0.0;
    }
    if sector.contains_direction(v) {
        sector.ball.norm(v)
    } else {
        f64::INFINITY
    }
}

/// Working box: bounding box of the terminals grown by `inflation × diameter + 1` on every side.
pub fn working_box(terminals: &[Point], inflation: f64) -> Result<BBox> {
    let b = BBox::around(terminals).ok_or(Error::EmptyTerminals)?;
    Ok(b.inflate(inflation * b.diagonal() + 1.0))
}

fn cone_halfplanes(apex: Point, lo: Point, hi: Point) -> [HalfPlane; 2] {
    [HalfPlane::left_of(apex, lo), HalfPlane::left_of(apex, -hi)]
}

enum Beats {
    Never,
    Always,
    Where(HalfPlane),
}

/// Region where terminal `x` (gauge `gx`) is strictly preferred to `w` (gauge `gw`).
fn beats(x: Point, gx: Gauge, w: Point, gw: Gauge, x_first: bool, tol: f64) -> Beats {
    let (a, c) = match (gx, gw) {
        (Gauge::Linear(nb), Gauge::Linear(na)) => (nb - na, -nb.dot(x) + na.dot(w)),
        (Gauge::Quadratic(q), _) | (_, Gauge::Quadratic(q)) => {
            let d = w - x;
            let qd = Point::new(q[0][0] * d.x + q[0][1] * d.y, q[1][0] * d.x + q[1][1] * d.y);
            let quad = |p: Point| q[0][0] * p.x * p.x + 2.0 * q[0][1] * p.x * p.y + q[1][1] * p.y * p.y;
            (qd * 2.0, quad(x) - quad(w))
        }
    };
    if a.euclid() <= 1e-12 * (1.0 + c.abs()) {
        if c < -tol || (c.abs() <= tol && x_first) {
            Beats::Always
        } else {
            Beats::Never
        }
    } else {
        match HalfPlane::new(a, c) {
            Some(h) => Beats::Where(h),
            None => Beats::Never,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Tolerances {
    clip: f64,
    area: f64,
    weld: f64,
}

impl Tolerances {
    fn for_box(b: &BBox) -> Self {
        let s = b.diagonal().max(1.0);
        Tolerances {
            clip: 1e-12 * s,
            area: 1e-20 * s * s,
            weld: 1e-9 * s,
        }
    }
}

/// Fragments of the region owned by terminal `w` among `terminals`.
fn owner_fragments(
    pieces: &[SubCone],
    ball: &UnitBall,
    terminals: &[Point],
    w: usize,
    bbox: &BBox,
    tol: Tolerances,
) -> Vec<ConvexPolygon> {
    let wp = terminals[w];
    let box_poly = ConvexPolygon::from_box(bbox);
    let mut frags: Vec<(ConvexPolygon, usize)> = pieces
        .iter()
        .enumerate()
        .map(|(a, pc)| (box_poly.clip_all(&cone_halfplanes(wp, pc.lo, pc.hi), tol.clip), a))
        .filter(|(p, _)| !p.is_empty() && p.area() > tol.area)
        .collect();
    let mut others: Vec<usize> = (0..terminals.len()).filter(|&x| x != w).collect();
    others.sort_by(|&a, &b| {
        ball.distance(wp, terminals[a])
            .total_cmp(&ball.distance(wp, terminals[b]))
            .then(a.cmp(&b))
    });
    let (full_lo, full_hi) = (pieces[0].lo, pieces[pieces.len() - 1].hi);
    for x in others {
        if frags.is_empty() {
            break;
        }
        let xp = terminals[x];
        let vis = cone_halfplanes(xp, full_lo, full_hi);
        let mut next = Vec::with_capacity(frags.len());
        for (poly, a) in frags {
            if poly.clip_all(&vis, tol.clip).area() <= tol.area {
                next.push((poly, a));
                continue;
            }
            let mut parts = vec![poly];
            for pc in pieces {
                let [h1, h2] = cone_halfplanes(xp, pc.lo, pc.hi);
                let hs: Vec<HalfPlane> = match beats(xp, pc.gauge, wp, pieces[a].gauge, x < w, tol.clip) {
                    Beats::Never => continue,
                    Beats::Always => vec![h1, h2],
                    Beats::Where(h) => vec![h, h1, h2],
                };
                parts = parts
                    .into_iter()
                    .flat_map(|p| p.subtract(&hs, tol.clip, tol.area))
                    .collect();
                if parts.is_empty() {
                    break;
                }
            }
            next.extend(parts.into_iter().map(|p| (p, a)));
        }
        frags = next;
    }
    frags.into_iter().map(|(p, _)| p).collect()
}

/// Fragments of the region whose cone holds no terminal.
fn empty_fragments(sector: &SectorShape, terminals: &[Point], bbox: &BBox, tol: Tolerances) -> Vec<ConvexPolygon> {
    let (lo, hi) = sector.cone_dirs();
    let mut frags = vec![ConvexPolygon::from_box(bbox)];
    for x in terminals {
        let hs = cone_halfplanes(*x, lo, hi);
        frags = frags
            .into_iter()
            .flat_map(|p| p.subtract(&hs, tol.clip, tol.area))
            .collect();
    }
    frags
}

struct Welder {
    pts: Vec<Point>,
    grid: HashMap<(i64, i64), Vec<usize>>,
    tol: f64,
}

impl Welder {
    fn new(tol: f64) -> Self {
        Welder {
            pts: Vec::new(),
            grid: HashMap::new(),
            tol,
        }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / (2.0 * self.tol)).floor() as i64, (p.y / (2.0 * self.tol)).floor() as i64)
    }

    fn id(&mut self, p: Point) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        if (self.pts[i] - p).euclid() <= self.tol {
                            return i;
                        }
                    }
                }
            }
        }
        let i = self.pts.len();
        self.pts.push(p);
        self.grid.entry((kx, ky)).or_default().push(i);
        i
    }
}

/// Outline of a union of disjoint convex fragments: rings (outer counter-clockwise,
/// holes clockwise) and the directed boundary edges they are made of.
pub(crate) fn union_outline(frags: &[ConvexPolygon], weld_tol: f64) -> (Vec<Vec<Point>>, Vec<(Point, Point)>) {
    let mut welder = Welder::new(weld_tol);
    let ids: Vec<Vec<usize>> = frags
        .iter()
        .map(|f| {
            let mut v: Vec<usize> = f.vertices.iter().map(|p| welder.id(*p)).collect();
            v.dedup();
            while v.len() > 1 && v[0] == v[v.len() - 1] {
                v.pop();
            }
            v
        })
        .collect();
    let pts = &welder.pts;
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x));
    let xs: Vec<f64> = order.iter().map(|&i| pts[i].x).collect();

    let mut count: HashMap<(usize, usize), i32> = HashMap::new();
    for ring in &ids {
        let m = ring.len();
        if m < 2 {
            continue;
        }
        for k in 0..m {
            let (u, v) = (ring[k], ring[(k + 1) % m]);
            if u == v {
                continue;
            }
            let (a, b) = (pts[u], pts[v]);
            let lo = a.x.min(b.x) - weld_tol;
            let hi = a.x.max(b.x) + weld_tol;
            let start = xs.partition_point(|x| *x < lo);
            let mut inner: Vec<(f64, usize)> = Vec::new();
            let len2 = (b - a).dot(b - a);
            for &w in order[start..].iter().take_while(|&&w| pts[w].x <= hi) {
                if w == u || w == v {
                    continue;
                }
                let p = pts[w];
                if p.y < a.y.min(b.y) - weld_tol || p.y > a.y.max(b.y) + weld_tol {
                    continue;
                }
                if point_segment_distance(p, a, b) <= weld_tol {
                    let t = (p - a).dot(b - a) / len2;
                    if t > 0.0 && t < 1.0 {
                        inner.push((t, w));
                    }
                }
            }
            inner.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut chain = vec![u];
            chain.extend(inner.into_iter().map(|(_, w)| w));
            chain.push(v);
            for e in chain.windows(2) {
                let (s, t) = (e[0], e[1]);
                if s == t {
                    continue;
                }
                match count.get_mut(&(t, s)) {
                    Some(c) if *c > 0 => *c -= 1,
                    _ => *count.entry((s, t)).or_insert(0) += 1,
                }
            }
        }
    }
    let mut out_edges: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut edges = Vec::new();
    let mut keys: Vec<_> = count.into_iter().filter(|(_, c)| *c > 0).collect();
    keys.sort();
    for ((s, t), c) in keys {
        for _ in 0..c {
            out_edges.entry(s).or_default().push(t);
            edges.push((pts[s], pts[t]));
        }
    }
    let mut rings = Vec::new();
    let mut starts: Vec<usize> = out_edges.keys().copied().collect();
    starts.sort();
    for s in starts {
        while let Some(t) = out_edges.get_mut(&s).and_then(|v| v.pop()) {
            let mut ring = vec![pts[s]];
            let mut cur = t;
            let mut guard = 0;
            while cur != s && guard < 1_000_000 {
                ring.push(pts[cur]);
                match out_edges.get_mut(&cur).and_then(|v| v.pop()) {
                    Some(n) => cur = n,
                    None => break,
                }
                guard += 1;
            }
            if ring.len() >= 3 {
                rings.push(ring);
            }
        }
    }
    (rings, edges)
}

/// One cell of an ODC partition. `owner == None` marks the region whose cone holds no terminal.
#[derive(Debug, Clone)]
pub struct OdcCell {
    pub owner: Option<usize>,
    pub fragments: Vec<ConvexPolygon>,
    pub rings: Vec<Vec<Point>>,
}

impl OdcCell {
    pub fn area(&self) -> f64 {
        self.fragments.iter().map(|f| f.area()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct OdcPartition {
    pub i: usize,
    pub cells: Vec<OdcCell>,
    pub bbox: BBox,
    /// Cell boundary segments strictly inside the box, each listed once.
    pub boundary: Vec<(Point, Point)>,
    pub terminals: Vec<Point>,
    pub ball: UnitBall,
    pub frame: HexFrame,
}

fn on_box_side(a: Point, b: Point, bx: &BBox, tol: f64) -> bool {
    let same = |u: f64, v: f64, s: f64| (u - s).abs() <= tol && (v - s).abs() <= tol;
    same(a.x, b.x, bx.min.x) || same(a.x, b.x, bx.max.x) || same(a.y, b.y, bx.min.y) || same(a.y, b.y, bx.max.y)
}

/// Builds the `i`-th ODC partition of `terminals`, clipped to `bbox`.
pub fn build_odc_partition(
    ball: &UnitBall,
    frame: &HexFrame,
    terminals: &[Point],
    i: usize,
    bbox: &BBox,
) -> Result<OdcPartition> {
    if terminals.is_empty() {
        return Err(Error::EmptyTerminals);
    }
    if terminals.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let sector = SectorShape::new(ball, frame, i);
    let pieces = sector.pieces();
    let tol = Tolerances::for_box(bbox);
    let mut raw: Vec<(Option<usize>, Vec<ConvexPolygon>)> = (0..terminals.len())
        .into_par_iter()
        .map(|w| (Some(w), owner_fragments(&pieces, ball, terminals, w, bbox, tol)))
        .collect();
    raw.push((None, empty_fragments(&sector, terminals, bbox, tol)));

    let mut cells = Vec::new();
    let mut boundary: Vec<(Point, Point)> = Vec::new();
    for (owner, fragments) in raw {
        if fragments.is_empty() {
            continue;
        }
        let (rings, edges) = union_outline(&fragments, tol.weld);
        for (a, b) in edges {
            if !on_box_side(a, b, bbox, tol.weld) {
                boundary.push((a, b));
            }
        }
        cells.push(OdcCell { owner, fragments, rings });
    }
    // Each interior edge appears once per side; keep one copy.
    let mut seen: HashMap<((i64, i64), (i64, i64)), ()> = HashMap::new();
    let q = |p: Point| ((p.x / tol.weld).round() as i64, (p.y / tol.weld).round() as i64);
    boundary.retain(|(a, b)| {
        let (ka, kb) = (q(*a), q(*b));
        let key = if ka <= kb { (ka, kb) } else { (kb, ka) };
        seen.insert(key, ()).is_none()
    });
    Ok(OdcPartition {
        i: i % 6,
        cells,
        bbox: *bbox,
        boundary,
        terminals: terminals.to_vec(),
        ball: ball.clone(),
        frame: *frame,
    })
}

impl OdcPartition {
    /// Owner of `p` according to the stored cells (`None` for the empty-cone cell or outside).
    pub fn owner_at(&self, p: Point) -> Option<Option<usize>> {
        let tol = 1e-12 * self.bbox.diagonal().max(1.0);
        self.cells
            .iter()
            .find(|c| c.fragments.iter().any(|f| f.contains(p, tol)))
            .map(|c| c.owner)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "i": self.i,
            "box": self.bbox,
            "cells": self.cells.iter().map(|c| json!({
                "owner": c.owner,
                "rings": c.rings.iter().map(|r| r.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Separator between the region where `p` is at least as close as `q` under `δ_C`
/// and the region where `q` is strictly closer.
#[derive(Debug, Clone)]
pub struct Bisector {
    pub segments: Vec<(Point, Point)>,
    /// Owner on the `δ_C(p,·) ≤ δ_C(q,·)` side.
    pub left_owner: usize,
    pub right_owner: usize,
}

impl Bisector {
    /// Chains the segments into maximal polylines.
    pub fn polylines(&self) -> Vec<Vec<Point>> {
        let mut left: Vec<(Point, Point)> = self.segments.clone();
        let mut out = Vec::new();
        let close = |a: Point, b: Point| (a - b).euclid() <= 1e-9;
        while let Some((a, b)) = left.pop() {
            let mut line = vec![a, b];
            loop {
                let tail = *line.last().unwrap();
                let head = line[0];
                if let Some(k) = left.iter().position(|(c, d)| close(*c, tail) || close(*d, tail)) {
                    let (c, d) = left.swap_remove(k);
                    line.push(if close(c, tail) { d } else { c });
                } else if let Some(k) = left.iter().position(|(c, d)| close(*c, head) || close(*d, head)) {
                    let (c, d) = left.swap_remove(k);
                    line.insert(0, if close(c, head) { d } else { c });
                } else {
                    break;
                }
            }
            out.push(line);
        }
        out
    }
}

pub fn bisector(sector: &SectorShape, p: Point, q: Point, bbox: &BBox) -> Result<Bisector> {
    if p == q {
        return Err(Error::IdenticalPoints);
    }
    let tol = Tolerances::for_box(bbox);
    let terminals = [p, q];
    let frags = owner_fragments(&sector.pieces(), &sector.ball, &terminals, 1, bbox, tol);
    let (_, edges) = union_outline(&frags, tol.weld);
    let segments = edges
        .into_iter()
        .filter(|(a, b)| !on_box_side(*a, *b, bbox, tol.weld))
        .collect();
    Ok(Bisector {
        segments,
        left_owner: 0,
        right_owner: 1,
    })
}
