//! Overlay of the six ODC partitions into the OODC partition.
//!
//! All cell boundaries plus the box edges are split at their mutual
//! intersections, welded, and turned into a planar graph whose faces are
//! traced with half-edges. Each face is labelled by evaluating the cone-nearest
//! terminal at an interior point.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::json;

use crate::clip::{point_in_ring, ring_area};
use crate::error::{Error, Result};
use crate::geometry::segment::{intersect_segments, point_segment_distance, SegmentHit};
use crate::geometry::{nearest_in_cone, BBox, HexFrame, Point, UnitBall};
use crate::odc::{build_odc_partition, OdcPartition};

/// Per-cone cone-nearest terminal; `None` where the cone holds no terminal.
pub type Label = [Option<usize>; 6];

/// Index used for edges that come from the box outline.
pub const BOX_ORIGIN: usize = 6;

#[derive(Debug, Clone)]
pub struct OodcRegion {
    pub label: Label,
    pub outer: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
    pub representative: Point,
    pub area: f64,
}

impl OodcRegion {
    /// Distinct terminals appearing in the label.
    pub fn terminals(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.label.iter().flatten().copied().collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    fn rings(&self) -> impl Iterator<Item = &Vec<Point>> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    /// Closed containment: inside, or within `tol` of a boundary edge.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let mut inside = false;
        for r in self.rings() {
            if point_in_ring(p, r) {
                inside = !inside;
            }
        }
        inside || self.boundary_distance(p) <= tol
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        let mut d = f64::INFINITY;
        for r in self.rings() {
            for k in 0..r.len() {
                d = d.min(point_segment_distance(p, r[k], r[(k + 1) % r.len()]));
            }
        }
        d
    }

    fn bbox(&self) -> BBox {
        BBox::around(&self.outer).expect("face has vertices")
    }
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub vertices: Vec<Point>,
    /// Edge endpoints and the partition index it came from (`BOX_ORIGIN` for box edges).
    pub edges: Vec<(usize, usize, usize)>,
    pub regions: Vec<OodcRegion>,
    /// Connected components of the edge graph.
    pub components: usize,
    pub bbox: BBox,
    index: GridIndex,
}

#[derive(Debug, Clone)]
struct GridIndex {
    bbox: BBox,
    n: usize,
    cells: Vec<Vec<usize>>,
}

impl GridIndex {
    fn new(bbox: BBox, regions: &[OodcRegion]) -> Self {
        let n = ((regions.len() as f64).sqrt().ceil() as usize).clamp(1, 256);
        let mut idx = GridIndex {
            bbox,
            n,
            cells: vec![Vec::new(); n * n],
        };
        for (r, reg) in regions.iter().enumerate() {
            let b = reg.bbox();
            let (x0, y0) = idx.cell(b.min);
            let (x1, y1) = idx.cell(b.max);
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    idx.cells[cy * n + cx].push(r);
                }
            }
        }
        idx
    }

    fn cell(&self, p: Point) -> (usize, usize) {
        let fx = (p.x - self.bbox.min.x) / self.bbox.width().max(f64::MIN_POSITIVE);
        let fy = (p.y - self.bbox.min.y) / self.bbox.height().max(f64::MIN_POSITIVE);
        let c = |f: f64| ((f * self.n as f64).floor().max(0.0) as usize).min(self.n - 1);
        (c(fx), c(fy))
    }

    fn candidates(&self, p: Point) -> &[usize] {
        let (cx, cy) = self.cell(p);
        &self.cells[cy * self.n + cx]
    }
}

struct Welder {
    pts: Vec<Point>,
    grid: HashMap<(i64, i64), Vec<usize>>,
    tol: f64,
}

impl Welder {
    fn id(&mut self, p: Point) -> usize {
        let key = |p: Point| ((p.x / (2.0 * self.tol)).floor() as i64, (p.y / (2.0 * self.tol)).floor() as i64);
        let (kx, ky) = key(p);
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

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Interior point of a polygon with holes: midpoint of the widest inside
/// interval on one of a few horizontal scan lines, keeping the candidate
/// farthest from the boundary.
fn representative(outer: &[Point], holes: &[Vec<Point>]) -> Point {
    let rings: Vec<&[Point]> = std::iter::once(outer).chain(holes.iter().map(|h| h.as_slice())).collect();
    let mut ys: Vec<f64> = rings.iter().flat_map(|r| r.iter().map(|p| p.y)).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let mut gaps: Vec<(f64, f64)> = ys.windows(2).map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1]))).collect();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let dist = |p: Point| {
        rings
            .iter()
            .flat_map(|r| (0..r.len()).map(move |k| point_segment_distance(p, r[k], r[(k + 1) % r.len()])))
            .fold(f64::INFINITY, f64::min)
    };
    let mut best: Option<(f64, Point)> = None;
    for &(_, y) in gaps.iter().take(4) {
        let mut xs: Vec<f64> = Vec::new();
        for r in &rings {
            for k in 0..r.len() {
                let (a, b) = (r[k], r[(k + 1) % r.len()]);
                if (a.y > y) != (b.y > y) {
                    xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks(2) {
            if pair.len() == 2 {
                let p = Point::new(0.5 * (pair[0] + pair[1]), y);
                let d = dist(p);
                if best.map_or(true, |(bd, _)| d > bd) {
                    best = Some((d, p));
                }
            }
        }
    }
    best.map(|(_, p)| p).unwrap_or_else(|| crate::clip::ring_centroid(outer))
}

/// Overlays the six partitions (one per cone) into labelled faces.
pub fn overlay_partitions(parts: &[OdcPartition]) -> Result<Arrangement> {
    if parts.len() != 6 {
        return Err(Error::MismatchedPartitions);
    }
    let first = &parts[0];
    for (k, p) in parts.iter().enumerate() {
        if p.i != k || p.bbox != first.bbox || p.terminals != first.terminals || p.ball != first.ball || p.frame != first.frame {
            return Err(Error::MismatchedPartitions);
        }
    }
    let bbox = first.bbox;
    let mut segs: Vec<(Point, Point, usize)> = Vec::new();
    for p in parts {
        segs.extend(p.boundary.iter().map(|(a, b)| (*a, *b, p.i)));
    }
    let c = bbox.corners();
    for k in 0..4 {
        segs.push((c[k], c[(k + 1) % 4], BOX_ORIGIN));
    }
    build_arrangement(segs, bbox, &first.ball, &first.frame, &first.terminals)
}

/// Splits edges at welded vertices lying on their interior. Welding moves
/// points by up to `tol`, which can leave such junctions behind.
fn split_t_junctions(pts: &[Point], mut edges: Vec<(usize, usize, usize)>, tol: f64) -> Vec<(usize, usize, usize)> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x));
    let xs: Vec<f64> = order.iter().map(|&i| pts[i].x).collect();
    for _ in 0..4 {
        let mut changed = false;
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        let mut out = Vec::with_capacity(edges.len());
        for (u, v, o) in edges {
            let (a, b) = (pts[u], pts[v]);
            let start = xs.partition_point(|x| *x < a.x.min(b.x) - tol);
            let hi = a.x.max(b.x) + tol;
            let d = b - a;
            let len2 = d.dot(d);
            let mut inner: Vec<(f64, usize)> = order[start..]
                .iter()
                .take_while(|&&w| pts[w].x <= hi)
                .filter(|&&w| w != u && w != v && point_segment_distance(pts[w], a, b) <= tol)
                .map(|&w| ((pts[w] - a).dot(d) / len2, w))
                .filter(|(t, _)| *t > 0.0 && *t < 1.0)
                .collect();
            inner.sort_by(|x, y| x.0.total_cmp(&y.0));
            changed |= !inner.is_empty();
            let mut chain = vec![u];
            chain.extend(inner.into_iter().map(|(_, w)| w));
            chain.push(v);
            for w in chain.windows(2) {
                let key = (w[0].min(w[1]), w[0].max(w[1]));
                if key.0 != key.1 && seen.insert(key, ()).is_none() {
                    out.push((key.0, key.1, o));
                }
            }
        }
        edges = out;
        if !changed {
            break;
        }
    }
    edges
}

/// Builds the six partitions in parallel and overlays them.
pub fn oodc_partition(ball: &UnitBall, frame: &HexFrame, terminals: &[Point], bbox: &BBox) -> Result<Arrangement> {
    let parts: Vec<OdcPartition> = (0..6)
        .into_par_iter()
        .map(|i| build_odc_partition(ball, frame, terminals, i, bbox))
        .collect::<Result<_>>()?;
    overlay_partitions(&parts)
}

pub(crate) fn build_arrangement(
    segs: Vec<(Point, Point, usize)>,
    bbox: BBox,
    ball: &UnitBall,
    frame: &HexFrame,
    terminals: &[Point],
) -> Result<Arrangement> {
    let scale = bbox.diagonal().max(1.0);
    let tol = 1e-9 * scale;
    let segs: Vec<(Point, Point, usize)> = segs.into_iter().filter(|(a, b, _)| (*a - *b).euclid() > tol).collect();

    // Split parameters per segment.
    let mut cuts: Vec<Vec<Point>> = segs.iter().map(|(a, b, _)| vec![*a, *b]).collect();
    let mut order: Vec<usize> = (0..segs.len()).collect();
    let minx = |s: &(Point, Point, usize)| s.0.x.min(s.1.x);
    let maxx = |s: &(Point, Point, usize)| s.0.x.max(s.1.x);
    order.sort_by(|&a, &b| minx(&segs[a]).total_cmp(&minx(&segs[b])));
    for (oi, &i) in order.iter().enumerate() {
        let (a, b, _) = segs[i];
        let (ylo, yhi) = (a.y.min(b.y) - tol, a.y.max(b.y) + tol);
        let xhi = maxx(&segs[i]) + tol;
        for &j in &order[oi + 1..] {
            if minx(&segs[j]) > xhi {
                break;
            }
            let (c2, d2, _) = segs[j];
            if c2.y.max(d2.y) < ylo || c2.y.min(d2.y) > yhi {
                continue;
            }
            match intersect_segments(a, b, c2, d2, tol) {
                SegmentHit::None => {}
                SegmentHit::Point(p) => {
                    cuts[i].push(p);
                    cuts[j].push(p);
                }
                SegmentHit::Overlap(p, q) => {
                    cuts[i].extend([p, q]);
                    cuts[j].extend([p, q]);
                }
            }
            // Nearly parallel pairs can miss T-junctions and overlaps above.
            for e in [c2, d2] {
                if point_segment_distance(e, a, b) <= tol {
                    cuts[i].push(e);
                }
            }
            for e in [a, b] {
                if point_segment_distance(e, c2, d2) <= tol {
                    cuts[j].push(e);
                }
            }
        }
    }

    let mut welder = Welder {
        pts: Vec::new(),
        grid: HashMap::new(),
        tol,
    };
    let mut edge_map: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (k, (a, b, origin)) in segs.iter().enumerate() {
        let d = *b - *a;
        let len2 = d.dot(d);
        let mut ts: Vec<(f64, Point)> = cuts[k].iter().map(|p| ((*p - *a).dot(d) / len2, *p)).collect();
        ts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let ids: Vec<usize> = ts.iter().map(|(_, p)| welder.id(*p)).collect();
        for w in ids.windows(2) {
            let (u, v) = (w[0], w[1]);
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            edge_map.entry(key).or_insert_with(|| {
                edges.push((key.0, key.1, *origin));
                edges.len() - 1
            });
        }
    }
    let pts = welder.pts;
    let nv = pts.len();
    let edges = split_t_junctions(&pts, edges, tol);

    // Half-edges: 2e is u→v, 2e+1 is v→u.
    let origin_of = |h: usize| if h % 2 == 0 { edges[h / 2].0 } else { edges[h / 2].1 };
    let target_of = |h: usize| if h % 2 == 0 { edges[h / 2].1 } else { edges[h / 2].0 };
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for h in 0..2 * edges.len() {
        out[origin_of(h)].push(h);
    }
    let mut pos = vec![0usize; 2 * edges.len()];
    for (v, list) in out.iter_mut().enumerate() {
        list.sort_by(|&a, &b| (pts[target_of(a)] - pts[v]).angle().total_cmp(&(pts[target_of(b)] - pts[v]).angle()));
        for (k, &h) in list.iter().enumerate() {
            pos[h] = k;
        }
    }
    let next = |h: usize| {
        let v = target_of(h);
        let twin = h ^ 1;
        let list = &out[v];
        list[(pos[twin] + list.len() - 1) % list.len()]
    };

    let mut parent: Vec<usize> = (0..nv).collect();
    for (u, v, _) in &edges {
        let (ru, rv) = (find(&mut parent, *u), find(&mut parent, *v));
        if ru != rv {
            parent[ru] = rv;
        }
    }
    let comp: Vec<usize> = (0..nv).map(|v| find(&mut parent, v)).collect();
    let mut roots: Vec<usize> = comp.clone();
    roots.sort_unstable();
    roots.dedup();
    let components = roots.len();
    let box_comp: Vec<usize> = edges.iter().filter(|e| e.2 == BOX_ORIGIN).map(|e| comp[e.0]).collect();

    let mut seen = vec![false; 2 * edges.len()];
    let mut faces: Vec<(Vec<Point>, usize)> = Vec::new();
    let mut holes: Vec<(Vec<Point>, usize)> = Vec::new();
    for h0 in 0..2 * edges.len() {
        if seen[h0] {
            continue;
        }
        let mut ring = Vec::new();
        let mut h = h0;
        while !seen[h] {
            seen[h] = true;
            ring.push(pts[origin_of(h)]);
            h = next(h);
        }
        let c = comp[origin_of(h0)];
        if ring_area(&ring) > 0.0 {
            faces.push((ring, c));
        } else if !box_comp.contains(&c) {
            holes.push((ring, c));
        }
    }

    let face_areas: Vec<f64> = faces.iter().map(|(r, _)| ring_area(r)).collect();
    let mut face_holes: Vec<Vec<Vec<Point>>> = vec![Vec::new(); faces.len()];
    for (ring, c) in holes {
        if ring_area(&ring).abs() <= f64::EPSILON * scale * scale {
            continue;
        }
        let probe = ring[0];
        let host = faces
            .iter()
            .enumerate()
            .filter(|(_, (r, fc))| *fc != c && point_in_ring(probe, r))
            .min_by(|a, b| face_areas[a.0].total_cmp(&face_areas[b.0]))
            .map(|(k, _)| k)
            .ok_or_else(|| Error::Internal("hole without host face".into()))?;
        face_holes[host].push(ring);
    }

    let regions: Vec<OodcRegion> = faces
        .into_par_iter()
        .zip(face_holes.into_par_iter())
        .map(|((outer, _), holes)| {
            let rep = representative(&outer, &holes);
            let mut label = [None; 6];
            for (i, slot) in label.iter_mut().enumerate() {
                *slot = nearest_in_cone(ball, frame, terminals, rep, i).map(|(t, _)| t);
            }
            let area = ring_area(&outer) + holes.iter().map(|h| ring_area(h)).sum::<f64>();
            OodcRegion {
                label,
                outer,
                holes,
                representative: rep,
                area,
            }
        })
        .collect();
    let index = GridIndex::new(bbox, &regions);
    Ok(Arrangement {
        vertices: pts,
        edges,
        regions,
        components,
        bbox,
        index,
    })
}

impl Arrangement {
    /// `V − E + F = 1 + C`, counting the outer face once.
    pub fn euler_holds(&self) -> bool {
        let (v, e, f) = (self.vertices.len() as i64, self.edges.len() as i64, self.regions.len() as i64 + 1);
        v - e + f == 1 + self.components as i64
    }

    /// Index of the region whose closed face contains `p`, lowest index on ties.
    pub fn locate(&self, p: Point) -> Result<usize> {
        let tol = 1e-9 * self.bbox.diagonal().max(1.0);
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        if !self.bbox.contains(p, tol) {
            return Err(Error::OutOfBox);
        }
        let cands = self.index.candidates(p);
        if let Some(&r) = cands.iter().filter(|&&r| self.regions[r].contains(p, tol)).min() {
            return Ok(r);
        }
        // Welding can leave hairline gaps; fall back to the nearest boundary.
        (0..self.regions.len())
            .min_by(|&a, &b| {
                self.regions[a]
                    .boundary_distance(p)
                    .total_cmp(&self.regions[b].boundary_distance(p))
            })
            .ok_or(Error::EmptyInput)
    }

    pub fn locate_region(&self, p: Point) -> Result<&OodcRegion> {
        self.locate(p).map(|r| &self.regions[r])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ring = |r: &Vec<Point>| r.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>();
        json!({
            "box": self.bbox,
            "regions": self.regions.iter().map(|r| json!({
                "label": r.label,
                "rings": std::iter::once(&r.outer).chain(r.holes.iter()).map(ring).collect::<Vec<_>>(),
                "representative": r.representative,
            })).collect::<Vec<_>>(),
        })
    }
}

/// One entry per distinct label, with the representative of its first region.
pub fn candidate_region_labels(regions: &[OodcRegion]) -> Vec<(Label, Point)> {
    let mut seen: HashMap<Label, usize> = HashMap::new();
    let mut out = Vec::new();
    for r in regions {
        seen.entry(r.label).or_insert_with(|| {
            out.push((r.label, r.representative));
            out.len() - 1
        });
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
