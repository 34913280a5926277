//! Brute-force reference implementations used to cross-check the main path.
//! Apart from norm distances, nothing here calls into the solver's geometry.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{BBox, BallShape, HexFrame, Point, UnitBall};
use crate::mst::{canonical_sum, NodeRef, Role, SpanningTree, TreeEdge, ViableForest};
use crate::topology::{evaluate_cost, CostFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Grid points per axis for one Steiner point.
    pub grid: usize,
    /// Window shrink factor once the best grid point is interior.
    pub shrink: f64,
    /// Grid points per axis when two Steiner points are searched jointly.
    pub grid_pair: usize,
    pub shrink_pair: f64,
    /// Stop once the window half-width falls below this fraction of the instance diameter.
    pub resolution: f64,
    pub max_rounds: usize,
    /// Central-cut ellipsoid iterations run after the grid for each topology.
    pub ellipsoid_iters: usize,
    pub max_n: usize,
    pub max_k: usize,
    /// Search window: bounding box grown by `box_inflation × diameter + 1`.
    pub box_inflation: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid: 41,
            shrink: 5.0,
            grid_pair: 9,
            shrink_pair: 2.0,
            resolution: 1e-7,
            max_rounds: 200,
            ellipsoid_iters: 6000,
            max_n: 7,
            max_k: 2,
            box_inflation: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub cost: f64,
    /// Certified bound on how far `cost` may sit above the optimum (over
    /// placements inside the search window).
    pub error_bound: f64,
    pub steiner: Vec<Point>,
}

/// Exact MST by enumerating every labelled tree through its Prüfer sequence.
pub fn brute_mst(ball: &UnitBall, points: &[Point]) -> Result<SpanningTree> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > 8 {
        return Err(Error::SizeCap(format!("brute_mst supports at most 8 points, got {n}")));
    }
    let d = |a: usize, b: usize| ball.distance(points[a], points[b]);
    if n <= 2 {
        let edges = if n == 2 { vec![TreeEdge { u: 0, v: 1, len: d(0, 1) }] } else { vec![] };
        return SpanningTree::from_edges(points.to_vec(), vec![Role::Terminal; n], edges);
    }
    let mut seq = vec![0usize; n - 2];
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    loop {
        let edges = prufer_decode(&seq, n);
        let total = canonical_sum(edges.iter().map(|&(a, b)| d(a, b)));
        if best.as_ref().map_or(true, |(b, _)| total < *b) {
            best = Some((total, edges));
        }
        // Next sequence in base n.
        let mut i = 0;
        while i < seq.len() {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == seq.len() {
            break;
        }
    }
    let (_, edges) = best.expect("at least one tree");
    let edges = edges
        .into_iter()
        .map(|(a, b)| TreeEdge { u: a.min(b), v: a.max(b), len: d(a, b) })
        .collect();
    SpanningTree::from_edges(points.to_vec(), vec![Role::Terminal; n], edges)
}

fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Kruskal over terminal pairs with the given groups pre-merged (zero-weight edges).
fn contracted_mst_lengths(ball: &UnitBall, terminals: &[Point], groups: &[Vec<usize>]) -> Vec<f64> {
    let n = terminals.len();
    let mut dsu = Dsu((0..n).collect());
    for g in groups {
        for w in g.windows(2) {
            dsu.union(w[0], w[1]);
        }
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((ball.distance(terminals[a], terminals[b]), a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    pairs
        .into_iter()
        .filter(|&(_, a, b)| dsu.union(a, b))
        .map(|(l, _, _)| l)
        .collect()
}

/// Length of a minimum F-fixed spanning tree: F's edges plus an MST over the
/// terminals in which each component's attachment set is contracted.
pub fn fmst_contraction_oracle(ball: &UnitBall, terminals: &[Point], f: &ViableForest) -> f64 {
    let pos = |r: NodeRef| match r {
        NodeRef::Terminal(i) => terminals[i],
        NodeRef::Steiner(j) => f.steiner[j],
    };
    let mut lengths: Vec<f64> = f.topology.edges.iter().map(|(a, b)| ball.distance(pos(*a), pos(*b))).collect();
    // Group terminals by component via a union-find over all forest nodes.
    let n = terminals.len();
    let mut dsu = Dsu((0..n + f.steiner.len()).collect());
    let idx = |r: NodeRef| match r {
        NodeRef::Terminal(i) => i,
        NodeRef::Steiner(j) => n + j,
    };
    for (a, b) in &f.topology.edges {
        dsu.union(idx(*a), idx(*b));
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<(usize, usize)> = Vec::new();
    let touched: std::collections::BTreeSet<usize> = f
        .topology
        .edges
        .iter()
        .flat_map(|(a, b)| [*a, *b])
        .filter_map(|r| if let NodeRef::Terminal(i) = r { Some(i) } else { None })
        .collect();
    for x in touched {
        let r = dsu.find(x);
        match root_of.iter().find(|(rr, _)| *rr == r) {
            Some(&(_, g)) => groups[g].push(x),
            None => {
                root_of.push((r, groups.len()));
                groups.push(vec![x]);
            }
        }
    }
    lengths.extend(contracted_mst_lengths(ball, terminals, &groups));
    canonical_sum(lengths)
}

/// Cone-nearest terminal by a plain angular scan: `x` is visible from `y` when
/// the direction `x − y` lies within the cone's angular interval.
pub fn nearest_in_cone_scan(ball: &UnitBall, frame: &HexFrame, terminals: &[Point], y: Point, i: usize) -> Option<usize> {
    let tau = std::f64::consts::TAU;
    let lo = frame.points[i % 6];
    let hi = frame.points[(i + 1) % 6];
    let a0 = lo.y.atan2(lo.x);
    let span = (hi.y.atan2(hi.x) - a0).rem_euclid(tau);
    let mut best: Option<(f64, usize)> = None;
    for (k, x) in terminals.iter().enumerate() {
        let v = *x - y;
        let visible = if v.x == 0.0 && v.y == 0.0 {
            true
        } else {
            let w = (v.y.atan2(v.x) - a0).rem_euclid(tau);
            w <= span + 1e-12 || w >= tau - 1e-12
        };
        if visible {
            let d = ball.distance(y, *x);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, k));
            }
        }
    }
    best.map(|(_, k)| k)
}

/// A forest topology over a subset of terminals: per Steiner point its terminal
/// neighbours, plus an optional edge between Steiner points 0 and 1.
#[derive(Debug, Clone)]
struct OracleTopology {
    stars: Vec<Vec<usize>>,
    linked: bool,
}

fn subsets(n: usize, min: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<usize>>())
        .filter(|s| s.len() >= min && s.len() <= max)
        .collect()
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

fn oracle_topologies(n: usize, k: usize) -> Vec<OracleTopology> {
    let mut out = Vec::new();
    if k >= 1 {
        for s in subsets(n, 2, 6) {
            out.push(OracleTopology { stars: vec![s], linked: false });
        }
    }
    if k >= 2 {
        let any = subsets(n, 1, 6);
        for a in &any {
            for b in &any {
                if !disjoint(a, b) {
                    continue;
                }
                // Linked: each Steiner point has degree |A| + 1, at most 6.
                if a < b && a.len() <= 5 && b.len() <= 5 {
                    out.push(OracleTopology { stars: vec![a.clone(), b.clone()], linked: true });
                }
                if a < b && a.len() >= 2 && b.len() >= 2 {
                    out.push(OracleTopology { stars: vec![a.clone(), b.clone()], linked: false });
                }
            }
        }
    }
    out
}

/// A subgradient of `‖·‖` at `v`.
fn norm_subgradient(ball: &UnitBall, v: Point) -> Point {
    if v == Point::ORIGIN {
        return Point::ORIGIN;
    }
    match ball.shape() {
        BallShape::Polygon(_) => ball
            .facets()
            .iter()
            .map(|f| f.normal)
            .max_by(|a, b| a.dot(v).total_cmp(&b.dot(v)))
            .expect("polygon has facets"),
        BallShape::Ellipse(q) => {
            let qv = Point::new(q[0][0] * v.x + q[0][1] * v.y, q[1][0] * v.x + q[1][1] * v.y);
            qv * (1.0 / ball.norm(v))
        }
    }
}

/// Objective value and a subgradient with respect to the Steiner coordinates.
fn topology_value_and_subgradient(ball: &UnitBall, cf: CostFunction, terminals: &[Point], topo: &OracleTopology, s: &[Point], fixed: &[f64]) -> (f64, Vec<Point>) {
    // (length, steiner end, other steiner end or none, direction from steiner end)
    let mut edges: Vec<(f64, usize, Option<usize>, Point)> = Vec::new();
    for (j, star) in topo.stars.iter().enumerate() {
        for &x in star {
            edges.push((ball.distance(s[j], terminals[x]), j, None, s[j] - terminals[x]));
        }
    }
    if topo.linked {
        edges.push((ball.distance(s[0], s[1]), 0, Some(1), s[0] - s[1]));
    }
    let mut lengths: Vec<f64> = fixed.to_vec();
    lengths.extend(edges.iter().map(|e| e.0));
    let value = evaluate_cost(cf, &lengths).expect("distances are nonnegative");
    let mut g = vec![Point::ORIGIN; s.len()];
    let mut add = |e: &(f64, usize, Option<usize>, Point), w: f64| {
        let d = norm_subgradient(ball, e.3) * w;
        g[e.1] = g[e.1] + d;
        if let Some(o) = e.2 {
            g[o] = g[o] - d;
        }
    };
    match cf {
        CostFunction::Sum => edges.iter().for_each(|e| add(e, 1.0)),
        CostFunction::Power { p } => edges.iter().for_each(|e| add(e, p * e.0.powf(p - 1.0))),
        CostFunction::Bottleneck => {
            let fixed_max = fixed.iter().copied().fold(0.0, f64::max);
            if let Some(e) = edges.iter().max_by(|a, b| a.0.total_cmp(&b.0)) {
                if e.0 > fixed_max {
                    add(e, 1.0);
                }
            }
        }
    }
    (value, g)
}

/// Central-cut ellipsoid method for a convex objective on `dims` points, started
/// from the ball around `window` (as a product over points). Returns the best
/// value, where it was found, and a lower bound valid for minimisers inside the
/// starting ellipsoid.
fn ellipsoid<F: Fn(&[Point]) -> (f64, Vec<Point>)>(f: F, dims: usize, window: &BBox, iters: usize) -> (f64, Vec<Point>, f64) {
    let d = 2 * dims;
    let c = Point::new(0.5 * (window.min.x + window.max.x), 0.5 * (window.min.y + window.max.y));
    let mut x: Vec<f64> = (0..dims).flat_map(|_| [c.x, c.y]).collect();
    let r2 = dims as f64 * 0.25 * (window.width().powi(2) + window.height().powi(2));
    let mut pm = vec![vec![0.0; d]; d];
    for (i, row) in pm.iter_mut().enumerate() {
        row[i] = r2;
    }
    let to_pts = |x: &[f64]| (0..dims).map(|j| Point::new(x[2 * j], x[2 * j + 1])).collect::<Vec<_>>();
    let (mut best, mut best_x, mut lower) = (f64::INFINITY, to_pts(&x), f64::NEG_INFINITY);
    let df = d as f64;
    for _ in 0..iters {
        let pts = to_pts(&x);
        let (v, gp) = f(&pts);
        if v < best {
            best = v;
            best_x = pts;
        }
        let g: Vec<f64> = gp.iter().flat_map(|p| [p.x, p.y]).collect();
        let pg: Vec<f64> = (0..d).map(|i| (0..d).map(|j| pm[i][j] * g[j]).sum()).collect();
        let gpg: f64 = (0..d).map(|i| g[i] * pg[i]).sum();
        if !(gpg > 0.0) {
            // Zero subgradient: x is a minimiser.
            lower = lower.max(v);
            break;
        }
        let root = gpg.sqrt();
        lower = lower.max(v - root);
        if best - lower <= 1e-12 * best.abs().max(1.0) {
            break;
        }
        for i in 0..d {
            x[i] -= pg[i] / (root * (df + 1.0));
        }
        let a = df * df / (df * df - 1.0);
        let b = 2.0 / ((df + 1.0) * gpg);
        for i in 0..d {
            for j in 0..d {
                pm[i][j] = a * (pm[i][j] - b * pg[i] * pg[j]);
            }
        }
        for i in 0..d {
            for j in 0..i {
                let m = 0.5 * (pm[i][j] + pm[j][i]);
                pm[i][j] = m;
                pm[j][i] = m;
            }
        }
    }
    (best, best_x, lower)
}

fn topology_cost(ball: &UnitBall, cf: CostFunction, terminals: &[Point], topo: &OracleTopology, s: &[Point], fixed: &[f64]) -> f64 {
    let mut lengths: Vec<f64> = fixed.to_vec();
    for (j, star) in topo.stars.iter().enumerate() {
        for &x in star {
            lengths.push(ball.distance(s[j], terminals[x]));
        }
    }
    if topo.linked {
        lengths.push(ball.distance(s[0], s[1]));
    }
    evaluate_cost(cf, &lengths).expect("distances are nonnegative")
}

/// Nested grid search over Steiner placements for one topology; the objective is
/// convex for the supported cost functions, so recentring on the best grid point
/// and shrinking the window converges.
fn grid_search<F: Fn(&[Point]) -> f64>(f: F, dims: usize, window: &BBox, grid: usize, shrink: f64, stop: f64, max_rounds: usize) -> (f64, Vec<Point>, f64) {
    let mut center: Vec<Point> = vec![Point::new(0.5 * (window.min.x + window.max.x), 0.5 * (window.min.y + window.max.y)); dims];
    let mut half = 0.5 * window.width().max(window.height());
    let g = grid.max(3);
    let mut best_val = f64::INFINITY;
    let mut best_pt = center.clone();
    let mut idx = vec![0usize; 2 * dims];
    for _ in 0..max_rounds {
        let h = 2.0 * half / (g - 1) as f64;
        let mut round_best = (f64::INFINITY, center.clone(), vec![0usize; 2 * dims]);
        idx.iter_mut().for_each(|v| *v = 0);
        loop {
            let pts: Vec<Point> = (0..dims)
                .map(|j| center[j] + Point::new(-half + h * idx[2 * j] as f64, -half + h * idx[2 * j + 1] as f64))
                .collect();
            let v = f(&pts);
            if v < round_best.0 {
                round_best = (v, pts, idx.clone());
            }
            let mut c = 0;
            while c < idx.len() {
                idx[c] += 1;
                if idx[c] < g {
                    break;
                }
                idx[c] = 0;
                c += 1;
            }
            if c == idx.len() {
                break;
            }
        }
        let (v, pts, at) = round_best;
        if v < best_val {
            best_val = v;
            best_pt = pts.clone();
        }
        let on_edge = at.iter().any(|&i| i == 0 || i == g - 1);
        center = pts;
        if !on_edge {
            half /= shrink;
        }
        if half <= stop {
            break;
        }
    }
    let h = 2.0 * half / (g - 1) as f64;
    (best_val, best_pt, h)
}

/// Best cost over at most `k` Steiner points, by exhaustive topology enumeration
/// and nested grid placement.
pub fn grid_steiner_oracle(ball: &UnitBall, cf: CostFunction, terminals: &[Point], k: usize, config: &OracleConfig) -> Result<OracleResult> {
    let n = terminals.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > config.max_n || k > config.max_k {
        return Err(Error::SizeCap(format!(
            "grid oracle supports n ≤ {} and k ≤ {}, got n = {n}, k = {k}",
            config.max_n, config.max_k
        )));
    }
    let base = contracted_mst_lengths(ball, terminals, &[]);
    let mut best = OracleResult {
        cost: evaluate_cost(cf, &base)?,
        error_bound: 0.0,
        steiner: Vec::new(),
    };
    if n < 2 {
        return Ok(best);
    }
    let bb = BBox::around(terminals).expect("non-empty");
    let diam = bb.diagonal().max(1e-12);
    let window = bb.inflate(config.box_inflation * bb.diagonal() + 1.0);
    let results: Vec<(OracleResult, f64)> = oracle_topologies(n, k)
        .into_par_iter()
        .map(|topo| {
            let groups: Vec<Vec<usize>> = if topo.linked {
                vec![topo.stars.concat()]
            } else {
                topo.stars.clone()
            };
            let fixed = contracted_mst_lengths(ball, terminals, &groups);
            let dims = topo.stars.len();
            let (grid, shrink) = if dims == 1 { (config.grid, config.shrink) } else { (config.grid_pair, config.shrink_pair) };
            let (gcost, gs, _) = grid_search(
                |s| topology_cost(ball, cf, terminals, &topo, s, &fixed),
                dims,
                &window,
                grid,
                shrink,
                config.resolution * diam,
                config.max_rounds,
            );
            let (ecost, es, lower) = ellipsoid(
                |s| topology_value_and_subgradient(ball, cf, terminals, &topo, s, &fixed),
                dims,
                &window,
                config.ellipsoid_iters,
            );
            let (cost, steiner) = if ecost < gcost { (ecost, es) } else { (gcost, gs) };
            (OracleResult { cost, error_bound: 0.0, steiner }, lower.min(cost))
        })
        .collect();
    let mut lower = best.cost;
    for (r, lb) in results {
        lower = lower.min(lb);
        if r.cost < best.cost {
            best = r;
        }
    }
    best.error_bound = (best.cost - lower).max(0.0);
    Ok(best)
}
