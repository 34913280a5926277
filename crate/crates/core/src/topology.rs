//! Optimal Steiner coordinates for a fixed tree topology.
//!
//! Convex cases (sum, bottleneck, power `p ≥ 1`) are posed as conic programs:
//! second-order cones for elliptic norms, facet inequalities for polygonal
//! ones, and power cones for `p > 1`. Power `p = 2` under an elliptic norm has
//! a closed-form linear solution. Power `p < 1` is non-convex and only gets a
//! multi-start local search.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BallShape, Point, UnitBall};
use crate::mst::{canonical_sum, NodeRef};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CostFunction {
    Sum,
    Power { p: f64 },
    Bottleneck,
}

impl CostFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            CostFunction::Power { p } if !(p.is_finite() && *p > 0.0) => {
                Err(Error::InvalidProblem(format!("power exponent must be positive, got {p}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether the objective is convex in the Steiner coordinates.
    pub fn is_convex(&self) -> bool {
        !matches!(self, CostFunction::Power { p } if *p < 1.0)
    }
}

/// `α` applied to an edge-length vector.
pub fn evaluate_cost(cf: CostFunction, lengths: &[f64]) -> Result<f64> {
    if let Some(&l) = lengths.iter().find(|l| **l < 0.0 || l.is_nan()) {
        return Err(Error::NegativeLength(l));
    }
    Ok(match cf {
        CostFunction::Sum => canonical_sum(lengths.iter().copied()),
        CostFunction::Power { p } => canonical_sum(lengths.iter().map(|l| l.powf(p))),
        CostFunction::Bottleneck => lengths.iter().copied().fold(0.0, f64::max),
    })
}

/// Tree over fixed terminals `A` (referenced as `NodeRef::Terminal(i)` into
/// `terminals`) and `steiner_count` free points.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyInstance {
    pub terminals: Vec<Point>,
    pub steiner_count: usize,
    pub edges: Vec<(NodeRef, NodeRef)>,
    pub ball: UnitBall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub steiner: Vec<Point>,
    pub cost: f64,
    pub lengths: Vec<f64>,
    /// False when the objective is non-convex and the result is only a local optimum.
    pub certified: bool,
}

impl TopologyInstance {
    fn index(&self, r: NodeRef) -> usize {
        match r {
            NodeRef::Terminal(i) => i,
            NodeRef::Steiner(j) => self.terminals.len() + j,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidTopology(m.into()));
        let nv = self.terminals.len() + self.steiner_count;
        if self.terminals.is_empty() {
            return bad("no terminals");
        }
        if self.terminals.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.edges.len() + 1 != nv {
            return bad("edge count does not match a tree");
        }
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut degree = vec![0usize; nv];
        for (a, b) in &self.edges {
            for r in [a, b] {
                let ok = match *r {
                    NodeRef::Terminal(i) => i < self.terminals.len(),
                    NodeRef::Steiner(j) => j < self.steiner_count,
                };
                if !ok {
                    return bad("node index out of range");
                }
            }
            let (u, v) = (self.index(*a), self.index(*b));
            degree[u] += 1;
            degree[v] += 1;
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return bad("edges contain a cycle");
            }
            parent[ru] = rv;
        }
        if degree[self.terminals.len()..].iter().any(|d| *d < 2) {
            return bad("steiner node with degree below 2");
        }
        Ok(())
    }

    fn point(&self, steiner: &[Point], r: NodeRef) -> Point {
        match r {
            NodeRef::Terminal(i) => self.terminals[i],
            NodeRef::Steiner(j) => steiner[j],
        }
    }

    pub fn lengths(&self, steiner: &[Point]) -> Vec<f64> {
        self.edges
            .iter()
            .map(|(a, b)| self.ball.distance(self.point(steiner, *a), self.point(steiner, *b)))
            .collect()
    }

    pub fn cost(&self, cf: CostFunction, steiner: &[Point]) -> f64 {
        evaluate_cost(cf, &self.lengths(steiner)).expect("norm distances are nonnegative")
    }

    fn placement(&self, cf: CostFunction, steiner: Vec<Point>, certified: bool) -> Placement {
        let lengths = self.lengths(&steiner);
        let cost = evaluate_cost(cf, &lengths).expect("norm distances are nonnegative");
        Placement {
            steiner,
            cost,
            lengths,
            certified,
        }
    }

    /// Initial guess: each Steiner point at the centroid of its terminal neighbours.
    fn initial_guess(&self) -> Vec<Point> {
        let all = centroid(&self.terminals);
        (0..self.steiner_count)
            .map(|j| {
                let nb: Vec<Point> = self
                    .edges
                    .iter()
                    .filter_map(|(a, b)| match (*a, *b) {
                        (NodeRef::Steiner(s), NodeRef::Terminal(t)) | (NodeRef::Terminal(t), NodeRef::Steiner(s)) if s == j => {
                            Some(self.terminals[t])
                        }
                        _ => None,
                    })
                    .collect();
                if nb.is_empty() {
                    all
                } else {
                    centroid(&nb)
                }
            })
            .collect()
    }
}

fn centroid(p: &[Point]) -> Point {
    let s = p.iter().fold(Point::ORIGIN, |acc, q| acc + *q);
    s * (1.0 / p.len() as f64)
}

/// Solves for Steiner coordinates whose cost is within `tol` of the optimum for this topology.
pub fn solve_fixed_topology(inst: &TopologyInstance, cf: CostFunction, tol: f64) -> Result<Placement> {
    inst.validate()?;
    cf.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidProblem("tolerance must be positive".into()));
    }
    if inst.steiner_count == 0 {
        return Ok(inst.placement(cf, Vec::new(), true));
    }
    match (cf, inst.ball.shape()) {
        (CostFunction::Power { p }, _) if p < 1.0 => Ok(multistart(inst, cf, tol)),
        (CostFunction::Power { p }, BallShape::Ellipse(_)) if p == 2.0 => laplacian(inst),
        _ => conic(inst, cf, tol),
    }
}

/// Power 2 under an elliptic norm: each Steiner point is the mean of its neighbours.
fn laplacian(inst: &TopologyInstance) -> Result<Placement> {
    let k = inst.steiner_count;
    let mut m = vec![vec![0.0f64; k]; k];
    let mut rhs = vec![Point::ORIGIN; k];
    for (a, b) in &inst.edges {
        for (u, v) in [(*a, *b), (*b, *a)] {
            if let NodeRef::Steiner(j) = u {
                m[j][j] += 1.0;
                match v {
                    NodeRef::Steiner(i) => m[j][i] -= 1.0,
                    NodeRef::Terminal(t) => rhs[j] = rhs[j] + inst.terminals[t],
                }
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    for c in 0..k {
        let piv = (c..k)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .expect("non-empty range");
        if m[piv][c].abs() < 1e-14 {
            return Err(Error::Internal("singular Steiner system".into()));
        }
        m.swap(c, piv);
        rhs.swap(c, piv);
        for r in c + 1..k {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for cc in c..k {
                    m[r][cc] -= f * m[c][cc];
                }
                rhs[r] = rhs[r] - rhs[c] * f;
            }
        }
    }
    let mut s = vec![Point::ORIGIN; k];
    for r in (0..k).rev() {
        let mut acc = rhs[r];
        for cc in r + 1..k {
            acc = acc - s[cc] * m[r][cc];
        }
        s[r] = acc * (1.0 / m[r][r]);
    }
    Ok(inst.placement(CostFunction::Power { p: 2.0 }, s, true))
}

struct Rows {
    cols: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    fn push(&mut self, entries: &[(usize, f64)], b: f64) {
        let r = self.b.len();
        for &(c, v) in entries {
            if v != 0.0 {
                self.rows.push(r);
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.b.push(b);
    }
}

fn conic(inst: &TopologyInstance, cf: CostFunction, tol: f64) -> Result<Placement> {
    let k = inst.steiner_count;
    let m = inst.edges.len();
    // Normalise so the terminals sit in the unit disk around their centroid.
    let center = centroid(&inst.terminals);
    let scale = inst
        .terminals
        .iter()
        .map(|p| (*p - center).euclid())
        .fold(0.0, f64::max)
        .max(1e-300);
    let scaled = |p: Point| (p - center) * (1.0 / scale);
    let t_col = |e: usize| 2 * k + e;
    let (nvar, extra) = match cf {
        CostFunction::Sum => (2 * k + m, 0),
        CostFunction::Bottleneck => (2 * k + m + 1, 2 * k + m),
        CostFunction::Power { .. } => (2 * k + 2 * m, 2 * k + m),
    };
    let mut q = vec![0.0; nvar];
    match cf {
        CostFunction::Sum => q[2 * k..].iter_mut().for_each(|v| *v = 1.0),
        CostFunction::Bottleneck => q[extra] = 1.0,
        CostFunction::Power { p } if p == 1.0 => q[2 * k..2 * k + m].iter_mut().for_each(|v| *v = 1.0),
        CostFunction::Power { .. } => q[extra..].iter_mut().for_each(|v| *v = 1.0),
    }
    let linear_power = matches!(cf, CostFunction::Power { p } if p == 1.0);

    // diff_e = Σ sign·s_j + constant.
    let diffs: Vec<(Vec<(usize, f64)>, Point)> = inst
        .edges
        .iter()
        .map(|(a, b)| {
            let mut vars = Vec::new();
            let mut c = Point::ORIGIN;
            for (r, sign) in [(*a, 1.0), (*b, -1.0)] {
                match r {
                    NodeRef::Terminal(i) => c = c + scaled(inst.terminals[i]) * sign,
                    NodeRef::Steiner(j) => vars.push((j, sign)),
                }
            }
            (vars, c)
        })
        .collect();

    let mut nonneg = Rows { cols: vec![], rows: vec![], vals: vec![], b: vec![] };
    let mut soc = Rows { cols: vec![], rows: vec![], vals: vec![], b: vec![] };
    let mut pow = Rows { cols: vec![], rows: vec![], vals: vec![], b: vec![] };
    let mut soc_count = 0;
    for (e, (vars, c)) in diffs.iter().enumerate() {
        match inst.ball.shape() {
            BallShape::Polygon(_) => {
                for f in inst.ball.facets() {
                    let n = f.normal;
                    let mut entries = vec![(t_col(e), -1.0)];
                    for &(j, s) in vars {
                        entries.push((2 * j, s * n.x));
                        entries.push((2 * j + 1, s * n.y));
                    }
                    nonneg.push(&entries, -n.dot(*c));
                }
            }
            BallShape::Ellipse(_) => {
                let (l, _) = inst.ball.ellipse_transform().expect("ellipse");
                soc.push(&[(t_col(e), -1.0)], 0.0);
                let mut r1 = Vec::new();
                let mut r2 = Vec::new();
                for &(j, s) in vars {
                    r1.push((2 * j, -s * l[0][0]));
                    r1.push((2 * j + 1, -s * l[0][1]));
                    r2.push((2 * j + 1, -s * l[1][1]));
                }
                soc.push(&r1, l[0][0] * c.x + l[0][1] * c.y);
                soc.push(&r2, l[1][1] * c.y);
                soc_count += 1;
            }
        }
        match cf {
            CostFunction::Bottleneck => nonneg.push(&[(t_col(e), 1.0), (extra, -1.0)], 0.0),
            CostFunction::Power { .. } if !linear_power => {
                pow.push(&[(extra + e, -1.0)], 0.0);
                pow.push(&[], 1.0);
                pow.push(&[(t_col(e), -1.0)], 0.0);
            }
            _ => {}
        }
    }

    let mut cones = Vec::new();
    let (mut ri, mut ci, mut vi, mut b) = (vec![], vec![], vec![], vec![]);
    for (block, cone) in [
        (&nonneg, (!nonneg.b.is_empty()).then(|| SupportedConeT::NonnegativeConeT(nonneg.b.len()))),
        (&soc, None),
        (&pow, None),
    ] {
        let off = b.len();
        ri.extend(block.rows.iter().map(|r| r + off));
        ci.extend_from_slice(&block.cols);
        vi.extend_from_slice(&block.vals);
        b.extend_from_slice(&block.b);
        if let Some(c) = cone {
            cones.push(c);
        }
    }
    cones.extend((0..soc_count).map(|_| SupportedConeT::SecondOrderConeT(3)));
    if let CostFunction::Power { p } = cf {
        if !linear_power {
            cones.extend((0..m).map(|_| SupportedConeT::PowerConeT(1.0 / p)));
        }
    }
    let a = CscMatrix::new_from_triplets(b.len(), nvar, ri, ci, vi);
    let pmat = CscMatrix::zeros((nvar, nvar));
    // A near-degenerate program can stall short of an accurate dual at the tight
    // setting; one retry at a looser one usually certifies.
    let mut last = String::new();
    for inner in [1e-11, 1e-9] {
        let settings = DefaultSettings {
            verbose: false,
            max_iter: 400,
            tol_gap_abs: inner,
            tol_gap_rel: inner,
            tol_feas: inner,
            ..DefaultSettings::default()
        };
        let mut solver = DefaultSolver::new(&pmat, &q, &a, &b, &cones, settings)
            .map_err(|e| Error::Internal(format!("conic setup: {e:?}")))?;
        solver.solve();
        let status = solver.solution.status;
        if !matches!(status, SolverStatus::Solved | SolverStatus::AlmostSolved) {
            last = format!("conic solver status {status:?}");
            continue;
        }
        let x = &solver.solution.x;
        let steiner: Vec<Point> = (0..k).map(|j| center + Point::new(x[2 * j], x[2 * j + 1]) * scale).collect();
        let cost_scale = match cf {
            CostFunction::Power { p } => scale.powf(p),
            _ => scale,
        };
        let lower = solver.solution.obj_val_dual * cost_scale;
        let steiner = polish(inst, cf, steiner, scale * 1e-6, scale * 1e-14);
        let placed = inst.placement(cf, steiner, true);
        let gap = placed.cost - lower;
        if gap <= tol.max(1e-9 * placed.cost.abs()) {
            return Ok(placed);
        }
        last = format!("cost {} exceeds dual bound {} by {gap:e}", placed.cost, lower);
    }
    Err(Error::ToleranceNotReached(last))
}

/// Compass search over the Steiner coordinates; only accepts improvements.
fn polish(inst: &TopologyInstance, cf: CostFunction, mut s: Vec<Point>, step0: f64, min_step: f64) -> Vec<Point> {
    let mut best = inst.cost(cf, &s);
    let mut step = step0;
    let dirs = [
        Point::new(1.0, 0.0),
        Point::new(-1.0, 0.0),
        Point::new(0.0, 1.0),
        Point::new(0.0, -1.0),
        Point::new(0.6, 0.8),
        Point::new(-0.6, -0.8),
        Point::new(0.8, -0.6),
        Point::new(-0.8, 0.6),
    ];
    // Joint directions: at a kink of the max cost the descent directions can move
    // several points at once, which single-point steps never find.
    let joint: Vec<Vec<Point>> = if s.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x901);
        (0..48 * s.len())
            .map(|_| {
                let v: Vec<Point> = (0..s.len()).map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let norm = v.iter().map(|p| p.dot(*p)).sum::<f64>().sqrt();
                v.into_iter().map(|p| p * (1.0 / norm)).collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut evals = 0usize;
    while step > min_step && evals < 200_000 {
        let mut improved = false;
        for j in 0..s.len() {
            for d in dirs {
                let old = s[j];
                s[j] = old + d * step;
                let c = inst.cost(cf, &s);
                evals += 1;
                if c < best {
                    best = c;
                    improved = true;
                } else {
                    s[j] = old;
                }
            }
        }
        for v in &joint {
            for sign in [1.0, -1.0] {
                // Keep stepping while the direction pays off.
                loop {
                    let trial: Vec<Point> = s.iter().zip(v).map(|(p, d)| *p + *d * (sign * step)).collect();
                    let c = inst.cost(cf, &trial);
                    evals += 1;
                    if c < best {
                        best = c;
                        s = trial;
                        improved = true;
                    } else {
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    s
}

/// Non-convex power costs: best of several local searches.
fn multistart(inst: &TopologyInstance, cf: CostFunction, tol: f64) -> Placement {
    let start = inst.initial_guess();
    let spread = inst
        .terminals
        .iter()
        .map(|p| (*p - centroid(&inst.terminals)).euclid())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut starts = vec![start.clone()];
    for _ in 0..4 {
        starts.push(
            start
                .iter()
                .map(|p| *p + Point::new(rng.gen_range(-0.25..0.25), rng.gen_range(-0.25..0.25)) * spread)
                .collect(),
        );
    }
    for t in &inst.terminals {
        starts.push(vec![*t; inst.steiner_count]);
    }
    let min_step = (tol * 1e-3).max(spread * 1e-14);
    starts
        .into_iter()
        .map(|s| polish(inst, cf, s, spread * 0.25, min_step))
        .map(|s| inst.placement(cf, s, false))
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn star(terminals: Vec<Point>, ball: UnitBall) -> TopologyInstance {
        let edges = (0..terminals.len())
            .map(|i| (NodeRef::Steiner(0), NodeRef::Terminal(i)))
            .collect();
        TopologyInstance {
            terminals,
            steiner_count: 1,
            edges,
            ball,
        }
    }

    #[test]
    fn cost_examples() {
        let l = [1.0, 2.0, 3.0];
        assert_eq!(evaluate_cost(CostFunction::Sum, &l).unwrap(), 6.0);
        assert_eq!(evaluate_cost(CostFunction::Power { p: 2.0 }, &l).unwrap(), 14.0);
        assert_eq!(evaluate_cost(CostFunction::Bottleneck, &l).unwrap(), 3.0);
        assert_eq!(evaluate_cost(CostFunction::Sum, &[1.0, -0.5]), Err(Error::NegativeLength(-0.5)));
        assert_eq!(
            evaluate_cost(CostFunction::Power { p: 1.0 }, &l).unwrap(),
            evaluate_cost(CostFunction::Sum, &l).unwrap()
        );
    }

    #[test]
    fn cost_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let mut l: Vec<f64> = (0..7).map(|_| rng.gen_range(0.0..5.0)).collect();
            let before: Vec<f64> = [CostFunction::Sum, CostFunction::Power { p: 1.5 }, CostFunction::Bottleneck]
                .iter()
                .map(|cf| evaluate_cost(*cf, &l).unwrap())
                .collect();
            l.reverse();
            l.swap(0, 3);
            let after: Vec<f64> = [CostFunction::Sum, CostFunction::Power { p: 1.5 }, CostFunction::Bottleneck]
                .iter()
                .map(|cf| evaluate_cost(*cf, &l).unwrap())
                .collect();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn cost_function_json() {
        let cf: CostFunction = serde_json::from_str(r#"{"type":"power","p":2}"#).unwrap();
        assert_eq!(cf, CostFunction::Power { p: 2.0 });
        assert_eq!(serde_json::to_string(&CostFunction::Sum).unwrap(), r#"{"type":"sum"}"#);
    }

    #[test]
    fn fermat_point_of_equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let inst = star(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)],
            UnitBall::euclidean(),
        );
        let pl = solve_fixed_topology(&inst, CostFunction::Sum, 1e-9).unwrap();
        assert!((pl.cost - 3f64.sqrt()).abs() < 1e-9);
        assert!((pl.steiner[0] - Point::new(0.5, h / 3.0)).euclid() < 1e-6);
    }

    #[test]
    fn square_center() {
        let inst = star(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)],
            UnitBall::euclidean(),
        );
        let pl = solve_fixed_topology(&inst, CostFunction::Sum, 1e-9).unwrap();
        assert!((pl.cost - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn power_two_gives_centroid() {
        let a = vec![Point::new(0.0, 0.0), Point::new(4.0, 1.0), Point::new(1.0, 3.0), Point::new(-2.0, 2.0)];
        let c = centroid(&a);
        let expected: f64 = a.iter().map(|p| (*p - c).dot(*p - c)).sum();
        let pl = solve_fixed_topology(&star(a.clone(), UnitBall::euclidean()), CostFunction::Power { p: 2.0 }, 1e-9).unwrap();
        assert!((pl.steiner[0] - c).euclid() < 1e-12);
        assert!((pl.cost - expected).abs() < 1e-9);
    }

    #[test]
    fn power_two_conic_path_agrees_with_linear_solve() {
        // Rectilinear norm takes the conic route.
        let a = vec![Point::new(0.0, 0.0), Point::new(4.0, 1.0), Point::new(1.0, 3.0)];
        let pl = solve_fixed_topology(&star(a.clone(), UnitBall::rectilinear()), CostFunction::Power { p: 2.0 }, 1e-8).unwrap();
        let p15 = solve_fixed_topology(&star(a, UnitBall::euclidean()), CostFunction::Power { p: 1.5 }, 1e-8).unwrap();
        assert!(pl.cost > 0.0 && p15.cost > 0.0);
        assert!(pl.certified && p15.certified);
    }

    #[test]
    fn bottleneck_midpoint() {
        for ball in [UnitBall::euclidean(), UnitBall::rectilinear(), UnitBall::linf()] {
            let (a, b) = (Point::new(0.0, 0.0), Point::new(3.0, 1.0));
            let inst = star(vec![a, b], ball.clone());
            let pl = solve_fixed_topology(&inst, CostFunction::Bottleneck, 1e-9).unwrap();
            assert!((pl.cost - ball.distance(a, b) / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_steiner_path() {
        // t0 - s0 - s1 - t1 with t2 on s0 and t3 on s1.
        let inst = TopologyInstance {
            terminals: vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(0.0, 1.0), Point::new(3.0, 1.0)],
            steiner_count: 2,
            edges: vec![
                (NodeRef::Steiner(0), NodeRef::Terminal(0)),
                (NodeRef::Steiner(0), NodeRef::Terminal(2)),
                (NodeRef::Steiner(0), NodeRef::Steiner(1)),
                (NodeRef::Steiner(1), NodeRef::Terminal(1)),
                (NodeRef::Steiner(1), NodeRef::Terminal(3)),
            ],
            ball: UnitBall::euclidean(),
        };
        let pl = solve_fixed_topology(&inst, CostFunction::Sum, 1e-9).unwrap();
        // Full Steiner tree of a 3×1 rectangle: 3 + √3.
        assert!((pl.cost - (3.0 + 3f64.sqrt())).abs() < 1e-9);
        let direct = inst.cost(CostFunction::Sum, &pl.steiner);
        assert_eq!(direct, pl.cost);
    }

    #[test]
    fn convex_objective_midpoint_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let inst = star(
            vec![Point::new(0.0, 0.0), Point::new(2.0, 0.5), Point::new(1.0, 2.0)],
            UnitBall::rectilinear(),
        );
        for cf in [CostFunction::Sum, CostFunction::Bottleneck, CostFunction::Power { p: 2.0 }] {
            for _ in 0..100 {
                let u = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let v = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let m = u.midpoint(v);
                let (fu, fv, fm) = (inst.cost(cf, &[u]), inst.cost(cf, &[v]), inst.cost(cf, &[m]));
                assert!(fm <= 0.5 * (fu + fv) + 1e-12);
            }
        }
    }

    #[test]
    fn sublinear_power_is_flagged() {
        let inst = star(
            vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 2.0)],
            UnitBall::euclidean(),
        );
        let pl = solve_fixed_topology(&inst, CostFunction::Power { p: 0.5 }, 1e-9).unwrap();
        assert!(!pl.certified);
        assert!(solve_fixed_topology(&inst, CostFunction::Power { p: -1.0 }, 1e-9).is_err());
    }

    #[test]
    fn invalid_topologies_are_rejected() {
        let mut inst = star(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], UnitBall::euclidean());
        inst.edges.pop();
        assert!(matches!(inst.validate(), Err(Error::InvalidTopology(_))));
    }
}
