//! The k-Steiner pipeline: OODC labels → candidate graphs → viable forests →
//! fixed-topology placement → F-MST update → best tree.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HexFrame, Point, UnitBall};
use crate::mst::{build_mst, fmst_deletions, fmst_update, ForestTopology, NodeRef, Pp1Table, Pp2Table, SpanningTree, ViableForest};
use crate::odc::working_box;
use crate::overlay::{candidate_region_labels, oodc_partition, Label};
use crate::topology::{evaluate_cost, solve_fixed_topology, CostFunction, Placement, TopologyInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute cost tolerance for each fixed-topology solve.
    pub fixed_topology: f64,
    /// Candidates within this (relative to `max(1, cost)`) of the best are treated as tied.
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fixed_topology: 1e-9,
            tie: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub terminals: Vec<Point>,
    pub ball: UnitBall,
    pub k: usize,
    pub cf: CostFunction,
    pub tolerances: Tolerances,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub box_inflation: f64,
    /// Upper bound on the number of label multisets examined.
    pub max_label_choices: usize,
    /// Direction of the first hexagon point; `(1, 0)` when absent.
    pub seed_direction: Option<Point>,
}

impl ProblemSpec {
    pub fn new(terminals: Vec<Point>, ball: UnitBall, k: usize, cf: CostFunction) -> Self {
        ProblemSpec {
            terminals,
            ball,
            k,
            cf,
            tolerances: Tolerances::default(),
            threads: None,
            box_inflation: 3.0,
            max_label_choices: 5_000_000,
            seed_direction: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.terminals.is_empty() {
            return Err(Error::EmptyTerminals);
        }
        if self.terminals.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.k == 0 {
            return Err(Error::InvalidProblem("k must be at least 1".into()));
        }
        if !(self.box_inflation.is_finite() && self.box_inflation >= 0.0) {
            return Err(Error::InvalidProblem("box inflation must be a nonnegative number".into()));
        }
        if !(self.tolerances.fixed_topology > 0.0 && self.tolerances.tie >= 0.0) {
            return Err(Error::InvalidProblem("tolerances must be positive".into()));
        }
        if let Some(d) = self.seed_direction {
            if !d.is_finite() || d == Point::ORIGIN {
                return Err(Error::InvalidProblem("seed direction must be a finite nonzero vector".into()));
            }
        }
        self.cf.validate()
    }

    pub fn frame(&self) -> Result<HexFrame> {
        match self.seed_direction {
            None => Ok(HexFrame::new(&self.ball)),
            Some(d) => HexFrame::construct(&self.ball, d * (1.0 / self.ball.norm(d))),
        }
    }
}

/// Graph of Table 2 step 4a(ii): Steiner clique plus each Steiner point joined to its label's terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGraph {
    pub labels: Vec<Label>,
    /// Candidate neighbours of each Steiner point.
    pub candidates: Vec<Vec<usize>>,
    /// Distinct terminal vertices.
    pub terminals: Vec<usize>,
    pub edges: Vec<(NodeRef, NodeRef)>,
}

impl CandidateGraph {
    pub fn steiner_count(&self) -> usize {
        self.labels.len()
    }
}

fn label_terminals(l: &Label) -> Vec<usize> {
    let mut t: Vec<usize> = l.iter().flatten().copied().collect();
    t.sort_unstable();
    t.dedup();
    t
}

pub fn build_candidate_graph(labels: &[Label]) -> CandidateGraph {
    let candidates: Vec<Vec<usize>> = labels.iter().map(label_terminals).collect();
    let mut terminals: Vec<usize> = candidates.iter().flatten().copied().collect();
    terminals.sort_unstable();
    terminals.dedup();
    let mut edges = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            edges.push((NodeRef::Steiner(i), NodeRef::Steiner(j)));
        }
    }
    for (i, c) in candidates.iter().enumerate() {
        edges.extend(c.iter().map(|&x| (NodeRef::Steiner(i), NodeRef::Terminal(x))));
    }
    CandidateGraph {
        labels: labels.to_vec(),
        candidates,
        terminals,
        edges,
    }
}

/// Forests on `m` labelled nodes, as edge lists over node indices.
fn steiner_forests(m: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let chosen: Vec<(usize, usize)> = (0..pairs.len()).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
        let mut parent: Vec<usize> = (0..m).collect();
        let mut acyclic = true;
        for &(a, b) in &chosen {
            let (mut ra, mut rb) = (a, b);
            while parent[ra] != ra {
                ra = parent[ra];
            }
            while parent[rb] != rb {
                rb = parent[rb];
            }
            if ra == rb {
                acyclic = false;
                break;
            }
            parent[ra] = rb;
        }
        if acyclic {
            out.push(chosen);
        }
    }
    out
}

/// Every viable subforest of `g` that uses all its Steiner vertices.
pub fn enumerate_viable_subforests(g: &CandidateGraph) -> Vec<ForestTopology> {
    let m = g.steiner_count();
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    for ss in steiner_forests(m) {
        let mut ss_deg = vec![0usize; m];
        for &(a, b) in &ss {
            ss_deg[a] += 1;
            ss_deg[b] += 1;
        }
        let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); m];
        assign(g, &ss, &ss_deg, 0, &mut chosen, &mut out);
    }
    out
}

fn assign(g: &CandidateGraph, ss: &[(usize, usize)], ss_deg: &[usize], j: usize, chosen: &mut Vec<Vec<usize>>, out: &mut Vec<ForestTopology>) {
    let m = ss_deg.len();
    if j == m {
        let mut edges: Vec<(NodeRef, NodeRef)> = ss.iter().map(|&(a, b)| (NodeRef::Steiner(a), NodeRef::Steiner(b))).collect();
        for (s, ts) in chosen.iter().enumerate() {
            edges.extend(ts.iter().map(|&x| (NodeRef::Steiner(s), NodeRef::Terminal(x))));
        }
        out.push(ForestTopology { steiner_count: m, edges });
        return;
    }
    let used: Vec<usize> = chosen[..j].iter().flatten().copied().collect();
    let avail: Vec<usize> = g.candidates[j].iter().copied().filter(|x| !used.contains(x)).collect();
    let lo = 2usize.saturating_sub(ss_deg[j]);
    let hi = 6usize.saturating_sub(ss_deg[j]).min(avail.len());
    if lo > hi {
        return;
    }
    for mask in 0u32..1 << avail.len() {
        let size = mask.count_ones() as usize;
        if size < lo || size > hi {
            continue;
        }
        chosen[j] = (0..avail.len()).filter(|b| mask >> b & 1 == 1).map(|b| avail[b]).collect();
        assign(g, ss, ss_deg, j + 1, chosen, out);
    }
    chosen[j].clear();
}

/// A connected forest component in canonical form (Steiner labels minimise the edge list).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct ComponentKey {
    terminals: Vec<usize>,
    steiner: usize,
    edges: Vec<(NodeRef, NodeRef)>,
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

fn normalise(e: (NodeRef, NodeRef)) -> (NodeRef, NodeRef) {
    if e.0 <= e.1 {
        e
    } else {
        (e.1, e.0)
    }
}

/// Splits a forest into canonical components.
fn canonical_components(f: &ForestTopology) -> Vec<ComponentKey> {
    let mut keys: Vec<ComponentKey> = f
        .components()
        .into_iter()
        .map(|c| {
            let m = c.steiner.len();
            let local = |s: usize| c.steiner.iter().position(|&x| x == s).expect("component member");
            let edges: Vec<(NodeRef, NodeRef)> = c
                .edges
                .iter()
                .map(|&e| {
                    let (a, b) = f.edges[e];
                    let map = |r: NodeRef| match r {
                        NodeRef::Steiner(s) => NodeRef::Steiner(local(s)),
                        t => t,
                    };
                    (map(a), map(b))
                })
                .collect();
            let best = permutations(m)
                .into_iter()
                .map(|perm| {
                    let mut es: Vec<(NodeRef, NodeRef)> = edges
                        .iter()
                        .map(|&(a, b)| {
                            let map = |r: NodeRef| match r {
                                NodeRef::Steiner(s) => NodeRef::Steiner(perm[s]),
                                t => t,
                            };
                            normalise((map(a), map(b)))
                        })
                        .collect();
                    es.sort_unstable();
                    es
                })
                .min()
                .expect("at least one permutation");
            ComponentKey {
                terminals: c.terminals,
                steiner: m,
                edges: best,
            }
        })
        .collect();
    keys.sort_unstable();
    keys
}

fn forest_from_components(keys: &[ComponentKey]) -> ForestTopology {
    let mut edges = Vec::new();
    let mut off = 0;
    for k in keys {
        for &(a, b) in &k.edges {
            let shift = |r: NodeRef| match r {
                NodeRef::Steiner(s) => NodeRef::Steiner(s + off),
                t => t,
            };
            edges.push((shift(a), shift(b)));
        }
        off += k.steiner;
    }
    ForestTopology {
        steiner_count: off,
        edges,
    }
}

fn component_instance(key: &ComponentKey, terminals: &[Point], ball: &UnitBall) -> TopologyInstance {
    let local = |x: usize| key.terminals.iter().position(|&t| t == x).expect("attachment terminal");
    TopologyInstance {
        terminals: key.terminals.iter().map(|&x| terminals[x]).collect(),
        steiner_count: key.steiner,
        edges: key
            .edges
            .iter()
            .map(|&(a, b)| {
                let map = |r: NodeRef| match r {
                    NodeRef::Terminal(x) => NodeRef::Terminal(local(x)),
                    s => s,
                };
                (map(a), map(b))
            })
            .collect(),
        ball: ball.clone(),
    }
}

/// Shortest closed tour through `pts` (at most 6 points, so brute force is cheap).
fn min_tour(ball: &UnitBall, pts: &[Point]) -> f64 {
    let n = pts.len();
    if n < 2 {
        return 0.0;
    }
    let rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    for perm in permutations(rest.len()) {
        let order: Vec<usize> = std::iter::once(0).chain(perm.iter().map(|&i| rest[i])).collect();
        let len: f64 = (0..n).map(|i| ball.distance(pts[order[i]], pts[order[(i + 1) % n]])).sum();
        best = best.min(len);
    }
    best
}

/// Lower bound on the placed cost of one component. Any tree spanning the
/// attachment set has at least half the length of the shortest tour through it.
fn component_lower_bound(key: &ComponentKey, terminals: &[Point], ball: &UnitBall, cf: CostFunction) -> f64 {
    let pts: Vec<Point> = key.terminals.iter().map(|&x| terminals[x]).collect();
    let half_tour = 0.5 * min_tour(ball, &pts) * (1.0 - 1e-12);
    let edges = key.edges.len() as f64;
    match cf {
        CostFunction::Sum => half_tour,
        CostFunction::Power { p } if p >= 1.0 => edges * (half_tour / edges).powf(p),
        CostFunction::Power { .. } => 0.0,
        CostFunction::Bottleneck => half_tour / edges,
    }
}

fn combine(cf: CostFunction, a: f64, b: f64) -> f64 {
    match cf {
        CostFunction::Bottleneck => a.max(b),
        _ => a + b,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Region labels chosen for the Steiner points (empty for the plain MST).
    pub labels: Vec<Label>,
    pub topology: ForestTopology,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub regions: usize,
    pub labels: usize,
    pub label_choices: usize,
    pub forests: usize,
    pub components_solved: usize,
    pub forests_evaluated: usize,
    pub forests_pruned: usize,
    /// Fixed-topology solves that missed their tolerance and were skipped.
    pub warnings: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Input terminals, duplicates included.
    pub terminals: Vec<Point>,
    pub steiner: Vec<Point>,
    /// Tree edges over input terminal indices and Steiner indices.
    pub edges: Vec<(NodeRef, NodeRef)>,
    pub lengths: Vec<f64>,
    pub cost: f64,
    pub cf: CostFunction,
    pub provenance: Provenance,
    pub stats: SolveStats,
}

impl Solution {
    pub fn steiner_degree(&self, j: usize) -> usize {
        self.edges.iter().filter(|(a, b)| *a == NodeRef::Steiner(j) || *b == NodeRef::Steiner(j)).count()
    }
}

struct Candidate {
    cost: f64,
    steiner: usize,
    key: Vec<ComponentKey>,
    labels: Vec<Label>,
}

/// Runs the full pipeline.
pub fn solve(spec: &ProblemSpec) -> Result<Solution> {
    solve_with_progress(spec, &|_, _| {})
}

/// The plain MST on the terminals, in the same report shape as [`solve`].
pub fn baseline(spec: &ProblemSpec) -> Result<Solution> {
    spec.validate()?;
    run(spec, &|_, _| {}, false)
}

/// As [`solve`], reporting `(label choices processed, total)` as enumeration proceeds.
pub fn solve_with_progress(spec: &ProblemSpec, progress: &(dyn Fn(usize, usize) + Sync)) -> Result<Solution> {
    spec.validate()?;
    match spec.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(|| run(spec, progress, true)),
        None => run(spec, progress, true),
    }
}

fn multisets(l: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(l: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..l {
            cur.push(i);
            rec(l, k, i, cur, out);
            cur.pop();
        }
    }
    rec(l, k, 0, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn run(spec: &ProblemSpec, progress: &(dyn Fn(usize, usize) + Sync), steiner: bool) -> Result<Solution> {
    let started = Instant::now();
    let ball = &spec.ball;
    let cf = spec.cf;
    // Deduplicate terminals, remembering the first input index of each point.
    let mut unique: Vec<Point> = Vec::new();
    let mut rep: Vec<usize> = Vec::new();
    let mut map: Vec<usize> = Vec::with_capacity(spec.terminals.len());
    for (i, p) in spec.terminals.iter().enumerate() {
        match unique.iter().position(|q| q == p) {
            Some(u) => map.push(u),
            None => {
                map.push(unique.len());
                unique.push(*p);
                rep.push(i);
            }
        }
    }
    let n = unique.len();
    let mut stats = SolveStats::default();

    let tree = build_mst(ball, &unique)?;
    let base_cost = evaluate_cost(cf, &tree.edges.iter().map(|e| e.len).collect::<Vec<_>>())?;
    let empty = ForestTopology {
        steiner_count: 0,
        edges: Vec::new(),
    };
    let mut candidates = vec![Candidate {
        cost: base_cost,
        steiner: 0,
        key: Vec::new(),
        labels: Vec::new(),
    }];
    let mut placements: HashMap<ComponentKey, Placement> = HashMap::new();

    let (pp1, pp2) = (Pp1Table::new(&tree), Pp2Table::new(&tree));
    if steiner && n >= 2 {
        let frame = spec.frame()?;
        let bbox = working_box(&unique, spec.box_inflation)?;
        let arr = oodc_partition(ball, &frame, &unique, &bbox)?;
        let labels: Vec<Label> = candidate_region_labels(&arr.regions).into_iter().map(|(l, _)| l).collect();
        stats.regions = arr.regions.len();
        stats.labels = labels.len();

        let total_choices: f64 = (1..=spec.k).map(|kp| binomial(labels.len() + kp - 1, kp)).sum();
        if total_choices > spec.max_label_choices as f64 {
            return Err(Error::SizeCap(format!(
                "{total_choices:.0} label choices exceed the cap of {}",
                spec.max_label_choices
            )));
        }
        // Phase 1: enumerate forests, keyed canonically, remembering the first label choice.
        let mut forests: BTreeMap<Vec<ComponentKey>, Vec<Label>> = BTreeMap::new();
        let mut done = 0usize;
        let total = total_choices as usize;
        for kp in 1..=spec.k {
            let choices = multisets(labels.len(), kp);
            for chunk in choices.chunks(4096) {
                let found: Vec<(Vec<Label>, Vec<Vec<ComponentKey>>)> = chunk
                    .par_iter()
                    .map(|choice| {
                        let ls: Vec<Label> = choice.iter().map(|&i| labels[i]).collect();
                        let g = build_candidate_graph(&ls);
                        let keys = enumerate_viable_subforests(&g).iter().map(canonical_components).collect();
                        (ls, keys)
                    })
                    .collect();
                for (ls, keys) in found {
                    for k in keys {
                        forests.entry(k).or_insert_with(|| ls.clone());
                    }
                }
                done += chunk.len();
                progress(done, total);
            }
        }
        stats.label_choices = total;
        stats.forests = forests.len();

        // Phase 2: coordinate-free part of each candidate.
        let forest_list: Vec<(Vec<ComponentKey>, Vec<Label>)> = forests.into_iter().collect();
        let prepared: Vec<Result<(f64, Vec<f64>)>> = forest_list
            .par_iter()
            .map(|(key, _)| {
                let topo = forest_from_components(key);
                let deleted = fmst_deletions(&tree, &pp1, &pp2, &topo)?;
                let mut gone = vec![false; tree.edges.len()];
                deleted.iter().flatten().for_each(|&e| gone[e] = true);
                let rest: Vec<f64> = tree.edges.iter().enumerate().filter(|(e, _)| !gone[*e]).map(|(_, e)| e.len).collect();
                let fixed = evaluate_cost(cf, &rest)?;
                let lb = key.iter().fold(fixed, |acc, c| combine(cf, acc, component_lower_bound(c, &unique, ball, cf)));
                Ok((lb, rest))
            })
            .collect();
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(prepared.len());
        let mut rests: Vec<Vec<f64>> = Vec::with_capacity(prepared.len());
        for (i, r) in prepared.into_iter().enumerate() {
            let (lb, rest) = r?;
            order.push((lb, i));
            rests.push(rest);
        }
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        // Phase 3: place and evaluate in lower-bound order.
        let mut best = base_cost;
        let margin = |b: f64| 10.0 * spec.tolerances.tie * b.abs().max(1.0) + 2.0 * spec.tolerances.fixed_topology;
        let mut pos = 0;
        while pos < order.len() {
            if order[pos].0 > best + margin(best) {
                break;
            }
            let end = (pos + 256).min(order.len());
            let batch: Vec<usize> = order[pos..end]
                .iter()
                .take_while(|(lb, _)| *lb <= best + margin(best))
                .map(|&(_, i)| i)
                .collect();
            let mut need: Vec<ComponentKey> = batch
                .iter()
                .flat_map(|&i| forest_list[i].0.iter().cloned())
                .filter(|c| !placements.contains_key(c))
                .collect();
            need.sort_unstable();
            need.dedup();
            let solved: Vec<(ComponentKey, Result<Placement>)> = need
                .into_par_iter()
                .map(|c| {
                    let inst = component_instance(&c, &unique, ball);
                    let r = solve_fixed_topology(&inst, cf, spec.tolerances.fixed_topology);
                    (c, r)
                })
                .collect();
            for (c, r) in solved {
                stats.components_solved += 1;
                match r {
                    Ok(p) => {
                        placements.insert(c, p);
                    }
                    Err(Error::ToleranceNotReached(_)) => stats.warnings += 1,
                    Err(e) => return Err(e),
                }
            }
            for &i in &batch {
                let (key, ls) = &forest_list[i];
                let mut lengths = rests[i].clone();
                let mut ok = true;
                for c in key {
                    match placements.get(c) {
                        Some(p) => lengths.extend_from_slice(&p.lengths),
                        None => ok = false,
                    }
                }
                if !ok {
                    continue;
                }
                stats.forests_evaluated += 1;
                let cost = evaluate_cost(cf, &lengths)?;
                best = best.min(cost);
                candidates.push(Candidate {
                    cost,
                    steiner: key.iter().map(|c| c.steiner).sum(),
                    key: key.clone(),
                    labels: ls.clone(),
                });
            }
            pos += batch.len();
            if batch.is_empty() {
                break;
            }
        }
        stats.forests_pruned = order.len() - stats.forests_evaluated;
    }

    // Deterministic choice: minimum cost, then fewer Steiner points, then edge list.
    let cost_min = candidates.iter().map(|c| c.cost).fold(f64::INFINITY, f64::min);
    let tie = spec.tolerances.tie * cost_min.abs().max(1.0);
    let mut finalists: Vec<(usize, Vec<(NodeRef, NodeRef)>, SpanningTree, &Candidate)> = Vec::new();
    for c in candidates.iter().filter(|c| c.cost <= cost_min + tie) {
        let topo = if c.key.is_empty() { empty.clone() } else { forest_from_components(&c.key) };
        let steiner: Vec<Point> = c.key.iter().flat_map(|k| placements[k].steiner.iter().copied()).collect();
        let f = ViableForest::new(topo, steiner)?;
        let tf = fmst_update(ball, &tree, &pp1, &pp2, &f)?;
        let mut edges: Vec<(NodeRef, NodeRef)> = tf
            .edges
            .iter()
            .map(|e| {
                let r = |v: usize| if v < n { NodeRef::Terminal(v) } else { NodeRef::Steiner(v - n) };
                normalise((r(e.u), r(e.v)))
            })
            .collect();
        edges.sort_unstable();
        finalists.push((c.steiner, edges, tf, c));
    }
    finalists.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let (_, _, tf, chosen) = finalists.into_iter().next().ok_or_else(|| Error::Internal("no candidate".into()))?;

    // Map back to input indices; duplicates hang off their representative with zero-length edges.
    let to_input = |v: usize| if v < n { NodeRef::Terminal(rep[v]) } else { NodeRef::Steiner(v - n) };
    let mut edges: Vec<(NodeRef, NodeRef)> = tf.edges.iter().map(|e| (to_input(e.u), to_input(e.v))).collect();
    let mut lengths: Vec<f64> = tf.edges.iter().map(|e| e.len).collect();
    for (i, &u) in map.iter().enumerate() {
        if rep[u] != i {
            edges.push((NodeRef::Terminal(rep[u]), NodeRef::Terminal(i)));
            lengths.push(0.0);
        }
    }
    let cost = evaluate_cost(cf, &lengths)?;
    let topology = if chosen.key.is_empty() { empty } else { forest_from_components(&chosen.key) };
    stats.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(Solution {
        terminals: spec.terminals.clone(),
        steiner: tf.nodes[n..].to_vec(),
        edges,
        lengths,
        cost,
        cf,
        provenance: Provenance {
            labels: chosen.labels.clone(),
            topology,
        },
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(ts: &[usize]) -> Label {
        let mut l = [None; 6];
        for (i, t) in ts.iter().enumerate() {
            l[i] = Some(*t);
        }
        l
    }

    #[test]
    fn candidate_graph_shapes() {
        let g = build_candidate_graph(&[lab(&[0, 1, 2])]);
        assert_eq!(g.terminals, vec![0, 1, 2]);
        assert_eq!(g.edges.len(), 3);
        let g = build_candidate_graph(&[lab(&[0, 1, 2, 3, 4, 5]), lab(&[6, 7, 8, 9, 10, 11])]);
        assert_eq!(g.terminals.len(), 12);
        assert_eq!(g.edges.len(), 13);
        let g = build_candidate_graph(&[lab(&[0, 1]), lab(&[1, 2])]);
        assert_eq!(g.terminals, vec![0, 1, 2]);
    }

    #[test]
    fn single_steiner_forest_counts() {
        assert_eq!(enumerate_viable_subforests(&build_candidate_graph(&[lab(&[0, 1])])).len(), 1);
        assert!(enumerate_viable_subforests(&build_candidate_graph(&[lab(&[4])])).is_empty());
        for c in 3..=6usize {
            let ts: Vec<usize> = (0..c).collect();
            let got = enumerate_viable_subforests(&build_candidate_graph(&[lab(&ts)])).len();
            let expected: f64 = (2..=c.min(6)).map(|j| binomial(c, j)).sum();
            assert_eq!(got, expected as usize);
        }
    }

    #[test]
    fn two_single_labels_give_the_path() {
        let fs = enumerate_viable_subforests(&build_candidate_graph(&[lab(&[0]), lab(&[1])]));
        assert_eq!(fs.len(), 1);
        assert!(fs[0].edges.contains(&(NodeRef::Steiner(0), NodeRef::Steiner(1))));
        assert!(fs.iter().all(|f| f.is_viable(2)));
    }

    #[test]
    fn emitted_forests_are_viable_and_distinct() {
        let g = build_candidate_graph(&[lab(&[0, 1, 2]), lab(&[2, 3, 4])]);
        let fs = enumerate_viable_subforests(&g);
        assert!(fs.iter().all(|f| f.is_viable(5) && f.steiner_count == 2));
        let set: std::collections::HashSet<_> = fs.iter().collect();
        assert_eq!(set.len(), fs.len());
    }

    #[test]
    fn canonical_keys_ignore_steiner_numbering() {
        let a = ForestTopology {
            steiner_count: 2,
            edges: vec![
                (NodeRef::Steiner(0), NodeRef::Terminal(0)),
                (NodeRef::Steiner(0), NodeRef::Steiner(1)),
                (NodeRef::Steiner(1), NodeRef::Terminal(1)),
            ],
        };
        let b = ForestTopology {
            steiner_count: 2,
            edges: vec![
                (NodeRef::Steiner(1), NodeRef::Terminal(0)),
                (NodeRef::Steiner(1), NodeRef::Steiner(0)),
                (NodeRef::Steiner(0), NodeRef::Terminal(1)),
            ],
        };
        assert_eq!(canonical_components(&a), canonical_components(&b));
    }

    fn square() -> Vec<Point> {
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]
    }

    #[test]
    fn euclidean_square() {
        let s = solve(&ProblemSpec::new(square(), UnitBall::euclidean(), 1, CostFunction::Sum)).unwrap();
        assert!((s.cost - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        assert_eq!(s.steiner.len(), 1);
        assert_eq!(s.steiner_degree(0), 4);
        assert!((s.steiner[0] - Point::new(0.5, 0.5)).euclid() < 1e-5);
    }

    #[test]
    fn rectilinear_square_keeps_the_mst() {
        let s = solve(&ProblemSpec::new(square(), UnitBall::rectilinear(), 1, CostFunction::Sum)).unwrap();
        assert!((s.cost - 3.0).abs() < 1e-9);
        assert!(s.steiner.is_empty());
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let t = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)];
        let s = solve(&ProblemSpec::new(t, UnitBall::euclidean(), 1, CostFunction::Sum)).unwrap();
        assert!((s.cost - 3f64.sqrt()).abs() < 1e-6);
        assert!((s.steiner[0] - Point::new(0.5, h / 3.0)).euclid() < 1e-5);
    }

    #[test]
    fn bottleneck_halves_the_long_edge() {
        let t = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(-1.0, 0.0),
            Point::new(-1.0, 1.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 1.0),
        ];
        let s = solve(&ProblemSpec::new(t, UnitBall::euclidean(), 1, CostFunction::Bottleneck)).unwrap();
        assert!((s.cost - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_terminal_and_duplicates() {
        let s = solve(&ProblemSpec::new(vec![Point::new(2.0, 3.0)], UnitBall::euclidean(), 1, CostFunction::Sum)).unwrap();
        assert_eq!(s.cost, 0.0);
        assert!(s.edges.is_empty());
        let mut t = square();
        t.push(Point::new(1.0, 1.0));
        let s = solve(&ProblemSpec::new(t, UnitBall::euclidean(), 1, CostFunction::Sum)).unwrap();
        assert!((s.cost - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        assert_eq!(s.edges.len(), 4 + s.steiner.len());
        assert!(s.edges.contains(&(NodeRef::Terminal(2), NodeRef::Terminal(4))));
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(solve(&ProblemSpec::new(vec![], UnitBall::euclidean(), 1, CostFunction::Sum)).unwrap_err(), Error::EmptyTerminals);
        assert!(solve(&ProblemSpec::new(square(), UnitBall::euclidean(), 0, CostFunction::Sum)).is_err());
    }
}
