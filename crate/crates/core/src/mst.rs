//! Minimum spanning trees, the PP1/PP2 path tables, and the F-MST update that
//! splices a viable forest of Steiner points into an existing terminal MST.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, UnitBall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeRef {
    #[serde(rename = "t")]
    Terminal(usize),
    #[serde(rename = "s")]
    Steiner(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Terminal,
    Steiner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    pub u: usize,
    pub v: usize,
    pub len: f64,
}

impl TreeEdge {
    fn new(u: usize, v: usize, len: f64) -> Self {
        TreeEdge {
            u: u.min(v),
            v: u.max(v),
            len,
        }
    }

    /// Tie-break ordering: length, then smaller endpoint, then larger endpoint.
    pub fn key_cmp(&self, o: &TreeEdge) -> Ordering {
        self.len
            .total_cmp(&o.len)
            .then(self.u.cmp(&o.u))
            .then(self.v.cmp(&o.v))
    }
}

/// Sum of lengths in ascending order, so equal multisets give bit-identical totals.
pub fn canonical_sum(lengths: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = lengths.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().sum()
}

/// Spanning tree over terminals (indices `0..n`) and optional Steiner nodes (indices `n..`).
/// Edges are kept sorted by the tie-break ordering; an edge's index is its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    pub nodes: Vec<Point>,
    pub roles: Vec<Role>,
    pub edges: Vec<TreeEdge>,
    /// Flat adjacency: neighbours of `u` are `adj[adj_start[u]..adj_start[u + 1]]`
    /// as `(node, edge index)`.
    adj_start: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

impl SpanningTree {
    pub fn from_edges(nodes: Vec<Point>, roles: Vec<Role>, mut edges: Vec<TreeEdge>) -> Result<Self> {
        edges.sort_by(|a, b| a.key_cmp(b));
        if let Some(e) = edges.iter().find(|e| e.u >= nodes.len() || e.v >= nodes.len() || e.u == e.v) {
            return Err(Error::InvalidTopology(format!("bad edge {}-{}", e.u, e.v)));
        }
        let t = Self::assemble(nodes, roles, edges);
        if !t.is_tree() {
            return Err(Error::InvalidTopology("edges do not form a spanning tree".into()));
        }
        Ok(t)
    }

    /// Builds the adjacency for edges that are already sorted and in range.
    fn assemble(nodes: Vec<Point>, roles: Vec<Role>, edges: Vec<TreeEdge>) -> Self {
        let mut adj_start = vec![0; nodes.len() + 1];
        for e in &edges {
            adj_start[e.u + 1] += 1;
            adj_start[e.v + 1] += 1;
        }
        for i in 0..nodes.len() {
            adj_start[i + 1] += adj_start[i];
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![(0, 0); 2 * edges.len()];
        for (k, e) in edges.iter().enumerate() {
            adj[fill[e.u]] = (e.v, k);
            fill[e.u] += 1;
            adj[fill[e.v]] = (e.u, k);
            fill[e.v] += 1;
        }
        SpanningTree {
            nodes,
            roles,
            edges,
            adj_start,
            adj,
        }
    }

    /// `(neighbour, edge index)` pairs of `u`, in edge order.
    pub fn neighbours(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[self.adj_start[u]..self.adj_start[u + 1]]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn terminal_count(&self) -> usize {
        self.roles.iter().filter(|r| **r == Role::Terminal).count()
    }

    pub fn total_length(&self) -> f64 {
        canonical_sum(self.edges.iter().map(|e| e.len))
    }

    pub fn longest_edge(&self) -> f64 {
        self.edges.iter().map(|e| e.len).fold(0.0, f64::max)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbours(v).len()
    }

    pub fn is_tree(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 || self.edges.len() != n - 1 {
            return n == 0 && self.edges.is_empty();
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in self.neighbours(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    /// Edge indices on the tree path from `a` to `b`.
    pub fn path_edges(&self, a: usize, b: usize) -> Vec<usize> {
        let n = self.nodes.len();
        let mut via = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(u) = stack.pop() {
            if u == b {
                break;
            }
            for &(v, e) in self.neighbours(u) {
                if !seen[v] {
                    seen[v] = true;
                    via[v] = e;
                    stack.push(v);
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = b;
        while cur != a {
            let e = via[cur];
            out.push(e);
            let ed = self.edges[e];
            cur = if ed.u == cur { ed.v } else { ed.u };
        }
        out.reverse();
        out
    }
}

/// Minimum spanning tree by the O(n²) greedy construction, deterministic under
/// the tie-break ordering.
pub fn build_mst(ball: &UnitBall, points: &[Point]) -> Result<SpanningTree> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<TreeEdge>> = vec![None; n];
    let mut edges = Vec::with_capacity(n - 1);
    in_tree[0] = true;
    let mut last = 0;
    for _ in 1..n {
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = TreeEdge::new(last, v, ball.distance(points[last], points[v]));
            if best[v].map_or(true, |b| cand.key_cmp(&b) == Ordering::Less) {
                best[v] = Some(cand);
            }
        }
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].unwrap().key_cmp(&best[b].unwrap()))
            .expect("a vertex remains");
        in_tree[v] = true;
        edges.push(best[v].unwrap());
        last = v;
    }
    SpanningTree::from_edges(points.to_vec(), vec![Role::Terminal; n], edges)
}

fn longer(t: &SpanningTree, a: usize, b: usize) -> bool {
    // Strictly longer, or equal length and earlier in the ordering.
    let (ea, eb) = (t.edges[a], t.edges[b]);
    match ea.len.total_cmp(&eb.len) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a < b,
    }
}

/// `ℓ_T(u, v)`: the longest edge on the tree path between two terminals,
/// earlier edge in the ordering on ties.
#[derive(Debug, Clone, PartialEq)]
pub struct Pp1Table {
    n: usize,
    longest: Vec<usize>,
    edges: Vec<(usize, usize)>,
    lengths: Vec<f64>,
}

impl Pp1Table {
    pub fn new(t: &SpanningTree) -> Self {
        let n = t.len();
        let mut longest = vec![usize::MAX; n * n];
        for root in 0..n {
            let mut stack = vec![(root, usize::MAX, usize::MAX)];
            while let Some((u, parent, best)) = stack.pop() {
                longest[root * n + u] = best;
                for &(v, e) in t.neighbours(u) {
                    if v != parent {
                        let nb = if best == usize::MAX || longer(t, e, best) { e } else { best };
                        stack.push((v, u, nb));
                    }
                }
            }
        }
        Pp1Table {
            n,
            longest,
            edges: t.edges.iter().map(|e| (e.u, e.v)).collect(),
            lengths: t.edges.iter().map(|e| e.len).collect(),
        }
    }

    /// Edge index of `ℓ_T(u, v)`; `None` when `u == v`.
    pub fn longest(&self, u: usize, v: usize) -> Option<usize> {
        let e = self.longest[u * self.n + v];
        (e != usize::MAX).then_some(e)
    }

    pub fn length(&self, u: usize, v: usize) -> Option<f64> {
        self.longest(u, v).map(|e| self.lengths[e])
    }

    fn matches(&self, t: &SpanningTree) -> bool {
        self.n == t.len() && self.edges.len() == t.edges.len() && self.edges.iter().zip(&t.edges).all(|(a, e)| *a == (e.u, e.v))
    }
}

/// `H(e, y, z)`: whether tree edge `e` lies on the path between terminals `y` and `z`,
/// stored as one edge bitset per terminal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Pp2Table {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl Pp2Table {
    pub fn new(t: &SpanningTree) -> Self {
        let n = t.len();
        let words = t.edges.len().div_ceil(64).max(1);
        let mut bits = vec![0u64; n * n * words];
        for root in 0..n {
            let mut stack: Vec<(usize, usize, Vec<u64>)> = vec![(root, usize::MAX, vec![0; words])];
            while let Some((u, parent, set)) = stack.pop() {
                let off = (root * n + u) * words;
                bits[off..off + words].copy_from_slice(&set);
                for &(v, e) in t.neighbours(u) {
                    if v != parent {
                        let mut s = set.clone();
                        s[e / 64] |= 1 << (e % 64);
                        stack.push((v, u, s));
                    }
                }
            }
        }
        Pp2Table {
            n,
            words,
            bits,
            edges: t.edges.iter().map(|e| (e.u, e.v)).collect(),
        }
    }

    fn row(&self, y: usize, z: usize) -> &[u64] {
        let off = (y * self.n + z) * self.words;
        &self.bits[off..off + self.words]
    }

    pub fn on_path(&self, e: usize, y: usize, z: usize) -> bool {
        self.row(y, z)[e / 64] >> (e % 64) & 1 == 1
    }

    /// Whether the path between `y` and `z` avoids every edge in `set` (a bitset over edges).
    pub fn avoids(&self, y: usize, z: usize, set: &[u64]) -> bool {
        self.row(y, z).iter().zip(set).all(|(a, b)| a & b == 0)
    }

    pub fn path(&self, y: usize, z: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.on_path(e, y, z)).collect()
    }

    fn matches(&self, t: &SpanningTree) -> bool {
        self.n == t.len() && self.edges.len() == t.edges.len() && self.edges.iter().zip(&t.edges).all(|(a, e)| *a == (e.u, e.v))
    }
}

/// Coordinate-free forest over terminals and Steiner nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ForestTopology {
    pub steiner_count: usize,
    pub edges: Vec<(NodeRef, NodeRef)>,
}

/// One connected component `Fⁱ` with its attachment set `Aⁱ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestComponent {
    pub steiner: Vec<usize>,
    pub terminals: Vec<usize>,
    pub edges: Vec<usize>,
}

impl ForestTopology {
    fn degree(&self, node: NodeRef) -> usize {
        self.edges.iter().filter(|(a, b)| *a == node || *b == node).count()
    }

    /// Checks the viability conditions against `n_terminals` terminals.
    pub fn validate(&self, n_terminals: usize) -> Result<()> {
        let bad = |m: String| Err(Error::NonViableForest(m));
        for (a, b) in &self.edges {
            for r in [a, b] {
                match *r {
                    NodeRef::Terminal(i) if i >= n_terminals => return bad(format!("terminal {i} out of range")),
                    NodeRef::Steiner(j) if j >= self.steiner_count => return bad(format!("steiner {j} out of range")),
                    _ => {}
                }
            }
            if a == b {
                return bad("self loop".into());
            }
            if matches!((a, b), (NodeRef::Terminal(_), NodeRef::Terminal(_))) {
                return bad("terminal-terminal edge".into());
            }
        }
        for j in 0..self.steiner_count {
            let d = self.degree(NodeRef::Steiner(j));
            if !(2..=6).contains(&d) {
                return bad(format!("steiner {j} has degree {d}"));
            }
        }
        let mut terms: Vec<usize> = self.attachment();
        terms.dedup();
        for &x in &terms {
            if self.degree(NodeRef::Terminal(x)) != 1 {
                return bad(format!("terminal {x} is not a leaf"));
            }
        }
        // Acyclic: a forest has |E| = |V| − components.
        let comps = self.components();
        let v = self.steiner_count + terms.len();
        if self.edges.len() + comps.len() != v {
            return bad("forest contains a cycle".into());
        }
        Ok(())
    }

    pub fn is_viable(&self, n_terminals: usize) -> bool {
        self.validate(n_terminals).is_ok()
    }

    /// Sorted terminals touched by the forest (the attachment set `A`).
    pub fn attachment(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|(a, b)| [*a, *b])
            .filter_map(|r| match r {
                NodeRef::Terminal(i) => Some(i),
                NodeRef::Steiner(_) => None,
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Connected components, ordered by their smallest Steiner index.
    pub fn components(&self) -> Vec<ForestComponent> {
        let s = self.steiner_count;
        let mut comp = vec![usize::MAX; s];
        let mut out = Vec::new();
        for start in 0..s {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[start] = id;
            let mut stack = vec![start];
            let mut c = ForestComponent {
                steiner: vec![start],
                terminals: Vec::new(),
                edges: Vec::new(),
            };
            while let Some(u) = stack.pop() {
                for (k, (a, b)) in self.edges.iter().enumerate() {
                    let other = if *a == NodeRef::Steiner(u) {
                        *b
                    } else if *b == NodeRef::Steiner(u) {
                        *a
                    } else {
                        continue;
                    };
                    if !c.edges.contains(&k) {
                        c.edges.push(k);
                    }
                    match other {
                        NodeRef::Steiner(v) if comp[v] == usize::MAX => {
                            comp[v] = id;
                            c.steiner.push(v);
                            stack.push(v);
                        }
                        NodeRef::Terminal(x) => c.terminals.push(x),
                        _ => {}
                    }
                }
            }
            c.steiner.sort_unstable();
            c.terminals.sort_unstable();
            c.terminals.dedup();
            c.edges.sort_unstable();
            out.push(c);
        }
        out
    }
}

/// A forest topology with Steiner coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ViableForest {
    pub topology: ForestTopology,
    pub steiner: Vec<Point>,
}

impl ViableForest {
    pub fn new(topology: ForestTopology, steiner: Vec<Point>) -> Result<Self> {
        if steiner.len() != topology.steiner_count {
            return Err(Error::NonViableForest("coordinate count differs from steiner count".into()));
        }
        Ok(ViableForest { topology, steiner })
    }

    pub fn point(&self, terminals: &[Point], r: NodeRef) -> Point {
        match r {
            NodeRef::Terminal(i) => terminals[i],
            NodeRef::Steiner(j) => self.steiner[j],
        }
    }

    pub fn is_viable(&self, n_terminals: usize) -> bool {
        self.topology.is_viable(n_terminals)
    }
}

/// Edges of `T` removed by the F-MST update, one list per forest component.
/// Depends only on the tree, its tables and the forest topology.
pub fn fmst_deletions(t: &SpanningTree, pp1: &Pp1Table, pp2: &Pp2Table, f: &ForestTopology) -> Result<Vec<Vec<usize>>> {
    if !pp1.matches(t) || !pp2.matches(t) || t.roles.iter().any(|r| *r == Role::Steiner) {
        return Err(Error::TableMismatch);
    }
    f.validate(t.len())?;
    let comps = f.components();
    let words = t.edges.len().div_ceil(64).max(1);
    let mut deleted = vec![0u64; words];
    let mut out = Vec::with_capacity(comps.len());
    for (i, ci) in comps.iter().enumerate() {
        let mut li: Vec<usize> = Vec::new();
        for (a, &x) in ci.terminals.iter().enumerate() {
            for &y in &ci.terminals[a + 1..] {
                let mut nodes: Vec<Vec<usize>> = vec![vec![x], vec![y]];
                nodes.extend(comps[..i].iter().map(|c| c.terminals.clone()));
                let m = nodes.len();
                // witness[u][v] = smallest (w, w') with the T-path avoiding earlier deletions.
                let mut witness: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; m]; m];
                for u in 0..m {
                    for v in u + 1..m {
                        let found = nodes[u]
                            .iter()
                            .flat_map(|&w| nodes[v].iter().map(move |&w2| (w, w2)))
                            .find(|&(w, w2)| pp2.avoids(w, w2, &deleted));
                        witness[u][v] = found;
                        witness[v][u] = found.map(|(w, w2)| (w2, w));
                    }
                }
                // J need not be a tree: x, y and a terminal of an earlier component
                // can share one piece of T minus D, giving a triangle. The path of
                // the current tree visits every component that any J path does, so
                // it is the unique fewest-hop path.
                let mut paths = simple_paths(&witness, 0, 1);
                let hops = paths.iter().map(Vec::len).min().unwrap_or(0);
                paths.retain(|p| p.len() == hops);
                if paths.len() != 1 {
                    return Err(Error::Internal(format!(
                        "graph J has {} shortest paths between {x} and {y}",
                        paths.len()
                    )));
                }
                let path = &paths[0];
                let mut best: Option<usize> = None;
                for w in path.windows(2) {
                    let (s1, s2) = witness[w[0]][w[1]].expect("path uses existing edges");
                    let e = pp1.longest(s1, s2).ok_or(Error::TableMismatch)?;
                    if best.map_or(true, |b| longer(t, e, b)) {
                        best = Some(e);
                    }
                }
                li.push(best.ok_or_else(|| Error::Internal("empty J path".into()))?);
            }
        }
        li.sort_unstable();
        li.dedup();
        for &e in &li {
            deleted[e / 64] |= 1 << (e % 64);
        }
        out.push(li);
    }
    Ok(out)
}

/// All simple paths from `s` to `t` in the graph given by a witness matrix.
fn simple_paths(adj: &[Vec<Option<(usize, usize)>>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(adj: &[Vec<Option<(usize, usize)>>], cur: usize, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur == t {
            out.push(path.clone());
            return;
        }
        for next in 0..adj.len() {
            if adj[cur][next].is_some() && !path.contains(&next) {
                path.push(next);
                go(adj, next, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(adj, s, t, &mut vec![s], &mut out);
    out
}

/// Minimum spanning tree on `X ∪ S` that contains every edge of `f` and gives each
/// Steiner node exactly its forest neighbours.
pub fn fmst_update(ball: &UnitBall, t: &SpanningTree, pp1: &Pp1Table, pp2: &Pp2Table, f: &ViableForest) -> Result<SpanningTree> {
    let deletions = fmst_deletions(t, pp1, pp2, &f.topology)?;
    let n = t.len();
    let mut removed: Vec<usize> = deletions.into_iter().flatten().collect();
    removed.sort_unstable();
    let idx = |r: NodeRef| match r {
        NodeRef::Terminal(i) => i,
        NodeRef::Steiner(j) => n + j,
    };
    let mut added: Vec<TreeEdge> = f
        .topology
        .edges
        .iter()
        .map(|(a, b)| TreeEdge::new(idx(*a), idx(*b), ball.distance(f.point(&t.nodes, *a), f.point(&t.nodes, *b))))
        .collect();
    added.sort_by(|a, b| a.key_cmp(b));
    // Both lists are sorted, so a merge keeps the rank order without a full sort.
    let mut edges = Vec::with_capacity(t.edges.len() + added.len() - removed.len());
    let mut next_removed = removed.iter().peekable();
    let mut next_added = added.into_iter().peekable();
    for (k, e) in t.edges.iter().enumerate() {
        if next_removed.next_if_eq(&&k).is_some() {
            continue;
        }
        while let Some(a) = next_added.next_if(|a| a.key_cmp(e) == Ordering::Less) {
            edges.push(a);
        }
        edges.push(*e);
    }
    edges.extend(next_added);
    let mut nodes = Vec::with_capacity(n + f.steiner.len());
    nodes.extend_from_slice(&t.nodes);
    nodes.extend(f.steiner.iter().copied());
    let mut roles = Vec::with_capacity(n + f.steiner.len());
    roles.extend_from_slice(&t.roles);
    roles.extend(std::iter::repeat(Role::Steiner).take(f.steiner.len()));
    let out = SpanningTree::assemble(nodes, roles, edges);
    if out.edges.len() + 1 != out.nodes.len() {
        return Err(Error::Internal("F-MST result has the wrong edge count".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
        (0..n)
            .map(|_| Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
            .collect()
    }

    fn walk_max(t: &SpanningTree, a: usize, b: usize) -> Option<usize> {
        t.path_edges(a, b)
            .into_iter()
            .reduce(|best, e| if longer(t, e, best) { e } else { best })
    }

    #[test]
    fn collinear_and_square() {
        let ball = UnitBall::euclidean();
        let t = build_mst(&ball, &pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])).unwrap();
        let e: Vec<(usize, usize)> = t.edges.iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(e, vec![(0, 1), (1, 2)]);
        assert_eq!(t.total_length(), 2.0);
        let sq = build_mst(&ball, &pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        assert_eq!(sq.total_length(), 3.0);
        assert_eq!(build_mst(&ball, &[]), Err(Error::EmptyInput));
    }

    #[test]
    fn duplicates_give_zero_edges_first() {
        let ball = UnitBall::rectilinear();
        let t = build_mst(&ball, &pts(&[(1.0, 1.0), (3.0, 1.0), (1.0, 1.0)])).unwrap();
        assert_eq!(t.edges[0].len, 0.0);
        assert_eq!((t.edges[0].u, t.edges[0].v), (0, 2));
        assert_eq!(t.total_length(), 2.0);
    }

    #[test]
    fn pp1_path_example() {
        let ball = UnitBall::euclidean();
        let t = build_mst(&ball, &pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)])).unwrap();
        let pp1 = Pp1Table::new(&t);
        let e = pp1.longest(0, 2).unwrap();
        assert_eq!((t.edges[e].u, t.edges[e].v), (1, 2));
        assert_eq!(pp1.length(0, 2), Some(2.0));
        assert_eq!(pp1.longest(1, 1), None);
        let pp2 = Pp2Table::new(&t);
        let ab = t.edges.iter().position(|e| (e.u, e.v) == (0, 1)).unwrap();
        let bc = t.edges.iter().position(|e| (e.u, e.v) == (1, 2)).unwrap();
        assert!(pp2.on_path(ab, 0, 1));
        assert!(!pp2.on_path(bc, 0, 1));
        assert!(!pp2.on_path(ab, 2, 2));
    }

    #[test]
    fn star_ties_resolve_to_earliest_edge() {
        let ball = UnitBall::euclidean();
        let t = build_mst(&ball, &pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)])).unwrap();
        let pp1 = Pp1Table::new(&t);
        for a in 1..5 {
            for b in a + 1..5 {
                let path = t.path_edges(a, b);
                assert_eq!(pp1.longest(a, b), path.iter().copied().min());
            }
        }
    }

    #[test]
    fn pp1_and_pp2_match_path_walks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ball = UnitBall::linf();
        for n in [12, 20] {
            let t = build_mst(&ball, &random_points(&mut rng, n)).unwrap();
            let pp1 = Pp1Table::new(&t);
            let pp2 = Pp2Table::new(&t);
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(pp1.longest(a, b), walk_max(&t, a, b));
                    assert_eq!(pp1.longest(a, b), pp1.longest(b, a));
                    let mut path = t.path_edges(a, b);
                    path.sort_unstable();
                    assert_eq!(pp2.path(a, b), path);
                }
            }
        }
    }

    #[test]
    fn cut_property_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ball = UnitBall::euclidean();
        for n in 2..=12 {
            let p = random_points(&mut rng, n);
            let t = build_mst(&ball, &p).unwrap();
            for a in 0..n {
                for b in 0..n {
                    for e in t.path_edges(a, b) {
                        assert!(t.edges[e].len <= ball.distance(p[a], p[b]));
                    }
                }
            }
        }
    }

    fn star(s: usize, leaves: &[usize]) -> Vec<(NodeRef, NodeRef)> {
        leaves.iter().map(|&x| (NodeRef::Steiner(s), NodeRef::Terminal(x))).collect()
    }

    #[test]
    fn viability_rules() {
        let two = ForestTopology {
            steiner_count: 1,
            edges: star(0, &[0, 1]),
        };
        assert!(two.is_viable(3));
        let seven = ForestTopology {
            steiner_count: 1,
            edges: star(0, &[0, 1, 2, 3, 4, 5, 6]),
        };
        assert!(!seven.is_viable(8));
        let leaf = ForestTopology {
            steiner_count: 2,
            edges: vec![
                (NodeRef::Steiner(0), NodeRef::Terminal(0)),
                (NodeRef::Steiner(0), NodeRef::Terminal(1)),
                (NodeRef::Steiner(0), NodeRef::Steiner(1)),
            ],
        };
        assert!(!leaf.is_viable(3));
        let shared = ForestTopology {
            steiner_count: 2,
            edges: [star(0, &[0, 1]), star(1, &[1, 2])].concat(),
        };
        assert!(!shared.is_viable(3));
    }

    #[test]
    fn single_star_deletes_longest_path_edge() {
        let ball = UnitBall::euclidean();
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        let t = build_mst(&ball, &p).unwrap();
        let (pp1, pp2) = (Pp1Table::new(&t), Pp2Table::new(&t));
        let f = ViableForest::new(
            ForestTopology {
                steiner_count: 1,
                edges: star(0, &[0, 2]),
            },
            vec![Point::new(1.5, 1.0)],
        )
        .unwrap();
        let d = fmst_deletions(&t, &pp1, &pp2, &f.topology).unwrap();
        assert_eq!(d, vec![vec![pp1.longest(0, 2).unwrap()]]);
        let tf = fmst_update(&ball, &t, &pp1, &pp2, &f).unwrap();
        assert!(tf.is_tree());
        assert_eq!(tf.len(), 4);
        assert_eq!(tf.degree(3), 2);
        let expected = canonical_sum([1.0, ball.distance(p[0], Point::new(1.5, 1.0)), ball.distance(p[2], Point::new(1.5, 1.0))]);
        assert_eq!(tf.total_length(), expected);
    }

    #[test]
    fn connected_forest_deletes_attachment_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ball = UnitBall::euclidean();
        for _ in 0..20 {
            let p = random_points(&mut rng, 10);
            let t = build_mst(&ball, &p).unwrap();
            let (pp1, pp2) = (Pp1Table::new(&t), Pp2Table::new(&t));
            let mut a: Vec<usize> = (0..10).collect();
            for i in 0..4 {
                let j = rng.gen_range(i..10);
                a.swap(i, j);
            }
            let f = ForestTopology {
                steiner_count: 2,
                edges: [star(0, &a[..2]), star(1, &a[2..4]), vec![(NodeRef::Steiner(0), NodeRef::Steiner(1))]].concat(),
            };
            let d = fmst_deletions(&t, &pp1, &pp2, &f).unwrap();
            assert_eq!(d.len(), 1);
            assert_eq!(d[0].len(), 3);
        }
    }

    #[test]
    fn table_mismatch_is_reported() {
        let ball = UnitBall::euclidean();
        let t1 = build_mst(&ball, &pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)])).unwrap();
        let t2 = build_mst(&ball, &pts(&[(0.0, 0.0), (5.0, 0.0), (1.0, 0.0)])).unwrap();
        let f = ForestTopology {
            steiner_count: 1,
            edges: star(0, &[0, 2]),
        };
        let r = fmst_deletions(&t1, &Pp1Table::new(&t2), &Pp2Table::new(&t2), &f);
        assert_eq!(r, Err(Error::TableMismatch));
    }

    #[test]
    fn node_refs_serialize_as_tagged_objects() {
        assert_eq!(serde_json::to_string(&NodeRef::Terminal(3)).unwrap(), r#"{"t":3}"#);
        assert_eq!(serde_json::from_str::<NodeRef>(r#"{"s":1}"#).unwrap(), NodeRef::Steiner(1));
    }

    #[test]
    fn j_triangle_uses_the_direct_piece() {
        // x, y and a share one piece after the first component deletes y-b.
        let ball = UnitBall::euclidean();
        let terminals = pts(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (5.0, 0.0)]);
        let t = build_mst(&ball, &terminals).unwrap();
        let (pp1, pp2) = (Pp1Table::new(&t), Pp2Table::new(&t));
        use NodeRef::{Steiner as S, Terminal as T};
        let topology = ForestTopology {
            steiner_count: 2,
            edges: vec![(S(0), T(0)), (S(0), T(3)), (S(1), T(1)), (S(1), T(2))],
        };
        let f = ViableForest::new(topology, pts(&[(2.5, 1.0), (0.75, 0.5)])).unwrap();
        let tf = fmst_update(&ball, &t, &pp1, &pp2, &f).unwrap();
        assert!(tf.is_tree());
        assert_eq!(tf.total_length(), crate::oracle::fmst_contraction_oracle(&ball, &terminals, &f));
    }
}
