#![allow(dead_code)]

use ksteiner::generate::{random_ellipse, random_polygon_ball};
use ksteiner::mst::{ForestTopology, NodeRef};
use ksteiner::{Point, UnitBall};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_ball<R: Rng>(rng: &mut R) -> UnitBall {
    match rng.gen_range(0..5) {
        0 => UnitBall::euclidean(),
        1 => UnitBall::rectilinear(),
        2 => UnitBall::linf(),
        3 => random_polygon_ball(rng),
        _ => random_ellipse(rng),
    }
}

/// A random viable forest over `n` terminals with at most `max_components`
/// components and `max_steiner` Steiner points in total.
pub fn random_forest<R: Rng>(rng: &mut R, n: usize, max_components: usize, max_steiner: usize) -> ForestTopology {
    loop {
        let comps = rng.gen_range(1..=max_components);
        let total = rng.gen_range(comps..=max_steiner.max(comps));
        let mut sizes = vec![1usize; comps];
        for _ in comps..total {
            let c = rng.gen_range(0..comps);
            sizes[c] += 1;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        pool.shuffle(rng);
        let mut edges = Vec::new();
        let mut base = 0;
        let mut ok = true;
        for &m in &sizes {
            let mut deg = vec![0usize; m];
            for v in 1..m {
                let u = rng.gen_range(0..v);
                edges.push((NodeRef::Steiner(base + u), NodeRef::Steiner(base + v)));
                deg[u] += 1;
                deg[v] += 1;
            }
            for (j, &d) in deg.iter().enumerate() {
                let need = 2usize.saturating_sub(d);
                let extra = rng.gen_range(0..=2usize).min(6 - d - need);
                for _ in 0..need + extra {
                    match pool.pop() {
                        Some(t) => edges.push((NodeRef::Steiner(base + j), NodeRef::Terminal(t))),
                        None => ok = false,
                    }
                }
            }
            base += m;
        }
        let f = ForestTopology { steiner_count: total, edges };
        if ok && f.is_viable(n) {
            return f;
        }
    }
}

/// Kruskal over an explicit edge list; returns the total length.
pub fn kruskal(nodes: usize, mut edges: Vec<(f64, usize, usize)>) -> f64 {
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut total = 0.0;
    for (w, a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            total += w;
        }
    }
    total
}

/// MST length on `terminals ∪ {s}` when `s` may only connect to `allowed`.
pub fn restricted_mst_length(ball: &UnitBall, terminals: &[Point], s: Point, allowed: &[usize]) -> f64 {
    let n = terminals.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((ball.distance(terminals[i], terminals[j]), i, j));
        }
    }
    for &c in allowed {
        edges.push((ball.distance(s, terminals[c]), c, n));
    }
    kruskal(n + 1, edges)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}
