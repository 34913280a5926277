//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//!     cargo test --release --test acceptance

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ksteiner::generate::{random_ellipse, random_points, random_polygon_ball};
use ksteiner::io::SolutionFile;
use ksteiner::mst::{build_mst, fmst_deletions, fmst_update, ForestTopology, NodeRef, Pp1Table, Pp2Table, ViableForest};
use ksteiner::odc::{build_odc_partition, working_box};
use ksteiner::oracle::{fmst_contraction_oracle, grid_steiner_oracle, nearest_in_cone_scan, OracleConfig};
use ksteiner::overlay::oodc_partition;
use ksteiner::solver::{solve, ProblemSpec, Solution};
use ksteiner::topology::CostFunction;
use ksteiner::{HexFrame, Point, UnitBall};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{loglog_slope, median, random_ball, random_forest, restricted_mst_length};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = out.pass && in_time;
    println!(
        "criterion {id:>2} {:<28} {}  {} [{:.1} s, limit {} s]",
        name,
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn file_without_timing(sol: &Solution, ball: &UnitBall) -> String {
    let mut f = SolutionFile::from_solution(sol, ball);
    f.stats.wall_ms = 0.0;
    f.to_json()
}

fn spec(terminals: Vec<Point>, ball: UnitBall, k: usize, cf: CostFunction, threads: usize) -> ProblemSpec {
    let mut s = ProblemSpec::new(terminals, ball, k, cf);
    s.threads = Some(threads);
    s
}

fn hexagon_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for b in 0..200 {
        let ball = if b < 100 { random_polygon_ball(&mut rng) } else { random_ellipse(&mut rng) };
        let f = HexFrame::new(&ball);
        for i in 0..6 {
            worst = worst.max((ball.norm(f.points[i]) - 1.0).abs());
            worst = worst.max((ball.distance(f.points[i], f.points[(i + 1) % 6]) - 1.0).abs());
        }
    }
    check(worst <= 1e-9, format!("200 balls, max residual {worst:.1e}"))
}

fn odc_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (mut samples, mut ties, mut bad) = (0usize, 0usize, 0usize);
    for &n in &[3usize, 5, 8] {
        for _ in 0..4 {
            let ball = random_ball(&mut rng);
            let frame = HexFrame::new(&ball);
            let ts = random_points(&mut rng, n, 1.0);
            let bbox = working_box(&ts, 1.0).unwrap();
            let eps = 1e-7 * bbox.width().max(bbox.height());
            for i in 0..6 {
                let part = build_odc_partition(&ball, &frame, &ts, i, &bbox).unwrap();
                for cell in &part.cells {
                    let total = cell.area();
                    if total <= 0.0 {
                        continue;
                    }
                    for _ in 0..20 {
                        let mut r = rng.gen::<f64>() * total;
                        let frag = cell
                            .fragments
                            .iter()
                            .find(|f| {
                                r -= f.area();
                                r <= 0.0
                            })
                            .unwrap_or_else(|| cell.fragments.last().unwrap());
                        let y = frag.sample(&mut rng);
                        samples += 1;
                        if nearest_in_cone_scan(&ball, &frame, &ts, y, i) == cell.owner {
                            continue;
                        }
                        let near = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
                            .iter()
                            .any(|&(dx, dy)| nearest_in_cone_scan(&ball, &frame, &ts, y + Point::new(dx * eps, dy * eps), i) == cell.owner);
                        if near {
                            ties += 1;
                        } else {
                            bad += 1;
                        }
                    }
                }
            }
        }
    }
    check(bad == 0, format!("{samples} samples, {ties} epsilon-ties, {bad} mismatches"))
}

fn region_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut trials, mut worst, mut bad) = (0usize, 0.0f64, 0usize);
    while trials < 500 {
        let ball = random_ball(&mut rng);
        let frame = HexFrame::new(&ball);
        let n = rng.gen_range(3..=10);
        let ts = random_points(&mut rng, n, 1.0);
        let bbox = working_box(&ts, 3.0).unwrap();
        let arr = oodc_partition(&ball, &frame, &ts, &bbox).unwrap();
        for _ in 0..5 {
            let s = Point::new(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0));
            let region = arr.locate_region(s).unwrap();
            let restricted = restricted_mst_length(&ball, &ts, s, &region.terminals());
            let mut all = ts.clone();
            all.push(s);
            let full = build_mst(&ball, &all).unwrap().total_length();
            let d = (restricted - full).abs();
            worst = worst.max(d);
            if d > 1e-9 {
                bad += 1;
            }
            trials += 1;
        }
    }
    check(bad == 0, format!("{trials} trials, max difference {worst:.1e}, {bad} failures"))
}

fn region_growth(overlays: &mut Vec<(UnitBall, Vec<Point>)>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let ns = [4usize, 8, 16, 32];
    let mut means = Vec::new();
    let mut euler_ok = true;
    for &n in &ns {
        let mut total = 0.0;
        for _ in 0..10 {
            let ball = UnitBall::euclidean();
            let ts = random_points(&mut rng, n, 1.0);
            let bbox = working_box(&ts, 3.0).unwrap();
            let arr = oodc_partition(&ball, &HexFrame::new(&ball), &ts, &bbox).unwrap();
            euler_ok &= arr.euler_holds();
            total += arr.regions.len() as f64;
            overlays.push((ball, ts));
        }
        means.push(total / 10.0);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &means);
    let counts: Vec<String> = means.iter().map(|m| format!("{m:.0}")).collect();
    check(slope <= 2.3 && euler_ok, format!("mean regions {} -> exponent {slope:.2}", counts.join("/")))
}

fn fmst_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut exact, mut structural, mut corollary, mut connected) = (0usize, 0usize, 0usize, 0usize);
    let trials = 500;
    for _ in 0..trials {
        let ball = random_ball(&mut rng);
        let n = rng.gen_range(5..=15);
        let ts = random_points(&mut rng, n, 1.0);
        let topo = random_forest(&mut rng, n, 3, 4);
        let steiner = random_points(&mut rng, topo.steiner_count, 1.0);
        let f = ViableForest::new(topo.clone(), steiner).unwrap();
        let t = build_mst(&ball, &ts).unwrap();
        let (pp1, pp2) = (Pp1Table::new(&t), Pp2Table::new(&t));
        let tf = fmst_update(&ball, &t, &pp1, &pp2, &f).unwrap();
        if tf.total_length() == fmst_contraction_oracle(&ball, &ts, &f) {
            exact += 1;
        }
        let idx = |r: NodeRef| match r {
            NodeRef::Terminal(i) => i,
            NodeRef::Steiner(j) => n + j,
        };
        let edge_set: BTreeSet<(usize, usize)> = tf.edges.iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
        let contains_f = topo.edges.iter().all(|&(a, b)| {
            let (u, v) = (idx(a), idx(b));
            edge_set.contains(&(u.min(v), u.max(v)))
        });
        let adjacency_kept = (0..topo.steiner_count).all(|j| {
            let in_f = topo.edges.iter().filter(|(a, b)| *a == NodeRef::Steiner(j) || *b == NodeRef::Steiner(j)).count();
            tf.degree(n + j) == in_f
        });
        if tf.is_tree() && tf.nodes.len() == n + topo.steiner_count && contains_f && adjacency_kept {
            structural += 1;
        }
        let comps = topo.components();
        let deleted = fmst_deletions(&t, &pp1, &pp2, &topo).unwrap();
        let removed: usize = deleted.iter().map(Vec::len).sum();
        let attach = topo.attachment().len();
        let ok = removed == attach - comps.len() && (comps.len() > 1 || deleted[0].len() == attach - 1);
        connected += usize::from(comps.len() == 1);
        if ok {
            corollary += 1;
        }
    }
    check(
        exact == trials && structural == trials && corollary == trials,
        format!("{trials} trials ({connected} connected): exact {exact}, structure {structural}, deletion count {corollary}"),
    )
}

fn fmst_n_independence() -> Outcome {
    let ball = UnitBall::euclidean();
    let mut medians = Vec::new();
    for &n in &[50usize, 100, 200] {
        let mut rng = ChaCha8Rng::seed_from_u64(606);
        let ts = random_points(&mut rng, n, 1.0);
        let t = build_mst(&ball, &ts).unwrap();
        let (pp1, pp2) = (Pp1Table::new(&t), Pp2Table::new(&t));
        use NodeRef::{Steiner as S, Terminal as T};
        let topo = ForestTopology {
            steiner_count: 3,
            edges: vec![(S(0), T(0)), (S(0), T(1)), (S(0), S(1)), (S(1), T(2)), (S(1), S(2)), (S(2), T(3)), (S(2), T(4))],
        };
        let f = ViableForest::new(topo, vec![ts[0], ts[2], ts[4]]).unwrap();
        let times: Vec<f64> = (0..501)
            .map(|_| {
                let s = Instant::now();
                std::hint::black_box(fmst_update(&ball, &t, &pp1, &pp2, &f).unwrap());
                s.elapsed().as_secs_f64()
            })
            .collect();
        medians.push(median(times));
    }
    let lo = medians.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = medians.iter().copied().fold(0.0, f64::max);
    let us: Vec<String> = medians.iter().map(|m| format!("{:.1}", m * 1e6)).collect();
    check(hi / lo < 3.0, format!("median us at n=50/100/200: {} (ratio {:.2})", us.join("/"), hi / lo))
}

struct SuiteCase {
    terminals: Vec<Point>,
    ball: UnitBall,
    k: usize,
    cf: CostFunction,
    cost: f64,
    file: String,
}

fn optimality_k1(cases: &mut Vec<SuiteCase>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let config = OracleConfig::default();
    let (mut total, mut bad, mut worst) = (0usize, 0usize, 0.0f64);
    for b in 0..100 {
        let ball = if b < 50 { UnitBall::euclidean() } else { UnitBall::rectilinear() };
        let n = rng.gen_range(3..=7);
        let ts = random_points(&mut rng, n, 1.0);
        for cf in [CostFunction::Sum, CostFunction::Bottleneck] {
            let sol = solve(&spec(ts.clone(), ball.clone(), 1, cf, 4)).unwrap();
            let o = grid_steiner_oracle(&ball, cf, &ts, 1, &config).unwrap();
            let rel = (sol.cost - o.cost).abs() / o.cost.max(1e-12);
            worst = worst.max(rel);
            total += 1;
            if rel > 1e-4 {
                bad += 1;
            }
            cases.push(SuiteCase {
                file: file_without_timing(&sol, &ball),
                terminals: ts.clone(),
                ball: ball.clone(),
                k: 1,
                cf,
                cost: sol.cost,
            });
        }
    }
    let h = 3f64.sqrt() / 2.0;
    let square = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
    let triangle = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)];
    let pinned = [
        (square.clone(), UnitBall::euclidean(), 2.0 * 2f64.sqrt(), 1e-6),
        (triangle, UnitBall::euclidean(), 3f64.sqrt(), 1e-6),
        (square, UnitBall::rectilinear(), 3.0, 1e-9),
    ];
    let mut pinned_ok = 0;
    for (ts, ball, want, tol) in pinned {
        let sol = solve(&spec(ts, ball, 1, CostFunction::Sum, 4)).unwrap();
        if (sol.cost - want).abs() <= tol {
            pinned_ok += 1;
        }
    }
    check(
        bad == 0 && pinned_ok == 3,
        format!("{total} runs, max relative gap {worst:.1e}, {bad} failures; pinned {pinned_ok}/3"),
    )
}

fn optimality_k2(cases: &mut Vec<SuiteCase>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let config = OracleConfig::default();
    let (mut total, mut above, mut monotone_bad, mut gain) = (0usize, 0usize, 0usize, 0.0f64);
    for _ in 0..20 {
        let ball = UnitBall::euclidean();
        let n = rng.gen_range(3..=5);
        let ts = random_points(&mut rng, n, 1.0);
        for cf in [CostFunction::Sum, CostFunction::Bottleneck] {
            let two = solve(&spec(ts.clone(), ball.clone(), 2, cf, 4)).unwrap();
            let one = solve(&spec(ts.clone(), ball.clone(), 1, cf, 4)).unwrap();
            let o = grid_steiner_oracle(&ball, cf, &ts, 2, &config).unwrap();
            total += 1;
            if two.cost > o.cost + o.error_bound {
                above += 1;
            }
            if two.cost > one.cost + 1e-9 {
                monotone_bad += 1;
            }
            gain = gain.max((one.cost - two.cost) / one.cost);
            cases.push(SuiteCase {
                file: file_without_timing(&two, &ball),
                terminals: ts.clone(),
                ball: ball.clone(),
                k: 2,
                cf,
                cost: two.cost,
            });
        }
    }
    check(
        above == 0 && monotone_bad == 0,
        format!("{total} runs: {above} above oracle, {monotone_bad} non-monotone; largest k=2 gain {:.1}%", gain * 100.0),
    )
}

fn scaling(cases: &mut Vec<SuiteCase>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let ns = [8usize, 16, 32, 64];
    let mut times = Vec::new();
    for &n in &ns {
        let mut ts_n = Vec::new();
        for _ in 0..3 {
            let ts = random_points(&mut rng, n, 1.0);
            let start = Instant::now();
            let sol = solve(&spec(ts.clone(), UnitBall::euclidean(), 1, CostFunction::Sum, 4)).unwrap();
            ts_n.push(start.elapsed().as_secs_f64());
            cases.push(SuiteCase {
                file: file_without_timing(&sol, &UnitBall::euclidean()),
                terminals: ts,
                ball: UnitBall::euclidean(),
                k: 1,
                cf: CostFunction::Sum,
                cost: sol.cost,
            });
        }
        times.push(median(ts_n));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &times);
    let ms: Vec<String> = times.iter().map(|t| format!("{:.0}", t * 1e3)).collect();
    check(slope <= 2.5, format!("median ms {} -> slope {slope:.2}", ms.join("/")))
}

fn box_robustness(cases: &[SuiteCase]) -> Outcome {
    let (mut worst, mut bad) = (0.0f64, 0usize);
    for c in cases {
        let mut s = spec(c.terminals.clone(), c.ball.clone(), c.k, c.cf, 4);
        s.box_inflation *= 2.0;
        let sol = solve(&s).unwrap();
        let d = (sol.cost - c.cost).abs();
        worst = worst.max(d);
        if d > 1e-9 {
            bad += 1;
        }
    }
    check(bad == 0, format!("{} re-solves, max change {worst:.1e}, {bad} over 1e-9", cases.len()))
}

fn determinism(cases: &[SuiteCase], overlays: &[(UnitBall, Vec<Point>)]) -> Outcome {
    let mut differ = 0usize;
    for c in cases {
        let sol = solve(&spec(c.terminals.clone(), c.ball.clone(), c.k, c.cf, 1)).unwrap();
        if file_without_timing(&sol, &c.ball) != c.file {
            differ += 1;
        }
    }
    let pools = [1usize, 4].map(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap());
    let mut overlay_differ = 0usize;
    for (ball, ts) in overlays {
        let bbox = working_box(ts, 3.0).unwrap();
        let frame = HexFrame::new(ball);
        let docs: Vec<String> = pools
            .iter()
            .map(|p| p.install(|| oodc_partition(ball, &frame, ts, &bbox).unwrap().to_json().to_string()))
            .collect();
        if docs[0] != docs[1] {
            overlay_differ += 1;
        }
    }
    check(
        differ == 0 && overlay_differ == 0,
        format!("{} solution files and {} overlays at 1 vs 4 threads: {differ} + {overlay_differ} differ", cases.len(), overlays.len()),
    )
}

fn main() {
    let started = Instant::now();
    let mut results = Vec::new();
    let mut cases = Vec::new();
    let mut overlays = Vec::new();
    let secs = Duration::from_secs;
    results.push(run(1, "hexagon frame", secs(5), hexagon_lemma));
    results.push(run(2, "ODC definitional check", secs(60), odc_consistency));
    results.push(run(3, "main region theorem", secs(60), region_theorem));
    results.push(run(4, "OODC region growth", secs(300), || region_growth(&mut overlays)));
    results.push(run(5, "F-MST exactness", secs(30), fmst_exactness));
    results.push(run(6, "F-MST n-independence", secs(120), fmst_n_independence));
    results.push(run(7, "optimality k=1", secs(600), || optimality_k1(&mut cases)));
    results.push(run(8, "optimality k=2", secs(900), || optimality_k2(&mut cases)));
    let mut scaled = Vec::new();
    results.push(run(9, "solver scaling k=1", secs(600), || scaling(&mut scaled)));
    results.push(run(10, "box robustness", secs(600), || box_robustness(&cases)));
    cases.extend(scaled);
    results.push(run(11, "determinism (1 vs 4 threads)", secs(900), || determinism(&cases, &overlays)));
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed in {:.0} s", results.len(), started.elapsed().as_secs_f64());
    if passed != results.len() {
        std::process::exit(1);
    }
}
