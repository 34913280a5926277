mod common;

use ksteiner::generate::random_points;
use ksteiner::io::{round12, SolutionFile};
use ksteiner::mst::{build_mst, fmst_update, NodeRef, Pp1Table, Pp2Table, ViableForest};
use ksteiner::oracle::brute_mst;
use ksteiner::solver::{solve, ProblemSpec};
use ksteiner::topology::{evaluate_cost, CostFunction};
use ksteiner::{HexFrame, Point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_ball, random_forest};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point() -> impl Strategy<Value = Point> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_symmetric_homogeneous_and_subadditive(seed in any::<u64>(), a in point(), b in point(), c in point(), t in -5.0..5.0f64) {
        let ball = random_ball(&mut rng(seed));
        prop_assert_eq!(ball.distance(a, b), ball.distance(b, a));
        let scale = 1e-12 * (1.0 + ball.norm(a) + ball.norm(b) + ball.norm(c));
        prop_assert!(ball.distance(a, c) <= ball.distance(a, b) + ball.distance(b, c) + scale);
        prop_assert!((ball.norm(a * t) - t.abs() * ball.norm(a)).abs() <= 1e-9 * (1.0 + ball.norm(a) * t.abs()));
    }

    #[test]
    fn hex_frame_has_unit_sides(seed in any::<u64>()) {
        let ball = random_ball(&mut rng(seed));
        let f = HexFrame::new(&ball);
        for i in 0..6 {
            prop_assert!((ball.norm(f.points[i]) - 1.0).abs() < 1e-9);
            prop_assert!((ball.distance(f.points[i], f.points[(i + 1) % 6]) - 1.0).abs() < 1e-9);
            prop_assert!((f.points[(i + 3) % 6] + f.points[i]).euclid() < 1e-9);
        }
    }

    #[test]
    fn mst_is_a_minimum_tree(seed in any::<u64>(), n in 1usize..=7) {
        let mut r = rng(seed);
        let ball = random_ball(&mut r);
        let pts = random_points(&mut r, n, 3.0);
        let t = build_mst(&ball, &pts).unwrap();
        prop_assert!(t.is_tree());
        prop_assert_eq!(t.edges.len(), n - 1);
        for e in &t.edges {
            prop_assert!((e.len - ball.distance(t.nodes[e.u], t.nodes[e.v])).abs() < 1e-12);
        }
        let brute = brute_mst(&ball, &pts).unwrap().total_length();
        prop_assert!((brute - t.total_length()).abs() < 1e-9);
    }

    #[test]
    fn fmst_update_keeps_the_forest(seed in any::<u64>(), n in 5usize..=14) {
        let mut r = rng(seed);
        let ball = random_ball(&mut r);
        let pts = random_points(&mut r, n, 1.0);
        let topo = random_forest(&mut r, n, 3, 4);
        let steiner = random_points(&mut r, topo.steiner_count, 1.0);
        let t = build_mst(&ball, &pts).unwrap();
        let (pp1, pp2) = (Pp1Table::new(&t), Pp2Table::new(&t));
        let f = ViableForest::new(topo.clone(), steiner).unwrap();
        let tf = fmst_update(&ball, &t, &pp1, &pp2, &f).unwrap();
        prop_assert!(tf.is_tree());
        prop_assert_eq!(tf.nodes.len(), n + topo.steiner_count);
        for j in 0..topo.steiner_count {
            let deg = topo.edges.iter().filter(|(a, b)| *a == NodeRef::Steiner(j) || *b == NodeRef::Steiner(j)).count();
            prop_assert_eq!(tf.degree(n + j), deg);
        }
    }

    #[test]
    fn symmetric_costs_ignore_edge_order(mut lengths in prop::collection::vec(0.0..10.0f64, 1..12), p in 0.2..4.0f64) {
        for cf in [CostFunction::Sum, CostFunction::Bottleneck, CostFunction::Power { p }] {
            let a = evaluate_cost(cf, &lengths).unwrap();
            lengths.reverse();
            prop_assert_eq!(a, evaluate_cost(cf, &lengths).unwrap());
        }
    }

    #[test]
    fn rounding_is_idempotent(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let r = round12(x);
        prop_assert_eq!(round12(r), r);
        prop_assert!((r - x).abs() <= 1e-11 * x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solutions_are_valid_trees_no_worse_than_the_mst(seed in any::<u64>(), n in 2usize..=6, k in 1usize..=2, bottleneck in any::<bool>()) {
        let mut r = rng(seed);
        let ball = random_ball(&mut r);
        let pts = random_points(&mut r, n, 1.0);
        let cf = if bottleneck { CostFunction::Bottleneck } else { CostFunction::Sum };
        let spec = ProblemSpec::new(pts.clone(), ball.clone(), k, cf);
        let sol = solve(&spec).unwrap();
        let mst = build_mst(&ball, &pts).unwrap();
        let base = evaluate_cost(cf, &mst.edges.iter().map(|e| e.len).collect::<Vec<_>>()).unwrap();
        prop_assert!(sol.cost <= base + 1e-12);
        prop_assert!(sol.steiner.len() <= k);
        for j in 0..sol.steiner.len() {
            let d = sol.steiner_degree(j);
            prop_assert!((2..=6).contains(&d));
        }
        let file = SolutionFile::from_solution(&sol, &ball);
        let back = SolutionFile::parse(&file.to_json()).unwrap();
        prop_assert!((back.recompute_cost().unwrap() - sol.cost).abs() <= 1e-9 * sol.cost.max(1.0));
    }
}
