//! Place Steiner points for fixed topologies under different costs and norms.

use ksteiner::mst::NodeRef::{Steiner as S, Terminal as T};
use ksteiner::topology::{solve_fixed_topology, CostFunction, TopologyInstance};
use ksteiner::{Point, UnitBall};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = 3f64.sqrt() / 2.0;
    let star = |ball: UnitBall, terminals: Vec<Point>| TopologyInstance {
        steiner_count: 1,
        edges: (0..terminals.len()).map(|i| (S(0), T(i))).collect(),
        terminals,
        ball,
    };
    let triangle = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)];

    for (name, cf) in [
        ("sum", CostFunction::Sum),
        ("power 2", CostFunction::Power { p: 2.0 }),
        ("bottleneck", CostFunction::Bottleneck),
    ] {
        for (norm, ball) in [("euclidean", UnitBall::euclidean()), ("linf", UnitBall::linf())] {
            let p = solve_fixed_topology(&star(ball, triangle.clone()), cf, 1e-9)?;
            let s = p.steiner[0];
            println!("{name:>10} {norm:>9}: s = ({:.6}, {:.6}) cost {:.9} certified {}", s.x, s.y, p.cost, p.certified);
        }
    }

    // Two Steiner points on a 3x1 rectangle: the classical full topology.
    let rect = TopologyInstance {
        terminals: vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(3.0, 0.0), Point::new(3.0, 1.0)],
        steiner_count: 2,
        edges: vec![(S(0), T(0)), (S(0), T(1)), (S(0), S(1)), (S(1), T(2)), (S(1), T(3))],
        ball: UnitBall::euclidean(),
    };
    let p = solve_fixed_topology(&rect, CostFunction::Sum, 1e-9)?;
    println!("3x1 rectangle: cost {:.9} (3 + sqrt 3 = {:.9})", p.cost, 3.0 + 3f64.sqrt());
    Ok(())
}
