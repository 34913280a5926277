//! The full pipeline with a single Steiner point on the unit square and on a
//! triangle, under three norms.

use ksteiner::solver::{solve, ProblemSpec};
use ksteiner::topology::CostFunction;
use ksteiner::{Point, UnitBall};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = 3f64.sqrt() / 2.0;
    let instances = [
        ("square", vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]),
        ("triangle", vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)]),
    ];
    for (name, terminals) in instances {
        for (norm, ball) in [
            ("euclidean", UnitBall::euclidean()),
            ("rectilinear", UnitBall::rectilinear()),
            ("linf", UnitBall::linf()),
        ] {
            let sol = solve(&ProblemSpec::new(terminals.clone(), ball, 1, CostFunction::Sum))?;
            let at: Vec<String> = sol.steiner.iter().map(|s| format!("({:.4}, {:.4})", s.x, s.y)).collect();
            println!(
                "{name:>8} {norm:>11}: cost {:.9}, steiner {:?}, {} topologies placed",
                sol.cost, at, sol.stats.forests_evaluated
            );
        }
    }
    Ok(())
}
