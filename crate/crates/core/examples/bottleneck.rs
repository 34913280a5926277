//! Bottleneck cost: one extra point halves the single long link between two
//! clusters. A second point can help further when the gap is wide.

use ksteiner::solver::{solve, ProblemSpec};
use ksteiner::topology::CostFunction;
use ksteiner::{Point, UnitBall};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let terminals = vec![
        Point::new(0.0, 0.0),
        Point::new(-1.0, 0.0),
        Point::new(-1.0, 1.0),
        Point::new(3.0, 0.0),
        Point::new(4.0, 0.0),
        Point::new(4.0, 1.0),
    ];
    for k in 1..=2 {
        let sol = solve(&ProblemSpec::new(terminals.clone(), UnitBall::euclidean(), k, CostFunction::Bottleneck))?;
        let at: Vec<String> = sol.steiner.iter().map(|s| format!("({:.4}, {:.4})", s.x, s.y)).collect();
        println!("k = {k}: longest edge {:.9}, steiner {}", sol.cost, at.join(" "));
    }
    Ok(())
}
