//! Read an instance file (or use a built-in one), solve it and write the
//! solution JSON and an SVG next to it.
//!
//!     cargo run --release --example solve_instance -- path/to/instance.json

use ksteiner::io::{InstanceFile, SolutionFile};
use ksteiner::solver::solve;
use ksteiner::svg;

const DEFAULT: &str = r#"{
  "terminals": [[0, 0], [4, 0.5], [2, 3], [5, 4], [1, 5], [3.2, 1.8]],
  "norm": {"type": "polygon", "vertices": [[1, 0], [0.6, 0.8], [-0.4, 0.8], [-1, 0], [-0.6, -0.8], [0.4, -0.8]]},
  "k": 2,
  "cost": {"type": "power", "p": 2}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let inst = InstanceFile::parse(&text)?;
    let spec = inst.to_spec()?;
    let sol = solve(&spec)?;
    let file = SolutionFile::from_solution(&sol, &spec.ball);
    println!(
        "cost {:.9} with {} Steiner point(s); {} regions, {} labels, {} topologies placed, {} pruned",
        sol.cost,
        sol.steiner.len(),
        sol.stats.regions,
        sol.stats.labels,
        sol.stats.forests_evaluated,
        sol.stats.forests_pruned
    );
    println!("recomputed from coordinates: {:.9}", file.recompute_cost()?);
    std::fs::write("solution.json", file.to_json())?;
    std::fs::write("solution.svg", svg::solution_svg(&sol))?;
    println!("wrote solution.json and solution.svg");
    Ok(())
}
