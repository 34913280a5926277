//! Insert a fixed Steiner forest into an existing MST using the path tables,
//! and compare against rebuilding from scratch with the forest contracted.

use ksteiner::mst::{build_mst, fmst_update, ForestTopology, NodeRef, Pp1Table, Pp2Table, ViableForest};
use ksteiner::oracle::fmst_contraction_oracle;
use ksteiner::{Point, UnitBall};
use rand::{Rng, SeedableRng};
use std::time::Instant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let ball = UnitBall::euclidean();
    let terminals: Vec<Point> = (0..200).map(|_| Point::new(rng.gen(), rng.gen())).collect();

    let t0 = Instant::now();
    let tree = build_mst(&ball, &terminals)?;
    let (pp1, pp2) = (Pp1Table::new(&tree), Pp2Table::new(&tree));
    println!("MST {:.6} plus tables in {:.1?}", tree.total_length(), t0.elapsed());

    // Two Steiner points joined to each other, each holding two terminals.
    use NodeRef::{Steiner as S, Terminal as T};
    let topology = ForestTopology {
        steiner_count: 2,
        edges: vec![(S(0), T(3)), (S(0), T(17)), (S(0), S(1)), (S(1), T(42)), (S(1), T(99))],
    };
    let steiner = vec![
        (terminals[3] + terminals[17]) * 0.5,
        (terminals[42] + terminals[99]) * 0.5,
    ];
    let forest = ViableForest::new(topology, steiner)?;

    let t1 = Instant::now();
    let updated = fmst_update(&ball, &tree, &pp1, &pp2, &forest)?;
    println!("F-fixed tree {:.12} in {:.1?}", updated.total_length(), t1.elapsed());
    println!("contracted rebuild {:.12}", fmst_contraction_oracle(&ball, &terminals, &forest));
    Ok(())
}
