//! Overlay of the six oriented partitions: region count, Euler check, point
//! location and the candidate neighbour set of a query point.

use ksteiner::odc::working_box;
use ksteiner::overlay::{candidate_region_labels, oodc_partition};
use ksteiner::{svg, HexFrame, Point, UnitBall};
use rand::{Rng, SeedableRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let ball = UnitBall::rectilinear();
    let frame = HexFrame::new(&ball);
    let terminals: Vec<Point> = (0..8).map(|_| Point::new(rng.gen(), rng.gen())).collect();
    let bbox = working_box(&terminals, 3.0)?;
    let arr = oodc_partition(&ball, &frame, &terminals, &bbox)?;
    println!(
        "{} regions, {} vertices, {} edges, euler ok: {}",
        arr.regions.len(),
        arr.vertices.len(),
        arr.edges.len(),
        arr.euler_holds()
    );
    println!("{} distinct labels", candidate_region_labels(&arr.regions).len());

    let q = Point::new(0.5, 0.5);
    let r = arr.locate_region(q)?;
    println!("(0.5, 0.5) lies in a region with candidate neighbours {:?}", r.terminals());

    std::fs::write("oodc.svg", svg::overlay_svg(&arr, &terminals))?;
    println!("wrote oodc.svg");
    Ok(())
}
