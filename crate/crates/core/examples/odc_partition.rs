//! One oriented partition for a small instance, plus the convex-distance
//! bisector of two terminals. Writes `odc.svg` and prints the cells.

use ksteiner::odc::{bisector, build_odc_partition, working_box, SectorShape};
use ksteiner::{svg, HexFrame, Point, UnitBall};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ball = UnitBall::euclidean();
    let frame = HexFrame::new(&ball);
    let terminals = vec![Point::new(0.0, 0.0), Point::new(2.0, 0.3), Point::new(0.8, 1.6)];
    let bbox = working_box(&terminals, 1.0)?;
    let i = 2;
    let part = build_odc_partition(&ball, &frame, &terminals, i, &bbox)?;
    for cell in &part.cells {
        println!("owner {:?}: area {:.4}, {} ring(s)", cell.owner, cell.area(), cell.rings.len());
    }
    let probe = Point::new(-1.0, -0.5);
    println!("owner at ({}, {}): {:?}", probe.x, probe.y, part.owner_at(probe));

    let sector = SectorShape::new(&ball, &frame, i);
    let b = bisector(&sector, terminals[0], terminals[1], &bbox)?;
    for line in b.polylines() {
        let pts: Vec<String> = line.iter().map(|p| format!("({:.3}, {:.3})", p.x, p.y)).collect();
        println!("bisector piece: {}", pts.join(" -> "));
    }
    std::fs::write("odc.svg", svg::partition_svg(&part))?;
    println!("wrote odc.svg");
    Ok(())
}
