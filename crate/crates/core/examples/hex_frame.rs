//! The six-point frame on a few unit balls, with the two unit-distance checks.

use ksteiner::{HexFrame, Point, UnitBall};

fn main() {
    let balls = [
        ("euclidean", UnitBall::euclidean()),
        ("rectilinear", UnitBall::rectilinear()),
        ("linf", UnitBall::linf()),
        ("ellipse 4x1", UnitBall::ellipse([[0.25, 0.0], [0.0, 1.0]]).unwrap()),
        (
            "hexagon",
            UnitBall::polygon(vec![
                Point::new(1.0, 0.0),
                Point::new(0.5, 1.0),
                Point::new(-0.5, 1.0),
                Point::new(-1.0, 0.0),
                Point::new(-0.5, -1.0),
                Point::new(0.5, -1.0),
            ])
            .unwrap(),
        ),
    ];
    for (name, ball) in balls {
        let frame = HexFrame::new(&ball);
        println!("{name}");
        for i in 0..6 {
            let y = frame.points[i];
            let next = frame.points[(i + 1) % 6];
            println!(
                "  y{i} = ({:+.6}, {:+.6})  |y| = {:.12}  |y - y{}| = {:.12}",
                y.x,
                y.y,
                ball.norm(y),
                (i + 1) % 6,
                ball.distance(y, next)
            );
        }
    }
}
