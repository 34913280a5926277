//! Planar points, norms given by unit balls, and the hexagon frame.

mod ball;
mod hex;
mod point;
pub mod segment;

pub use ball::{BallShape, BoundaryHits, Facet, NormSpec, UnitBall};
pub use hex::{nearest_in_cone, Cone, HexFrame};
pub use point::{eps_at, BBox, Point, EPS};
