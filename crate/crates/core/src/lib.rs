//! Exact `k`-Steiner trees in normed planes.
//!
//! The solver partitions the plane into oriented Dirichlet cells (one partition
//! per cone of a hexagonal frame inscribed in the unit ball), overlays them, and
//! enumerates candidate Steiner point locations region by region. Fixed-topology
//! subproblems are solved as convex programs.

pub mod clip;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod io;
pub mod odc;
pub mod oracle;
pub mod mst;
pub mod overlay;
pub mod solver;
pub mod svg;
pub mod topology;

pub use error::{Error, Result};
pub use geometry::{BBox, HexFrame, NormSpec, Point, UnitBall};
