//! Plane-strain elastodynamics on a uniform grid with cell-centred velocities and
//! node-based stresses.

mod grid;
mod helmholtz;
mod material;
mod operators;

pub use grid::{AdhesiveBand, BoundarySpec, Grid2D, SegmentCondition, Side, TractionPatch};
pub use helmholtz::{helmholtz, node_fields, node_speed, NodeFields};
pub use material::{wave_speeds, Elasticity, MaterialParams};
pub use operators::{adhesive_proto_stress_rate, Elastic2d, ElasticLayout};

#[cfg(test)]
mod tests;
