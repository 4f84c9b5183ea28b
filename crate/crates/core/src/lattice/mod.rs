//! Lattice geometry, field containers, random streams and configuration files.

mod field;
mod geom;
pub mod io;
mod rng;

pub use field::{wrap_angle, ForceField, GaugeField, LinkField, MomentumField, SpinorField};
pub use geom::{Dir, LatticeGeom};
pub use rng::RngStream;
