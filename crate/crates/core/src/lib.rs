//! Hybrid Monte Carlo for the lattice Schwinger model: a compact U(1) gauge field in
//! two dimensions with one Wilson pseudofermion. The integrators are reversible
//! splitting schemes: leapfrog, 5-stage, force-gradient, 11-stage and nested
//! (multirate) variants.

pub mod error;
pub mod experiment;
pub mod fermion;
pub mod gauge;
pub mod hmc;
pub mod integrators;
pub mod lattice;

pub use error::{Error, Result};
