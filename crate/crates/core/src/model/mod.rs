//! Physical parameters, the cell grid, one-particle bases and the condensate profile.

mod basis;
mod grid;
mod params;
mod profile;

pub use basis::{hermite_function, ModeBasis, MIN_TRAP_EXTENT_LENGTHS};
pub use grid::{Boundary, CellGrid};
pub use params::PhysicalParams;
pub use profile::CondensateProfile;
