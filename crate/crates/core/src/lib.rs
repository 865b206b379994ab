//! Tunnelling splittings and escape rates of 1D Hamiltonians by exact
//! diagonalization, complex-time trace formulae and complex classical orbits.

pub mod error;
pub mod estimate;
pub mod potentials;
pub mod quantum;
pub mod roots;
pub mod semiclassics;
pub mod trajectories;

pub use error::{Error, Result};
pub use estimate::{Diagnostics, Method, SplittingEstimate, Warning};
pub use num_complex::Complex64;
pub use potentials::{Crossing, IslandShape, Potential1D, PotentialKind, Topology, TurningPoint, TurningPointSet};
