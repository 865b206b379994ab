//! Exact quantum reference: parity-resolved spectra and trace estimators.

pub mod basis;
pub mod mathieu;
pub mod spectrum;
pub mod traces;

pub use basis::{build_hamiltonian, grid_nodes, BasisKind, BasisSpec, ParityBlocks};
pub use mathieu::{mathieu_characteristics, tridiagonal_eigenvalues, MathieuValues};
pub use spectrum::{
    converged_spectrum, diagonalize, exact_splitting, exact_splitting_at, spectrum, Level, Parity,
    SpectralDecomposition, EDGE_AMPLITUDE,
};
pub use traces::{
    default_t_grid, delta0_trace, deltan_power_trick, deltan_trace, expm1_complex, plateau, trace_u, QuasiProjector,
};
