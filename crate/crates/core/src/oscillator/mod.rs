//! Grids, oscillator eigenstates, overlaps and quadratic-form expectations.

mod eigen;
mod grid;
mod hamiltonian;
pub mod hermite;
mod units;
mod wavefunction;

pub use eigen::{
    dt_matrix_element, eigenbasis, eigenstate, populations, FockIndex, BOUNDARY_THRESHOLD, MAX_FOCK,
    NYQUIST_THRESHOLD,
};
pub(crate) use eigen::scaled_hermite_basis;
pub use grid::{SpatialGrid, DEFAULT_N_MAX, GRID_WIDTH_FACTOR};
pub use hamiltonian::{quadratic_expectation, QuadraticHamiltonian};
pub(crate) use hamiltonian::quadratic_expectation_with;
pub use units::UnitSystem;
pub use wavefunction::{inner_product, Wavefunction, NORM_TOLERANCE};
