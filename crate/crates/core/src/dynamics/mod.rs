//! Split-operator propagation of the Schrödinger equation for quadratic
//! Hamiltonians, with population, fidelity and invariant observers.

mod plan;
mod propagate;
mod reference;

pub use plan::{
    grid_for, narrowest_frequency, HamiltonianSource, PropagationPlan, DEFAULT_MIN_STEPS, DEFAULT_OBSERVERS,
    MAX_STEP_PHASE,
};
pub use propagate::{fidelity, propagate, TrajectoryRecord, EDGE_ABORT, NORM_ABORT};
pub use reference::adiabatic_reference;
