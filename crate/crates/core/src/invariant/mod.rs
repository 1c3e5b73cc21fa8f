//! Inverse engineering of the Lewis-Riesenfeld invariant: a quintic
//! scaling function, the trap schedule it implies through the Ermakov
//! equation, and the exact invariant modes.

mod ermakov;
mod modes;
mod protocol;
mod scaling;

pub use ermakov::{
    detect_expulsive, invert_ermakov, min_omega_sq, solve_ermakov_forward, uniform_times, ErmakovSample,
    ExpulsiveInterval, DEFAULT_EXPULSIVE_SAMPLES,
};
pub(crate) use modes::lr_basis_unphased;
pub use modes::{invariant_expectation, invariant_hamiltonian, lr_basis, lr_mode, InvariantSpec};
pub use protocol::{FrequencyProtocol, ProtocolKind, ENDPOINT_TOLERANCE};
pub use scaling::{design_quintic, ScalingFunction, ScalingValue, SCALING_SAMPLES};
