//! Fast, transitionless frequency changes of a quantum harmonic oscillator.
//!
//! Two constructions are provided side by side:
//!
//! * [`counterdiabatic`]: transitionless tracking, which adds the nonlocal
//!   term H₁ = −(ω̇/4ω)(x̂p̂ + p̂x̂) to the instantaneous oscillator;
//! * [`invariant`]: inverse engineering of a Lewis-Riesenfeld invariant,
//!   which keeps the potential harmonic (possibly expulsive) and designs
//!   ω(t) through the Ermakov equation.
//!
//! [`dynamics`] propagates the Schrödinger equation for any quadratic
//! Hamiltonian so that both can be checked numerically, and [`raman`]
//! evaluates the two-photon Raman parameters of a trapped-ion realization.

pub mod counterdiabatic;
pub mod dynamics;
mod error;
pub mod invariant;
pub mod ode;
pub mod oscillator;
pub mod quadrature;
pub mod raman;
pub mod spectral;

pub use error::{Result, StaError};
pub use invariant::{FrequencyProtocol, ProtocolKind, ScalingFunction};
pub use oscillator::{FockIndex, QuadraticHamiltonian, SpatialGrid, UnitSystem, Wavefunction};
