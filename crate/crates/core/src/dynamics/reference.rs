use super::plan::{HamiltonianSource, PropagationPlan};
use super::propagate::{propagate, TrajectoryRecord};
use crate::error::{Result, StaError};
use crate::invariant::FrequencyProtocol;
use crate::oscillator::{eigenstate, FockIndex, SpatialGrid, UnitSystem};

/// Plain-H₀ control run: the linear ramp ω₀ → ω_f stretched to κ·t_f,
/// starting from |n(ω₀)⟩. Large κ recovers adiabatic following.
pub fn adiabatic_reference(
    omega0: f64,
    omegaf: f64,
    t_f: f64,
    kappa: f64,
    n: FockIndex,
    grid: &SpatialGrid,
    units: &UnitSystem,
) -> Result<TrajectoryRecord> {
    if !(kappa >= 1.0) {
        return Err(StaError::invalid("kappa", format!("slowdown factor must be >= 1, got {kappa}")));
    }
    let protocol = FrequencyProtocol::linear_ramp(omega0, omegaf, t_f)?.stretched(kappa)?;
    let plan = PropagationPlan::auto(HamiltonianSource::Plain(protocol), *grid, *units)?;
    let psi0 = eigenstate(n, omega0, grid, units)?;
    propagate(&psi0, &plan)
}
