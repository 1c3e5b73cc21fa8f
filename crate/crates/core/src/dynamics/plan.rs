use crate::counterdiabatic::{tt_hamiltonian, PhaseChoice};
use crate::error::{Result, StaError};
use crate::invariant::{invert_ermakov, FrequencyProtocol, InvariantSpec};
use crate::oscillator::{QuadraticHamiltonian, SpatialGrid, UnitSystem, DEFAULT_N_MAX, GRID_WIDTH_FACTOR};

/// Largest dt·max(|ω|, |ω̇/4ω|) accepted by a plan.
pub const MAX_STEP_PHASE: f64 = 0.05;
pub const DEFAULT_MIN_STEPS: usize = 1000;
pub const DEFAULT_OBSERVERS: usize = 200;

/// Samples used to bound the coefficient rates over [0, t_f].
const RATE_SAMPLES: usize = 4000;

/// Which Hamiltonian drives the evolution.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSource {
    /// H₀ with the trap designed from an invariant.
    InverseInvariant(InvariantSpec),
    /// H₀ + H₁.
    Tracking(FrequencyProtocol),
    /// H₁ alone.
    TrackingBare(FrequencyProtocol),
    /// H₀ along the given schedule with no correction.
    Plain(FrequencyProtocol),
}

impl HamiltonianSource {
    pub fn label(&self) -> &'static str {
        match self {
            HamiltonianSource::InverseInvariant(_) => "ii",
            HamiltonianSource::Tracking(_) => "tt",
            HamiltonianSource::TrackingBare(_) => "tt-bare",
            HamiltonianSource::Plain(_) => "plain",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationPlan {
    source: HamiltonianSource,
    protocol: FrequencyProtocol,
    grid: SpatialGrid,
    units: UnitSystem,
    n_steps: usize,
    observers: usize,
    n_max: usize,
}

impl PropagationPlan {
    pub fn new(
        source: HamiltonianSource,
        grid: SpatialGrid,
        units: UnitSystem,
        n_steps: usize,
        observers: usize,
    ) -> Result<Self> {
        let protocol = match &source {
            HamiltonianSource::InverseInvariant(spec) => invert_ermakov(spec.scaling())?,
            HamiltonianSource::Tracking(p) | HamiltonianSource::TrackingBare(p) | HamiltonianSource::Plain(p) => p.clone(),
        };
        if n_steps == 0 {
            return Err(StaError::invalid("n_steps", "must be at least 1"));
        }
        if observers < 2 {
            return Err(StaError::invalid("observers", "need at least the initial and final record"));
        }
        let plan = PropagationPlan { source, protocol, grid, units, n_steps, observers, n_max: DEFAULT_N_MAX };
        let rate = plan.max_rate()?;
        let phase = plan.dt() * rate;
        if phase > MAX_STEP_PHASE {
            return Err(StaError::invalid(
                "n_steps",
                format!("dt*max rate = {phase:.3e} exceeds {MAX_STEP_PHASE}; need at least {} steps", plan.required_steps(rate)),
            ));
        }
        Ok(plan)
    }

    /// Step count from the resolution rule (at least [`DEFAULT_MIN_STEPS`]),
    /// with [`DEFAULT_OBSERVERS`] records.
    pub fn auto(source: HamiltonianSource, grid: SpatialGrid, units: UnitSystem) -> Result<Self> {
        let probe = PropagationPlan::new(source.clone(), grid, units, usize::MAX / 2, DEFAULT_OBSERVERS)?;
        let n_steps = probe.required_steps(probe.max_rate()?).max(DEFAULT_MIN_STEPS);
        PropagationPlan::new(source, grid, units, n_steps, DEFAULT_OBSERVERS)
    }

    /// Population cutoff for the observers.
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn source(&self) -> &HamiltonianSource {
        &self.source
    }

    pub fn protocol(&self) -> &FrequencyProtocol {
        &self.protocol
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn observers(&self) -> usize {
        self.observers
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn t_f(&self) -> f64 {
        self.protocol.t_f()
    }

    pub fn dt(&self) -> f64 {
        self.t_f() / self.n_steps as f64
    }

    /// The Hamiltonian actually applied at time t.
    pub fn hamiltonian(&self, t: f64) -> Result<QuadraticHamiltonian> {
        match &self.source {
            HamiltonianSource::InverseInvariant(_) | HamiltonianSource::Plain(_) => {
                Ok(QuadraticHamiltonian::oscillator(self.protocol.omega_sq(t), &self.units))
            }
            HamiltonianSource::Tracking(p) => tt_hamiltonian(p, t, PhaseChoice::WithH0, &self.units),
            HamiltonianSource::TrackingBare(p) => tt_hamiltonian(p, t, PhaseChoice::Bare, &self.units),
        }
    }

    /// max over [0, t_f] of |ω| (√|ω²| where expulsive) and, for tracking
    /// sources, |ω̇/4ω|.
    pub fn max_rate(&self) -> Result<f64> {
        let t_f = self.t_f();
        let tracking = matches!(self.source, HamiltonianSource::Tracking(_) | HamiltonianSource::TrackingBare(_));
        let bare = matches!(self.source, HamiltonianSource::TrackingBare(_));
        let mut rate = 0.0f64;
        for i in 0..=RATE_SAMPLES {
            let t = t_f * i as f64 / RATE_SAMPLES as f64;
            if !bare {
                rate = rate.max(self.protocol.omega_sq(t).abs().sqrt());
            }
            if tracking {
                let w = self.protocol.omega(t)?;
                rate = rate.max((self.protocol.omega_dot(t)? / (4.0 * w)).abs());
            }
        }
        Ok(rate)
    }

    fn required_steps(&self, rate: f64) -> usize {
        (self.t_f() * rate / MAX_STEP_PHASE).ceil().max(1.0) as usize
    }

    /// Grid warnings for expulsive designs: the exact state widens by b(t).
    pub(crate) fn grid_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(scaling) = self.protocol.scaling() {
            let needed = GRID_WIDTH_FACTOR
                * ((2.0 * self.n_max.max(DEFAULT_N_MAX) as f64 + 1.0) * self.units.hbar / (self.units.mass * scaling.omega0()))
                    .sqrt()
                * scaling.max_b();
            if needed > self.grid.x_max() {
                out.push(format!(
                    "grid half-width {:.4} is below max b(t) times the level width ({needed:.4}); tails may reach the boundary",
                    self.grid.x_max()
                ));
            }
        }
        out
    }
}

/// Grid sized for a source: for engineered traps the narrowest effective
/// frequency is ω₀/max b², otherwise the smallest ω along the schedule.
pub fn grid_for(source: &HamiltonianSource, n_max: usize, n_points: usize, units: &UnitSystem) -> Result<SpatialGrid> {
    SpatialGrid::sized_for(narrowest_frequency(source)?, n_max, n_points, units)
}

pub fn narrowest_frequency(source: &HamiltonianSource) -> Result<f64> {
    let protocol = match source {
        HamiltonianSource::InverseInvariant(spec) => {
            return Ok(spec.omega0() / spec.scaling().max_b().powi(2));
        }
        HamiltonianSource::Tracking(p) | HamiltonianSource::TrackingBare(p) | HamiltonianSource::Plain(p) => p,
    };
    if let Some(scaling) = protocol.scaling() {
        return Ok(scaling.omega0() / scaling.max_b().powi(2));
    }
    let mut w_min = f64::MAX;
    for i in 0..=RATE_SAMPLES {
        let t = protocol.t_f() * i as f64 / RATE_SAMPLES as f64;
        w_min = w_min.min(protocol.omega(t)?);
    }
    Ok(w_min)
}
