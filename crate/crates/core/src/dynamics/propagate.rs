use num_complex::Complex64;

use super::plan::{HamiltonianSource, PropagationPlan};
use crate::error::{Result, StaError};
use crate::invariant::{invariant_hamiltonian, lr_basis_unphased, solve_ermakov_forward, FrequencyProtocol, InvariantSpec};
use crate::ode::OdeOptions;
use crate::oscillator::{
    eigenbasis, inner_product, quadratic_expectation_with, QuadraticHamiltonian, UnitSystem, Wavefunction,
};
use crate::quadrature;
use crate::spectral::Spectral;

/// Norm drift that aborts a run.
pub const NORM_ABORT: f64 = 1e-6;
/// Probability allowed in the outer 5% of the grid (position or momentum)
/// at an observer time.
pub const EDGE_ABORT: f64 = 1e-8;
const EDGE_FRACTION: f64 = 0.95;

/// Observer output of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub method: &'static str,
    pub times: Vec<f64>,
    /// Pₙ(t) for n = 0..=n_max in the tracking basis: invariant modes for
    /// engineered traps, instantaneous eigenstates |n(ω(t))⟩ otherwise.
    pub populations: Vec<Vec<f64>>,
    /// |⟨ideal(t)|ψ(t)⟩|², where the ideal state carries each initial
    /// component cₙ along its tracking mode with the method's phase.
    pub fidelity: Vec<f64>,
    /// ⟨ideal(t)|ψ(t)⟩.
    pub ideal_overlap: Vec<Complex64>,
    /// ⟨I(t)⟩ for the method's invariant.
    pub invariant: Vec<f64>,
    /// ⟨H(t)⟩ of the applied Hamiltonian.
    pub energy: Vec<f64>,
    pub norm: Vec<f64>,
    pub final_state: Wavefunction,
    pub n_steps: usize,
    pub warnings: Vec<String>,
}

impl TrajectoryRecord {
    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().expect("records hold at least two rows")
    }

    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity.last().expect("records hold at least two rows")
    }

    /// max over t and n of |Pₙ(t) − Pₙ(0)|, ignoring rows that could not
    /// be evaluated.
    pub fn max_population_deviation(&self) -> f64 {
        let first = &self.populations[0];
        self.populations
            .iter()
            .flat_map(|row| row.iter().zip(first).map(|(p, p0)| (p - p0).abs()))
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// |⟨target|ψ⟩|².
pub fn fidelity(psi: &Wavefunction, target: &Wavefunction) -> Result<f64> {
    Ok(inner_product(target, psi)?.norm_sqr().min(1.0))
}

/// Tracking basis, invariant and ideal phases for one source.
enum Tracker {
    Modes(InvariantSpec),
    Instantaneous { protocol: FrequencyProtocol, dynamical_phase: bool },
}

struct Observer<'a> {
    plan: &'a PropagationPlan,
    tracker: Tracker,
    /// invariant samples for plain runs (b, ḃ) at observer steps
    plain_invariant: Option<Vec<(f64, f64)>>,
    coefficients: Vec<Complex64>,
    spectral: &'a Spectral,
    last_phase: (f64, f64),
}

impl<'a> Observer<'a> {
    fn new(plan: &'a PropagationPlan, psi0: &Wavefunction, obs_times: &[f64], spectral: &'a Spectral, warnings: &mut Vec<String>) -> Result<Self> {
        let tracker = match plan.source() {
            HamiltonianSource::InverseInvariant(spec) => Tracker::Modes(spec.clone()),
            HamiltonianSource::Plain(p) => match p.scaling().map(|s| InvariantSpec::new(s.clone())) {
                Some(Ok(spec)) => Tracker::Modes(spec),
                _ => Tracker::Instantaneous { protocol: p.clone(), dynamical_phase: true },
            },
            HamiltonianSource::Tracking(p) => Tracker::Instantaneous { protocol: p.clone(), dynamical_phase: true },
            HamiltonianSource::TrackingBare(p) => Tracker::Instantaneous { protocol: p.clone(), dynamical_phase: false },
        };
        let plain_invariant = match (&tracker, plan.source()) {
            (Tracker::Instantaneous { .. }, HamiltonianSource::Plain(p)) => {
                match solve_ermakov_forward(p, 1.0, 0.0, obs_times, &OdeOptions::default()) {
                    Ok(samples) => Some(samples.iter().map(|s| (s.b, s.b_dot)).collect()),
                    Err(e) => {
                        warnings.push(format!("invariant unavailable: {e}"));
                        None
                    }
                }
            }
            _ => None,
        };
        let mut obs = Observer { plan, tracker, plain_invariant, coefficients: Vec::new(), spectral, last_phase: (0.0, 0.0) };
        let basis = obs.basis(0.0)?.ok_or(StaError::NonPositiveFrequency { t: 0.0, omega_sq: plan.protocol().omega_sq(0.0) })?;
        obs.coefficients = basis.iter().map(|b| inner_product(b, psi0)).collect::<Result<_>>()?;
        Ok(obs)
    }

    fn basis(&self, t: f64) -> Result<Option<Vec<Wavefunction>>> {
        let plan = self.plan;
        match &self.tracker {
            Tracker::Modes(spec) => lr_basis_unphased(plan.n_max(), t, spec, plan.grid(), plan.units()).map(Some),
            Tracker::Instantaneous { protocol, .. } => {
                let w2 = protocol.omega_sq(t);
                if w2 <= 0.0 {
                    return Ok(None);
                }
                eigenbasis(plan.n_max(), w2.sqrt(), plan.grid(), plan.units()).map(Some)
            }
        }
    }

    /// Θ(t) with ideal component phases e^{−i(n+½)Θ}.
    fn phase(&mut self, t: f64) -> Result<f64> {
        match &self.tracker {
            Tracker::Modes(spec) => spec.phase_integral(t),
            Tracker::Instantaneous { dynamical_phase: false, .. } => Ok(0.0),
            Tracker::Instantaneous { protocol, dynamical_phase: true } => {
                let (t0, acc) = self.last_phase;
                let piece = quadrature::integrate(|s| protocol.omega_sq(s).max(0.0).sqrt(), t0, t, 1e-12)?;
                self.last_phase = (t, acc + piece);
                Ok(acc + piece)
            }
        }
    }

    fn invariant(&self, t: f64, k: usize, psi: &Wavefunction) -> Result<f64> {
        let units = self.plan.units();
        let h = match &self.tracker {
            Tracker::Modes(spec) => spec.hamiltonian_at(t, units),
            Tracker::Instantaneous { protocol, .. } => {
                if let Some(samples) = &self.plain_invariant {
                    let (b, b_dot) = samples[k];
                    invariant_hamiltonian(b, b_dot, protocol.omega0(), units)
                } else if matches!(self.plan.source(), HamiltonianSource::Plain(_)) {
                    return Ok(f64::NAN);
                } else {
                    // tracking: Σ ħω₀(n+½)|n(t)⟩⟨n(t)| = (ω₀/ω) H₀(t)
                    let w = protocol.omega(t)?;
                    let w0 = protocol.omega0();
                    tracking_invariant(w0, w, units)
                }
            }
        };
        quadratic_expectation_with(psi, &h, self.spectral, units)
    }
}

fn tracking_invariant(omega0: f64, omega: f64, units: &UnitSystem) -> QuadraticHamiltonian {
    QuadraticHamiltonian {
        kinetic: omega0 / (2.0 * units.mass * omega),
        potential: 0.5 * units.mass * omega0 * omega,
        cross: 0.0,
    }
}

struct Workspace<'a> {
    spectral: &'a Spectral,
    x_sq: Vec<f64>,
    hbar: f64,
}

impl Workspace<'_> {
    fn potential(&self, psi: &mut [Complex64], beta: f64, tau: f64) {
        if beta == 0.0 {
            return;
        }
        let c = -beta * tau / self.hbar;
        for (a, &x2) in psi.iter_mut().zip(&self.x_sq) {
            *a *= Complex64::from_polar(1.0, c * x2);
        }
    }

    fn kinetic(&self, psi: &mut [Complex64], alpha: f64, tau: f64) {
        if alpha == 0.0 {
            return;
        }
        let c = -alpha * self.hbar * tau;
        self.spectral.apply_fourier_multiplier(psi, |k| Complex64::from_polar(1.0, c * k * k));
    }

    /// exp{−i g τ (x̂p̂ + p̂x̂)/ħ} is the dilation by λ = −2gτ.
    fn dilation(&self, psi: &mut [Complex64], g: f64, tau: f64) {
        if g == 0.0 {
            return;
        }
        self.spectral.dilate_by_shears(psi, -2.0 * g * tau);
    }
}

/// Second-order Strang splitting: half potential, half dilation, full
/// kinetic, half dilation, half potential, with coefficients frozen at the
/// step midpoint.
pub fn propagate(psi0: &Wavefunction, plan: &PropagationPlan) -> Result<TrajectoryRecord> {
    if psi0.grid() != plan.grid() {
        return Err(StaError::GridMismatch);
    }
    let norm0 = psi0.norm_sq();
    if (norm0 - 1.0).abs() > crate::oscillator::NORM_TOLERANCE {
        return Err(StaError::NotNormalized { norm: norm0 });
    }
    let grid = *plan.grid();
    let spectral = Spectral::new(&grid);
    let ws = Workspace { spectral: &spectral, x_sq: grid.points().map(|x| x * x).collect(), hbar: plan.units().hbar };

    let n_steps = plan.n_steps();
    let dt = plan.dt();
    let obs_steps: Vec<usize> = (0..plan.observers())
        .map(|k| ((k as u128 * n_steps as u128) / (plan.observers() as u128 - 1)) as usize)
        .collect();
    let obs_times: Vec<f64> = obs_steps.iter().map(|&s| s as f64 * dt).collect();

    let mut warnings = plan.grid_warnings();
    let mut observer = Observer::new(plan, psi0, &obs_times, &spectral, &mut warnings)?;
    let mut record = TrajectoryRecord {
        method: plan.source().label(),
        times: Vec::with_capacity(obs_steps.len()),
        populations: Vec::with_capacity(obs_steps.len()),
        fidelity: Vec::with_capacity(obs_steps.len()),
        ideal_overlap: Vec::with_capacity(obs_steps.len()),
        invariant: Vec::with_capacity(obs_steps.len()),
        energy: Vec::with_capacity(obs_steps.len()),
        norm: Vec::with_capacity(obs_steps.len()),
        final_state: psi0.clone(),
        n_steps,
        warnings: Vec::new(),
    };

    let mut psi: Vec<Complex64> = psi0.amplitudes().to_vec();
    let mut next_obs = 0usize;
    for step in 0..=n_steps {
        if next_obs < obs_steps.len() && obs_steps[next_obs] == step {
            let t = obs_times[next_obs];
            let state = Wavefunction::from_raw(grid, psi.clone());
            observe(&mut record, &mut observer, &state, t, next_obs, plan, &spectral)?;
            next_obs += 1;
        }
        if step == n_steps {
            record.final_state = Wavefunction::from_raw(grid, psi);
            break;
        }
        let t_mid = (step as f64 + 0.5) * dt;
        let h = plan.hamiltonian(t_mid)?;
        ws.potential(&mut psi, h.potential, 0.5 * dt);
        ws.dilation(&mut psi, h.cross, 0.5 * dt);
        ws.kinetic(&mut psi, h.kinetic, dt);
        ws.dilation(&mut psi, h.cross, 0.5 * dt);
        ws.potential(&mut psi, h.potential, 0.5 * dt);

        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dx();
        let drift = (norm - 1.0).abs();
        if !(drift <= NORM_ABORT) {
            return Err(StaError::NormDrift { step: step + 1, t: (step + 1) as f64 * dt, drift });
        }
    }
    record.warnings = warnings;
    Ok(record)
}

fn observe(
    record: &mut TrajectoryRecord,
    observer: &mut Observer<'_>,
    psi: &Wavefunction,
    t: f64,
    k: usize,
    plan: &PropagationPlan,
    spectral: &Spectral,
) -> Result<()> {
    let grid = psi.grid();
    let edge = psi.edge_probability(EDGE_FRACTION);
    let k_edge = spectral.spectral_weight_beyond(psi.amplitudes(), EDGE_FRACTION * grid.k_max());
    if edge > EDGE_ABORT || k_edge > EDGE_ABORT {
        return Err(StaError::SupportLeavesGrid { lost: edge.max(k_edge) });
    }

    let norm = psi.norm_sq();
    let n_cols = plan.n_max() + 1;
    match observer.basis(t)? {
        Some(basis) => {
            let theta = observer.phase(t)?;
            let mut overlap = Complex64::new(0.0, 0.0);
            let mut pops = Vec::with_capacity(n_cols);
            let mut ideal_norm = 0.0;
            for (n, (b, c)) in basis.iter().zip(&observer.coefficients).enumerate() {
                let amp = inner_product(b, psi)?;
                pops.push(amp.norm_sqr());
                let ideal = c * Complex64::from_polar(1.0, -(n as f64 + 0.5) * theta);
                overlap += ideal.conj() * amp;
                ideal_norm += ideal.norm_sqr();
            }
            // ideal state truncated to n ≤ n_max: renormalize
            let overlap = if ideal_norm > 0.0 { overlap / ideal_norm.sqrt() } else { overlap };
            record.populations.push(pops);
            record.fidelity.push(overlap.norm_sqr().min(1.0));
            record.ideal_overlap.push(overlap);
        }
        None => {
            record.populations.push(vec![f64::NAN; n_cols]);
            record.fidelity.push(f64::NAN);
            record.ideal_overlap.push(Complex64::new(f64::NAN, f64::NAN));
        }
    }
    // expectations assume unit norm; drift is tracked separately
    let unit = Wavefunction::from_raw(*grid, psi.amplitudes().iter().map(|a| a / norm.sqrt()).collect());
    record.invariant.push(observer.invariant(t, k, &unit)?);
    let h = plan.hamiltonian(t)?;
    record.energy.push(quadratic_expectation_with(&unit, &h, spectral, plan.units())?);
    record.norm.push(norm);
    record.times.push(t);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::grid_for;
    use crate::invariant::design_quintic;
    use crate::oscillator::{eigenstate, FockIndex, SpatialGrid};

    fn units() -> UnitSystem {
        UnitSystem::default()
    }

    #[test]
    fn stationary_state_only_picks_up_its_phase() {
        let protocol = FrequencyProtocol::constant(1.0, 2.0).unwrap();
        let source = HamiltonianSource::Plain(protocol);
        let grid = grid_for(&source, 8, 256, &units()).unwrap();
        let plan = PropagationPlan::new(source, grid, units(), 8000, 11).unwrap().with_n_max(4);
        let psi0 = eigenstate(FockIndex(2), 1.0, &grid, &units()).unwrap();
        let rec = propagate(&psi0, &plan).unwrap();
        // ideal state: e^{-i 5/2 t}|2>
        for (f, z) in rec.fidelity.iter().zip(&rec.ideal_overlap) {
            assert!((1.0 - f).abs() < 1e-10);
            assert!(z.arg().abs() < 1e-7, "phase error {}", z.arg());
        }
        assert!(rec.max_population_deviation() < 1e-10);
        assert!(rec.max_norm_drift() < 1e-10, "{}", rec.max_norm_drift());
        for (e, i) in rec.energy.iter().zip(&rec.invariant) {
            assert!((e - 2.5).abs() < 1e-9);
            assert!((i - 2.5).abs() < 1e-9);
        }
    }

    #[test]
    fn bare_counterdiabatic_term_squeezes_onto_final_eigenstate() {
        let protocol = FrequencyProtocol::linear_ramp(1.0, 0.25, 1.0).unwrap();
        let source = HamiltonianSource::TrackingBare(protocol);
        let grid = grid_for(&source, 8, 512, &units()).unwrap();
        let plan = PropagationPlan::auto(source, grid, units()).unwrap().with_n_max(6);
        for n in [0, 1, 3] {
            let psi0 = eigenstate(FockIndex(n), 1.0, &grid, &units()).unwrap();
            let rec = propagate(&psi0, &plan).unwrap();
            let target = eigenstate(FockIndex(n), 0.25, &grid, &units()).unwrap();
            let f = fidelity(&rec.final_state, &target).unwrap();
            assert!(f > 1.0 - 1e-6, "n={n}: {f}");
        }
    }

    #[test]
    fn engineered_ramp_keeps_invariant_populations() {
        let spec = InvariantSpec::new(design_quintic(1.0, 0.1, 1.0).unwrap()).unwrap();
        let source = HamiltonianSource::InverseInvariant(spec);
        let grid = grid_for(&source, 8, 1024, &units()).unwrap();
        let plan = PropagationPlan::new(source, grid, units(), 4000, 21).unwrap().with_n_max(4);
        let psi0 = eigenstate(FockIndex(1), 1.0, &grid, &units()).unwrap();
        let rec = propagate(&psi0, &plan).unwrap();
        assert!(rec.final_populations()[1] > 0.9999);
        assert!(rec.final_fidelity() > 0.9999);
        for i in &rec.invariant {
            assert!((i - 1.5).abs() < 1e-6, "{i}");
        }
    }

    #[test]
    fn rejects_foreign_grid_and_unnormalized_input() {
        let protocol = FrequencyProtocol::constant(1.0, 1.0).unwrap();
        let source = HamiltonianSource::Plain(protocol);
        let grid = grid_for(&source, 8, 256, &units()).unwrap();
        let plan = PropagationPlan::new(source, grid, units(), 1000, 2).unwrap();
        let other = SpatialGrid::new(grid.x_max() * 1.1, 256).unwrap();
        let psi = eigenstate(FockIndex(0), 1.0, &other, &units()).unwrap();
        assert_eq!(propagate(&psi, &plan).unwrap_err(), StaError::GridMismatch);
        let psi = eigenstate(FockIndex(0), 1.0, &grid, &units()).unwrap();
        let doubled = Wavefunction::from_raw(grid, psi.amplitudes().iter().map(|a| a * 2.0).collect());
        assert!(matches!(propagate(&doubled, &plan), Err(StaError::NotNormalized { .. })));
    }

    #[test]
    fn escaping_packet_is_reported() {
        // strongly expulsive constant trap blows the packet off the grid
        let times = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let protocol = FrequencyProtocol::tabulated(times, vec![1.0, -4.0, -4.0, -4.0, 1.0]).unwrap();
        let source = HamiltonianSource::Plain(protocol);
        let grid = SpatialGrid::new(12.0, 256).unwrap();
        let plan = PropagationPlan::new(source, grid, units(), 4000, 50).unwrap().with_n_max(4);
        let psi0 = eigenstate(FockIndex(0), 1.0, &grid, &units()).unwrap();
        let r = propagate(&psi0, &plan);
        assert!(matches!(r, Err(StaError::SupportLeavesGrid { .. })), "{r:?}");
    }
}
