use num_complex::Complex64;

use super::scaling::ScalingFunction;
use crate::error::{Result, StaError};
use crate::oscillator::{
    quadratic_expectation, scaled_hermite_basis, FockIndex, QuadraticHamiltonian, SpatialGrid, UnitSystem, Wavefunction,
};
use crate::quadrature;

/// Tolerance on the boundary conditions that make I(0) = H₀(0) and
/// [I(t_f), H₀(t_f)] = 0.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Absolute tolerance of the Lewis-Riesenfeld phase integral.
pub const PHASE_TOLERANCE: f64 = 1e-12;

/// An engineered Lewis-Riesenfeld invariant
/// I(t) = ½(m ω₀² x̂²/b² + π̂²/m), π̂ = b p̂ − m ḃ x̂.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSpec {
    scaling: ScalingFunction,
}

impl InvariantSpec {
    /// Checks b(0) = 1 and ḃ = b̈ = 0 at both ends.
    pub fn new(scaling: ScalingFunction) -> Result<Self> {
        let t_f = scaling.t_f();
        let start = scaling.eval(0.0);
        let end = scaling.eval(t_f);
        let scale = 1.0 + end.b.abs();
        let checks = [
            ("b(0)", start.b - 1.0, 1.0),
            ("b'(0)", start.b_dot * t_f, scale),
            ("b''(0)", start.b_ddot * t_f * t_f, scale),
            ("b'(t_f)", end.b_dot * t_f, scale),
            ("b''(t_f)", end.b_ddot * t_f * t_f, scale),
        ];
        for (name, residual, s) in checks {
            if residual.abs() > BOUNDARY_TOLERANCE * s {
                return Err(StaError::invalid("scaling", format!("{name} violates the boundary conditions (residual {residual:.3e})")));
            }
        }
        Ok(InvariantSpec { scaling })
    }

    pub fn scaling(&self) -> &ScalingFunction {
        &self.scaling
    }

    pub fn omega0(&self) -> f64 {
        self.scaling.omega0()
    }

    /// θ(t) = ∫₀ᵗ ω₀/b² dt′.
    pub fn phase_integral(&self, t: f64) -> Result<f64> {
        let w0 = self.omega0();
        quadrature::integrate(|s| w0 / self.scaling.b(s).powi(2), 0.0, t, PHASE_TOLERANCE)
    }

    /// I(t) as a quadratic form.
    pub fn hamiltonian_at(&self, t: f64, units: &UnitSystem) -> QuadraticHamiltonian {
        let v = self.scaling.eval(t);
        invariant_hamiltonian(v.b, v.b_dot, self.omega0(), units)
    }
}

/// I for given b, ḃ:
/// α = b²/2m, β = mω₀²/(2b²) + mḃ²/2, g = −bḃ/2.
pub fn invariant_hamiltonian(b: f64, b_dot: f64, omega0: f64, units: &UnitSystem) -> QuadraticHamiltonian {
    let m = units.mass;
    QuadraticHamiltonian {
        kinetic: b * b / (2.0 * m),
        potential: m * omega0 * omega0 / (2.0 * b * b) + 0.5 * m * b_dot * b_dot,
        cross: -0.5 * b * b_dot,
    }
}

/// Ψ₀(t)..Ψ_{n_max}(t): invariant eigenmodes dressed with the
/// Lewis-Riesenfeld phases, each an exact solution of the Schrödinger
/// equation for the engineered trap.
pub fn lr_basis(n_max: usize, t: f64, spec: &InvariantSpec, grid: &SpatialGrid, units: &UnitSystem) -> Result<Vec<Wavefunction>> {
    let theta = spec.phase_integral(t)?;
    let mut basis = lr_basis_unphased(n_max, t, spec, grid, units)?;
    for (n, mode) in basis.iter_mut().enumerate() {
        let phase = Complex64::from_polar(1.0, -(n as f64 + 0.5) * theta);
        *mode = Wavefunction::from_raw(*grid, mode.amplitudes().iter().map(|a| a * phase).collect());
    }
    Ok(basis)
}

/// Same modes without the dynamical phase; enough for populations.
pub(crate) fn lr_basis_unphased(
    n_max: usize,
    t: f64,
    spec: &InvariantSpec,
    grid: &SpatialGrid,
    units: &UnitSystem,
) -> Result<Vec<Wavefunction>> {
    let v = spec.scaling.eval(t);
    let w0 = spec.omega0();
    let kappa = (units.mass * w0 / units.hbar).sqrt() / v.b;
    let chirp = units.mass * v.b_dot / (2.0 * units.hbar * v.b);
    scaled_hermite_basis(n_max, kappa, grid, |x| Complex64::from_polar(1.0, chirp * x * x))
}

/// Ψₙ(t, x).
pub fn lr_mode(n: FockIndex, t: f64, spec: &InvariantSpec, grid: &SpatialGrid, units: &UnitSystem) -> Result<Wavefunction> {
    Ok(lr_basis(n.0, t, spec, grid, units)?.swap_remove(n.0))
}

/// ⟨ψ|I(t)|ψ⟩.
pub fn invariant_expectation(psi: &Wavefunction, spec: &InvariantSpec, t: f64, units: &UnitSystem) -> Result<f64> {
    quadratic_expectation(psi, &spec.hamiltonian_at(t, units), units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::design_quintic;
    use crate::oscillator::{eigenstate, inner_product, DEFAULT_N_MAX};
    use approx::assert_abs_diff_eq;

    fn setup() -> (InvariantSpec, SpatialGrid, UnitSystem) {
        let units = UnitSystem::default();
        let scaling = design_quintic(1.0, 0.1, 1.0).unwrap();
        let grid = SpatialGrid::sized_for(1.0 / scaling.max_b().powi(2), DEFAULT_N_MAX, 1024, &units).unwrap();
        (InvariantSpec::new(scaling).unwrap(), grid, units)
    }

    #[test]
    fn starts_as_oscillator_eigenstate() {
        let (spec, grid, units) = setup();
        for n in 0..5 {
            let a = lr_mode(FockIndex(n), 0.0, &spec, &grid, &units).unwrap();
            let b = eigenstate(FockIndex(n), 1.0, &grid, &units).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn ends_as_final_eigenstate() {
        let (spec, grid, units) = setup();
        for n in 0..5 {
            let a = lr_mode(FockIndex(n), 1.0, &spec, &grid, &units).unwrap();
            let b = eigenstate(FockIndex(n), 0.1, &grid, &units).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((x.norm() - y.norm()).abs() < 1e-12);
            }
            assert_abs_diff_eq!(inner_product(&b, &a).unwrap().norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthonormal_at_intermediate_times() {
        let (spec, grid, units) = setup();
        for &t in &[0.2, 0.5, 0.8] {
            let basis = lr_basis(6, t, &spec, &grid, &units).unwrap();
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let c = inner_product(a, b).unwrap();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((c.norm() - expect).abs() < 1e-10, "t={t} {i}{j} {c}");
                }
            }
        }
    }

    #[test]
    fn invariant_eigenvalues_are_time_independent() {
        let (spec, grid, units) = setup();
        for &t in &[0.0, 0.25, 0.5, 0.9, 1.0] {
            for n in 0..4 {
                let psi = lr_mode(FockIndex(n), t, &spec, &grid, &units).unwrap();
                let i = invariant_expectation(&psi, &spec, t, &units).unwrap();
                assert_abs_diff_eq!(i, n as f64 + 0.5, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn stationary_limit() {
        let units = UnitSystem::default();
        let spec = InvariantSpec::new(design_quintic(2.0, 2.0, 3.0).unwrap()).unwrap();
        let grid = SpatialGrid::sized_for(2.0, 64, 512, &units).unwrap();
        for n in 0..4 {
            let t = 1.7;
            let a = lr_mode(FockIndex(n), t, &spec, &grid, &units).unwrap();
            let b = eigenstate(FockIndex(n), 2.0, &grid, &units).unwrap();
            let phase = Complex64::from_polar(1.0, -2.0 * (n as f64 + 0.5) * t);
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((x - y * phase).norm() < 1e-13);
            }
            // with b ≡ 1, I = H₀ for any state
            let mix = Wavefunction::superpose(&[(Complex64::new(1.0, 0.0), &a), (Complex64::new(0.3, 0.2), &b)]).unwrap();
            let h0 = QuadraticHamiltonian::oscillator(4.0, &units);
            assert_abs_diff_eq!(
                invariant_expectation(&mix, &spec, t, &units).unwrap(),
                quadratic_expectation(&mix, &h0, &units).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn rejects_unmatched_boundaries() {
        let s = ScalingFunction::new([1.0, 0.1, 0.0, 0.0, 0.0, 0.0], 1.0, 1.0).unwrap();
        assert!(InvariantSpec::new(s).is_err());
    }
}
