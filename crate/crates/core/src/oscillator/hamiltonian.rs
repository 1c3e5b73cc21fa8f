use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{UnitSystem, Wavefunction, NORM_TOLERANCE};
use crate::error::{Result, StaError};
use crate::spectral::Spectral;

/// H = α p̂² + β x̂² + g (x̂p̂ + p̂x̂).
///
/// Covers the plain oscillator, the counterdiabatic Hamiltonian and the
/// Lewis-Riesenfeld invariant. β may be negative (expulsive parabola).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticHamiltonian {
    pub kinetic: f64,
    pub potential: f64,
    pub cross: f64,
}

impl QuadraticHamiltonian {
    pub fn new(kinetic: f64, potential: f64, cross: f64) -> Result<Self> {
        if !(kinetic.is_finite() && kinetic >= 0.0) {
            return Err(StaError::invalid("kinetic", format!("must be non-negative, got {kinetic}")));
        }
        if !potential.is_finite() || !cross.is_finite() {
            return Err(StaError::invalid("potential/cross", "coefficients must be finite"));
        }
        Ok(QuadraticHamiltonian { kinetic, potential, cross })
    }

    /// p̂²/2m + mω²x̂²/2, written in terms of ω² so expulsive traps are allowed.
    pub fn oscillator(omega_sq: f64, units: &UnitSystem) -> Self {
        QuadraticHamiltonian {
            kinetic: 0.5 / units.mass,
            potential: 0.5 * units.mass * omega_sq,
            cross: 0.0,
        }
    }

    pub fn zero() -> Self {
        QuadraticHamiltonian { kinetic: 0.0, potential: 0.0, cross: 0.0 }
    }

    /// Hψ evaluated with spectral derivatives.
    pub fn apply(&self, psi: &Wavefunction, spectral: &Spectral, units: &UnitSystem) -> Vec<Complex64> {
        let grid = psi.grid();
        let hbar = units.hbar;
        let amps = psi.amplitudes();
        let mut out: Vec<Complex64> = grid.points().zip(amps).map(|(x, a)| a * (self.potential * x * x)).collect();

        if self.kinetic != 0.0 {
            let mut buf = amps.to_vec();
            let alpha = self.kinetic * hbar * hbar;
            spectral.apply_fourier_multiplier(&mut buf, |k| Complex64::new(alpha * k * k, 0.0));
            out.iter_mut().zip(&buf).for_each(|(o, b)| *o += b);
        }
        if self.cross != 0.0 {
            // p = −iħ d/dx
            let p_psi = spectral.minus_i_derivative(amps);
            let x_psi: Vec<Complex64> = grid.points().zip(amps).map(|(x, a)| a * x).collect();
            let p_x_psi = spectral.minus_i_derivative(&x_psi);
            for ((o, (x, pp)), pxp) in out.iter_mut().zip(grid.points().zip(&p_psi)).zip(&p_x_psi) {
                *o += (pp * x + pxp) * (self.cross * hbar);
            }
        }
        out
    }
}

/// ⟨ψ|H|ψ⟩ for a normalized ψ.
pub fn quadratic_expectation(psi: &Wavefunction, hamiltonian: &QuadraticHamiltonian, units: &UnitSystem) -> Result<f64> {
    let spectral = Spectral::new(psi.grid());
    quadratic_expectation_with(psi, hamiltonian, &spectral, units)
}

pub(crate) fn quadratic_expectation_with(
    psi: &Wavefunction,
    hamiltonian: &QuadraticHamiltonian,
    spectral: &Spectral,
    units: &UnitSystem,
) -> Result<f64> {
    let norm = psi.norm_sq();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(StaError::NotNormalized { norm });
    }
    Ok(complex_expectation(psi, hamiltonian, spectral, units).re)
}

/// Full complex ⟨ψ|H|ψ⟩; the imaginary part is discretization residue.
pub(crate) fn complex_expectation(
    psi: &Wavefunction,
    hamiltonian: &QuadraticHamiltonian,
    spectral: &Spectral,
    units: &UnitSystem,
) -> Complex64 {
    let h_psi = hamiltonian.apply(psi, spectral, units);
    let dx = psi.grid().dx();
    psi.amplitudes().iter().zip(&h_psi).map(|(a, h)| a.conj() * h).sum::<Complex64>() * dx
}
