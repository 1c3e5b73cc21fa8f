//! Transitionless tracking for the oscillator: the correction
//! H₁ = −(ω̇/4ω)(x̂p̂ + p̂x̂) and the squeeze operator that integrates it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StaError};
use crate::invariant::FrequencyProtocol;
use crate::oscillator::{QuadraticHamiltonian, UnitSystem, Wavefunction};
use crate::spectral::Spectral;

/// Probability allowed to fall off the grid under a finite squeeze.
pub const SQUEEZE_LOSS_TOLERANCE: f64 = 1e-10;

/// H₁ = −c(t)(x̂p̂ + p̂x̂) with c = ω̇/(4ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterdiabaticTerm {
    pub coefficient: f64,
}

impl CounterdiabaticTerm {
    pub fn hamiltonian(&self) -> QuadraticHamiltonian {
        QuadraticHamiltonian { kinetic: 0.0, potential: 0.0, cross: -self.coefficient }
    }
}

/// Real squeeze parameter r; Ŝ(r) = exp{(r/2)[â₀² − (â₀†)²]}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParameter(pub f64);

pub fn h1_term(protocol: &FrequencyProtocol, t: f64) -> Result<CounterdiabaticTerm> {
    let omega_sq = protocol.omega_sq(t);
    if omega_sq == 0.0 {
        return Err(StaError::NonPositiveFrequency { t, omega_sq });
    }
    let omega = protocol.omega(t)?;
    let omega_dot = protocol.omega_dot(t)?;
    Ok(CounterdiabaticTerm { coefficient: omega_dot / (4.0 * omega) })
}

/// r(t) = ½ ln(ω(t)/ω(0)).
pub fn squeeze_parameter(protocol: &FrequencyProtocol, t: f64) -> Result<SqueezeParameter> {
    let w = protocol.omega(t)?;
    let w0 = protocol.omega(0.0)?;
    Ok(SqueezeParameter(0.5 * (w / w0).ln()))
}

/// Which phases accompany the tracked eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseChoice {
    /// H₀ + H₁: dynamical and geometric phases kept.
    WithH0,
    /// H₁ alone: U = Σ|n(t)⟩⟨n(0)| without phase factors.
    Bare,
}

pub fn tt_hamiltonian(
    protocol: &FrequencyProtocol,
    t: f64,
    phase_choice: PhaseChoice,
    units: &UnitSystem,
) -> Result<QuadraticHamiltonian> {
    let h1 = h1_term(protocol, t)?.hamiltonian();
    Ok(match phase_choice {
        PhaseChoice::WithH0 => {
            let h0 = QuadraticHamiltonian::oscillator(protocol.omega_sq(t), units);
            QuadraticHamiltonian { cross: h1.cross, ..h0 }
        }
        PhaseChoice::Bare => h1,
    })
}

/// (Ŝψ)(x) = e^(r/2) ψ(e^r x), evaluated by band-limited interpolation.
///
/// With r = ½ ln(ω_t/ω₀) this maps |n(ω₀)⟩ onto |n(ω_t)⟩.
pub fn apply_squeeze(r: SqueezeParameter, psi: &Wavefunction) -> Result<Wavefunction> {
    let spectral = Spectral::new(psi.grid());
    apply_squeeze_with(r, psi, &spectral)
}

pub(crate) fn apply_squeeze_with(r: SqueezeParameter, psi: &Wavefunction, spectral: &Spectral) -> Result<Wavefunction> {
    let grid = psi.grid();
    let scale = r.0.exp();
    if !scale.is_finite() || scale == 0.0 {
        return Err(StaError::invalid("r", format!("squeeze parameter {} out of range", r.0)));
    }
    let norm = psi.norm_sq();
    let lost = if scale < 1.0 {
        // stretched: the tails beyond scale·x_max are pushed off the grid
        let cut = scale * grid.x_max();
        grid.points()
            .zip(psi.amplitudes())
            .filter(|(x, _)| x.abs() >= cut)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            * grid.dx()
            / norm
    } else {
        // compressed: spectral content above k_max/scale aliases
        spectral.spectral_weight_beyond(psi.amplitudes(), grid.k_max() / scale)
    };
    if lost > SQUEEZE_LOSS_TOLERANCE {
        return Err(StaError::SupportLeavesGrid { lost });
    }
    Ok(Wavefunction::from_raw(*grid, spectral.dilate(psi.amplitudes(), r.0)))
}

/// ⟨m|(x̂p̂ + p̂x̂)|n⟩ in any Fock basis, = iħ⟨m|(â†² − â²)|n⟩, truncated to
/// `dim` levels. Row-major.
pub fn squeeze_generator_matrix(dim: usize, units: &UnitSystem) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for n in 0..dim {
        if n + 2 < dim {
            // â†²|n⟩ = √((n+1)(n+2)) |n+2⟩
            m[(n + 2) * dim + n] += Complex64::new(0.0, units.hbar * (((n + 1) * (n + 2)) as f64).sqrt());
        }
        if n >= 2 {
            m[(n - 2) * dim + n] -= Complex64::new(0.0, units.hbar * ((n * (n - 1)) as f64).sqrt());
        }
    }
    m
}
