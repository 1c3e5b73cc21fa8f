use num_complex::Complex64;

use super::hermite::hermite_functions_into;
use super::{inner_product, SpatialGrid, UnitSystem, Wavefunction};
use crate::error::{Result, StaError};

/// Highest Fock index the recurrence is used for.
pub const MAX_FOCK: usize = 512;

/// Largest |⟨x|n⟩| tolerated at the grid boundary.
pub const BOUNDARY_THRESHOLD: f64 = 1e-12;

/// Largest dimensionless momentum-space Hermite amplitude tolerated at the
/// Nyquist wavenumber.
pub const NYQUIST_THRESHOLD: f64 = 1e-10;

/// Fock level label n ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockIndex(pub usize);

impl From<usize> for FockIndex {
    fn from(n: usize) -> Self {
        FockIndex(n)
    }
}

/// ⟨x|n(ω)⟩ on the grid.
pub fn eigenstate(n: FockIndex, omega: f64, grid: &SpatialGrid, units: &UnitSystem) -> Result<Wavefunction> {
    let mut basis = eigenbasis(n.0, omega, grid, units)?;
    Ok(basis.swap_remove(n.0))
}

/// Eigenstates |0(ω)⟩..|n_max(ω)⟩, validated against the grid for the
/// highest level (the widest in both position and momentum).
pub fn eigenbasis(n_max: usize, omega: f64, grid: &SpatialGrid, units: &UnitSystem) -> Result<Vec<Wavefunction>> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(StaError::invalid("omega", format!("must be positive, got {omega}")));
    }
    let kappa = 1.0 / units.oscillator_length(omega);
    scaled_hermite_basis(n_max, kappa, grid, |_| Complex64::new(1.0, 0.0))
}

/// Builds κ^(1/2) hₙ(κx)·envelope(x) for n = 0..=n_max and checks grid support.
pub(crate) fn scaled_hermite_basis(
    n_max: usize,
    kappa: f64,
    grid: &SpatialGrid,
    envelope: impl Fn(f64) -> Complex64,
) -> Result<Vec<Wavefunction>> {
    if n_max > MAX_FOCK {
        return Err(StaError::FockOutOfRange { n: n_max, n_max: MAX_FOCK });
    }
    check_support(n_max, kappa, grid)?;

    let amp = kappa.sqrt();
    let mut columns = vec![Vec::with_capacity(grid.n_points()); n_max + 1];
    let mut h = vec![0.0; n_max + 1];
    for x in grid.points() {
        hermite_functions_into(kappa * x, &mut h);
        let env = envelope(x) * amp;
        for (col, &hn) in columns.iter_mut().zip(&h) {
            col.push(env * hn);
        }
    }
    Ok(columns.into_iter().map(|c| Wavefunction::from_raw(*grid, c)).collect())
}

fn check_support(n: usize, kappa: f64, grid: &SpatialGrid) -> Result<()> {
    let mut h = vec![0.0; n + 1];
    hermite_functions_into(kappa * grid.x_max(), &mut h);
    let amplitude = kappa.sqrt() * h[n].abs();
    if amplitude > BOUNDARY_THRESHOLD {
        return Err(StaError::GridTooNarrow { n, amplitude, threshold: BOUNDARY_THRESHOLD });
    }
    // In momentum space the eigenfunction is again hₙ, in units of κ.
    hermite_functions_into(grid.k_max() / kappa, &mut h);
    if h[n].abs() > NYQUIST_THRESHOLD {
        return Err(StaError::GridTooCoarse { n, omega: kappa * kappa });
    }
    Ok(())
}

/// Pₙ = |⟨n(ω)|ψ⟩|² for n = 0..=n_max.
pub fn populations(psi: &Wavefunction, omega: f64, n_max: usize, units: &UnitSystem) -> Result<Vec<f64>> {
    let basis = eigenbasis(n_max, omega, psi.grid(), units)?;
    project(psi, &basis)
}

pub(crate) fn project(psi: &Wavefunction, basis: &[Wavefunction]) -> Result<Vec<f64>> {
    basis.iter().map(|b| inner_product(b, psi).map(|c| c.norm_sqr())).collect()
}

/// ⟨k(t)|∂ₜ n(t)⟩ for the instantaneous oscillator basis.
///
/// Only k = n ± 2 couple; the diagonal vanishes for real eigenfunctions.
pub fn dt_matrix_element(k: FockIndex, n: FockIndex, omega: f64, omega_dot: f64) -> f64 {
    let rate = omega_dot / omega;
    let (k, n) = (k.0, n.0);
    if k + 2 == n {
        0.25 * ((n * (n - 1)) as f64).sqrt() * rate
    } else if k == n + 2 {
        -0.25 * (((n + 1) * (n + 2)) as f64).sqrt() * rate
    } else {
        0.0
    }
}
