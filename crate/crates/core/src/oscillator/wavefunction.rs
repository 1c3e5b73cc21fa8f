use num_complex::Complex64;

use super::SpatialGrid;
use crate::error::{Result, StaError};

/// Tolerance on Σ|ψ|²dx − 1 accepted by constructors and observers.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Complex amplitudes sampled on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: SpatialGrid,
    amplitudes: Vec<Complex64>,
}

impl Wavefunction {
    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, &amplitudes)?;
        let norm = norm_sq(&amplitudes, grid.dx()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(StaError::NotNormalized { norm });
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Wavefunction { grid, amplitudes })
    }

    /// Wraps amplitudes that are already normalized, rejecting them otherwise.
    pub fn from_normalized(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, &amplitudes)?;
        let norm = norm_sq(&amplitudes, grid.dx());
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(StaError::NotNormalized { norm });
        }
        Ok(Wavefunction { grid, amplitudes })
    }

    /// No normalization check. Used by the propagator, which tracks drift itself.
    pub(crate) fn from_raw(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.n_points(), amplitudes.len());
        Wavefunction { grid, amplitudes }
    }

    /// Normalized linear combination Σ cᵢ ψᵢ.
    pub fn superpose(terms: &[(Complex64, &Wavefunction)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| StaError::invalid("terms", "superposition needs at least one state"))?;
        let grid = first.grid;
        let mut out = vec![Complex64::new(0.0, 0.0); grid.n_points()];
        for (c, psi) in terms {
            if psi.grid != grid {
                return Err(StaError::GridMismatch);
            }
            for (o, a) in out.iter_mut().zip(&psi.amplitudes) {
                *o += c * a;
            }
        }
        Self::normalized(grid, out)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Σ|ψᵢ|² dx.
    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amplitudes, self.grid.dx())
    }

    /// ⟨x²⟩ by direct quadrature.
    pub fn x2_expectation(&self) -> f64 {
        let dx = self.grid.dx();
        self.grid
            .points()
            .zip(&self.amplitudes)
            .map(|(x, a)| x * x * a.norm_sqr())
            .sum::<f64>()
            * dx
    }

    /// Probability carried by points with |x| ≥ `fraction`·x_max.
    pub fn edge_probability(&self, fraction: f64) -> f64 {
        let cut = fraction * self.grid.x_max();
        let dx = self.grid.dx();
        self.grid
            .points()
            .zip(&self.amplitudes)
            .filter(|(x, _)| x.abs() >= cut)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            * dx
    }
}

/// Σ conj(bra)·ket·dx.
pub fn inner_product(bra: &Wavefunction, ket: &Wavefunction) -> Result<Complex64> {
    if bra.grid != ket.grid {
        return Err(StaError::GridMismatch);
    }
    let sum: Complex64 = bra
        .amplitudes
        .iter()
        .zip(&ket.amplitudes)
        .map(|(b, k)| b.conj() * k)
        .sum();
    Ok(sum * bra.grid.dx())
}

fn norm_sq(amplitudes: &[Complex64], dx: f64) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx
}

fn check_len(grid: &SpatialGrid, amplitudes: &[Complex64]) -> Result<()> {
    if amplitudes.len() != grid.n_points() {
        return Err(StaError::invalid(
            "amplitudes",
            format!("expected {} samples, got {}", grid.n_points(), amplitudes.len()),
        ));
    }
    Ok(())
}
