use serde::{Deserialize, Serialize};

use super::UnitSystem;
use crate::error::{Result, StaError};

/// Population cutoff used when nothing else is requested.
pub const DEFAULT_N_MAX: usize = 64;

/// Safety factor applied to the classical turning point of the highest
/// tracked level when sizing a grid.
pub const GRID_WIDTH_FACTOR: f64 = 1.5;

/// Uniform periodic grid on [x_min, x_max) with x_min = -x_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    x_max: f64,
    n_points: usize,
}

impl SpatialGrid {
    pub fn new(x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(StaError::invalid("x_max", format!("must be positive, got {x_max}")));
        }
        if n_points < 64 || !n_points.is_power_of_two() {
            return Err(StaError::invalid(
                "n_points",
                format!("must be a power of two >= 64, got {n_points}"),
            ));
        }
        Ok(SpatialGrid { x_max, n_points })
    }

    /// Grid wide enough for the first `n_max` levels at the narrowest
    /// frequency `omega_min`: x_max = 1.5·√((2n_max+1)ħ/(m ω_min)).
    ///
    /// Cutoffs below [`DEFAULT_N_MAX`] are raised to it; for small n the
    /// turning-point rule alone leaves Gaussian tails at the boundary.
    pub fn sized_for(omega_min: f64, n_max: usize, n_points: usize, units: &UnitSystem) -> Result<Self> {
        if !(omega_min.is_finite() && omega_min > 0.0) {
            return Err(StaError::invalid("omega_min", format!("must be positive, got {omega_min}")));
        }
        let n_eff = n_max.max(DEFAULT_N_MAX) as f64;
        let x_max = GRID_WIDTH_FACTOR * ((2.0 * n_eff + 1.0) * units.hbar / (units.mass * omega_min)).sqrt();
        Self::new(x_max, n_points)
    }

    pub fn x_min(&self) -> f64 {
        -self.x_max
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min() + j as f64 * self.dx()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let dx = self.dx();
        let x0 = self.x_min();
        (0..self.n_points).map(move |j| x0 + j as f64 * dx)
    }

    /// Largest representable wavenumber, π/dx.
    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / self.dx()
    }

    pub fn dk(&self) -> f64 {
        std::f64::consts::PI / self.x_max
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = self.dk();
        (0..n)
            .map(|m| if m < n / 2 { m as f64 * dk } else { (m as f64 - n as f64) * dk })
            .collect()
    }
}
