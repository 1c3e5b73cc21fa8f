use serde::{Deserialize, Serialize};

use crate::error::{Result, StaError};

/// Action and mass scales. Everything in the numerical core is expressed in
/// these units; the default is the dimensionless choice ħ = m = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(StaError::invalid("hbar", format!("must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(StaError::invalid("mass", format!("must be positive, got {mass}")));
        }
        Ok(UnitSystem { hbar, mass })
    }

    /// Oscillator length √(ħ/mω).
    pub fn oscillator_length(&self, omega: f64) -> f64 {
        (self.hbar / (self.mass * omega)).sqrt()
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem { hbar: 1.0, mass: 1.0 }
    }
}
