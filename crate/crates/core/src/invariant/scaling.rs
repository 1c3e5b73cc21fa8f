use serde::{Deserialize, Serialize};

use crate::error::{Result, StaError};

/// Dense sampling used for positivity and extremum checks.
pub const SCALING_SAMPLES: usize = 10_000;

/// b and its first three time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingValue {
    pub b: f64,
    pub b_dot: f64,
    pub b_ddot: f64,
    pub b_dddot: f64,
}

/// Quintic scaling function b(t) = Σⱼ aⱼ sʲ with s = t/t_f.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScaling", into = "RawScaling")]
pub struct ScalingFunction {
    coefficients: [f64; 6],
    t_f: f64,
    omega0: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScaling {
    coefficients: [f64; 6],
    t_f: f64,
    omega0: f64,
}

impl TryFrom<RawScaling> for ScalingFunction {
    type Error = StaError;

    fn try_from(raw: RawScaling) -> Result<Self> {
        ScalingFunction::new(raw.coefficients, raw.t_f, raw.omega0)
    }
}

impl From<ScalingFunction> for RawScaling {
    fn from(s: ScalingFunction) -> Self {
        RawScaling { coefficients: s.coefficients, t_f: s.t_f, omega0: s.omega0 }
    }
}

impl ScalingFunction {
    /// Rejects b that is not strictly positive on a dense sample of [0, t_f].
    pub fn new(coefficients: [f64; 6], t_f: f64, omega0: f64) -> Result<Self> {
        if !(t_f.is_finite() && t_f > 0.0) {
            return Err(StaError::invalid("t_f", format!("must be positive, got {t_f}")));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(StaError::invalid("omega0", format!("must be positive, got {omega0}")));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(StaError::invalid("coefficients", "must be finite"));
        }
        let s = ScalingFunction { coefficients, t_f, omega0 };
        for i in 0..=SCALING_SAMPLES {
            let t = t_f * i as f64 / SCALING_SAMPLES as f64;
            if s.b(t) <= 0.0 {
                return Err(StaError::ScalingNotPositive { t });
            }
        }
        Ok(s)
    }

    pub fn coefficients(&self) -> &[f64; 6] {
        &self.coefficients
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn b(&self, t: f64) -> f64 {
        let s = t / self.t_f;
        self.coefficients.iter().rev().fold(0.0, |acc, &a| acc * s + a)
    }

    pub fn eval(&self, t: f64) -> ScalingValue {
        let s = t / self.t_f;
        let a = &self.coefficients;
        let inv = 1.0 / self.t_f;
        let (mut p, mut d1, mut d2, mut d3) = (0.0, 0.0, 0.0, 0.0);
        for &aj in a.iter().rev() {
            d3 = d3 * s + d2;
            d2 = d2 * s + d1;
            d1 = d1 * s + p;
            p = p * s + aj;
        }
        let v = [p, d1, 2.0 * d2, 6.0 * d3];
        ScalingValue { b: v[0], b_dot: v[1] * inv, b_ddot: v[2] * inv * inv, b_dddot: v[3] * inv * inv * inv }
    }

    /// γ = b(t_f).
    pub fn gamma(&self) -> f64 {
        self.b(self.t_f)
    }

    /// Largest b on the dense sample (grid pre-scaling for expulsive designs).
    pub fn max_b(&self) -> f64 {
        (0..=SCALING_SAMPLES)
            .map(|i| self.b(self.t_f * i as f64 / SCALING_SAMPLES as f64))
            .fold(f64::MIN, f64::max)
    }

    pub fn min_b(&self) -> f64 {
        (0..=SCALING_SAMPLES)
            .map(|i| self.b(self.t_f * i as f64 / SCALING_SAMPLES as f64))
            .fold(f64::MAX, f64::min)
    }
}

/// The quintic with b(0) = 1, b(t_f) = γ = √(ω₀/ω_f) and vanishing first
/// and second derivatives at both ends:
/// b = 1 + (γ − 1)(10s³ − 15s⁴ + 6s⁵).
pub fn design_quintic(omega0: f64, omegaf: f64, t_f: f64) -> Result<ScalingFunction> {
    for (name, v) in [("omega0", omega0), ("omegaf", omegaf), ("t_f", t_f)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(StaError::invalid(name, format!("must be positive, got {v}")));
        }
    }
    let d = (omega0 / omegaf).sqrt() - 1.0;
    ScalingFunction::new([1.0, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d], t_f, omega0)
}
