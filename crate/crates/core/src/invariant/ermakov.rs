use serde::{Deserialize, Serialize};

use super::protocol::FrequencyProtocol;
use super::scaling::ScalingFunction;
use crate::error::{Result, StaError};
use crate::ode::{self, OdeOptions};

/// Trap schedule that makes `scaling` an exact solution of
/// b̈ + ω²(t) b = ω₀²/b³.
pub fn invert_ermakov(scaling: &ScalingFunction) -> Result<FrequencyProtocol> {
    FrequencyProtocol::engineered(scaling.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErmakovSample {
    pub t: f64,
    pub b: f64,
    pub b_dot: f64,
}

/// Integrates the Ermakov equation forward under `protocol`, with
/// ω₀ = protocol.omega0(), and samples b, ḃ at `times` (ascending, ≥ 0).
pub fn solve_ermakov_forward(
    protocol: &FrequencyProtocol,
    b0: f64,
    bdot0: f64,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<ErmakovSample>> {
    if !(b0.is_finite() && b0 > 0.0) {
        return Err(StaError::invalid("b0", format!("must be positive, got {b0}")));
    }
    let w0_sq = protocol.omega0() * protocol.omega0();
    let rhs = |t: f64, y: &[f64; 2]| {
        if !(y[0] > 0.0) {
            return Err(StaError::SolverFailure { t, reason: format!("b reached {:.3e}", y[0]) });
        }
        Ok([y[1], -protocol.omega_sq(t) * y[0] + w0_sq / y[0].powi(3)])
    };
    let states = ode::integrate(rhs, 0.0, [b0, bdot0], times, opts)?;
    Ok(times.iter().zip(states).map(|(&t, y)| ErmakovSample { t, b: y[0], b_dot: y[1] }).collect())
}

/// Uniform sample times 0, t_f/n, …, t_f.
pub fn uniform_times(t_f: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_f * i as f64 / n as f64).collect()
}

/// A maximal interval on which ω²(t) < 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpulsiveInterval {
    pub start: f64,
    pub end: f64,
}

pub const DEFAULT_EXPULSIVE_SAMPLES: usize = 10_000;

/// Sign-change scan of ω² on `n_samples` + 1 points, endpoints refined by
/// bisection to 1e−9·t_f.
pub fn detect_expulsive(protocol: &FrequencyProtocol, n_samples: usize) -> Vec<ExpulsiveInterval> {
    let t_f = protocol.t_f();
    let n = n_samples.max(1);
    let f = |t: f64| protocol.omega_sq(t);
    let tol = 1e-9 * t_f;
    let refine = |mut lo: f64, mut hi: f64| {
        // invariant: sign(f(lo)) != sign(f(hi)) w.r.t. "< 0"
        let neg_lo = f(lo) < 0.0;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if (f(mid) < 0.0) == neg_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let mut intervals = Vec::new();
    let mut start = if f(0.0) < 0.0 { Some(0.0) } else { None };
    let mut prev_t = 0.0;
    let mut prev_neg = f(0.0) < 0.0;
    for i in 1..=n {
        let t = t_f * i as f64 / n as f64;
        let neg = f(t) < 0.0;
        if neg != prev_neg {
            let edge = refine(prev_t, t);
            if neg {
                start = Some(edge);
            } else if let Some(s) = start.take() {
                intervals.push(ExpulsiveInterval { start: s, end: edge });
            }
        }
        prev_t = t;
        prev_neg = neg;
    }
    if let Some(s) = start {
        intervals.push(ExpulsiveInterval { start: s, end: t_f });
    }
    intervals
}

/// Smallest ω² on a uniform sample, with its time.
pub fn min_omega_sq(protocol: &FrequencyProtocol, n_samples: usize) -> (f64, f64) {
    uniform_times(protocol.t_f(), n_samples.max(1))
        .into_iter()
        .map(|t| (t, protocol.omega_sq(t)))
        .fold((0.0, f64::MAX), |acc, v| if v.1 < acc.1 { v } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::design_quintic;

    #[test]
    fn identity_scaling_gives_constant_trap() {
        let p = invert_ermakov(&design_quintic(1.3, 1.3, 2.0).unwrap()).unwrap();
        for t in uniform_times(2.0, 20) {
            assert!((p.omega_sq(t) - 1.69).abs() < 1e-14);
        }
    }

    #[test]
    fn midpoint_value_against_finite_differences() {
        // Oracle: b̈ from a centered second difference of the closed-form quintic.
        let gamma: f64 = 2.0;
        let b = |t: f64| 1.0 + (gamma - 1.0) * (10.0 * t.powi(3) - 15.0 * t.powi(4) + 6.0 * t.powi(5));
        let h = 1e-4;
        let bdd = (b(0.5 + h) - 2.0 * b(0.5) + b(0.5 - h)) / (h * h);
        let oracle = 1.0 / b(0.5).powi(4) - bdd / b(0.5);
        assert!((oracle - 1.0 / 1.5f64.powi(4)).abs() < 1e-6);

        let p = invert_ermakov(&design_quintic(1.0, 0.25, 1.0).unwrap()).unwrap();
        assert!((p.omega_sq(0.5) - oracle).abs() < 1e-6);
        assert!((p.omega_sq(0.0) - 1.0).abs() < 1e-15);
        assert!((p.omega_sq(1.0) - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn constant_trap_fixed_point() {
        let p = FrequencyProtocol::constant(1.0, 5.0).unwrap();
        let s = solve_ermakov_forward(&p, 1.0, 0.0, &uniform_times(5.0, 50), &OdeOptions::default()).unwrap();
        assert!(s.iter().all(|v| (v.b - 1.0).abs() < 1e-12 && v.b_dot.abs() < 1e-12));
    }

    #[test]
    fn constant_trap_breathing_mode() {
        // For constant ω the Ermakov equation conserves
        // ḃ²/2 + ω²b²/2 + ω₀²/(2b²), and b² = A + B cos 2ωt with
        // A = (γ² + γ⁻²)/2, B = (γ² − γ⁻²)/2 when b(0) = γ, ḃ(0) = 0.
        let gamma: f64 = 1.7;
        let p = FrequencyProtocol::constant(1.0, 6.0).unwrap();
        let s = solve_ermakov_forward(&p, gamma, 0.0, &uniform_times(6.0, 120), &OdeOptions::default()).unwrap();
        let e0 = 0.5 * gamma * gamma + 0.5 / (gamma * gamma);
        let a = 0.5 * (gamma * gamma + gamma.powi(-2));
        let bb = 0.5 * (gamma * gamma - gamma.powi(-2));
        let mut b_min = f64::MAX;
        for v in &s {
            let e = 0.5 * v.b_dot * v.b_dot + 0.5 * v.b * v.b + 0.5 / (v.b * v.b);
            assert!((e - e0).abs() < 1e-9);
            assert!((v.b * v.b - (a + bb * (2.0 * v.t).cos())).abs() < 1e-9);
            b_min = b_min.min(v.b);
        }
        assert!((b_min - 1.0 / gamma).abs() < 1e-3);
    }

    #[test]
    fn rejects_nonpositive_start() {
        let p = FrequencyProtocol::constant(1.0, 1.0).unwrap();
        assert!(solve_ermakov_forward(&p, 0.0, 0.0, &[1.0], &OdeOptions::default()).is_err());
        assert!(solve_ermakov_forward(&p, -1.0, 0.0, &[1.0], &OdeOptions::default()).is_err());
    }

    #[test]
    fn expulsive_detection() {
        let c = FrequencyProtocol::constant(1.0, 1.0).unwrap();
        assert!(detect_expulsive(&c, DEFAULT_EXPULSIVE_SAMPLES).is_empty());

        let fast = invert_ermakov(&design_quintic(1.0, 0.1, 0.1).unwrap()).unwrap();
        let iv = detect_expulsive(&fast, DEFAULT_EXPULSIVE_SAMPLES);
        assert!(!iv.is_empty());
        for i in &iv {
            assert!(i.end > i.start);
            assert!(fast.omega_sq(0.5 * (i.start + i.end)) < 0.0);
            // refined edges: ω² changes sign across each boundary within tolerance
            let eps = 1e-8 * 0.1;
            if i.start > 0.0 {
                assert!(fast.omega_sq(i.start - eps) >= 0.0 && fast.omega_sq(i.start + eps) < 0.0);
            }
        }
        let slow = invert_ermakov(&design_quintic(1.0, 0.1, 100.0).unwrap()).unwrap();
        assert!(detect_expulsive(&slow, DEFAULT_EXPULSIVE_SAMPLES).is_empty());
    }
}
