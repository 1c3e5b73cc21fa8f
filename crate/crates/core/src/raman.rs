//! Two-photon Raman coupling of a trapped ion: effective parameters after
//! adiabatic elimination of the excited level, the second-blue-sideband
//! squeezing term, and how far a static coupling is from the time-dependent
//! prefactor a tracking protocol needs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, StaError};
use crate::invariant::FrequencyProtocol;
use crate::oscillator::UnitSystem;

/// |Δ̃|/max(Ω₁, Ω₂, ω) below which the elimination is flagged.
pub const DEFAULT_VALIDITY_RATIO: f64 = 20.0;
/// Resonance tolerance, in units of the trap frequency.
pub const RESONANCE_TOLERANCE: f64 = 1e-6;
pub const PHASE_TOLERANCE: f64 = 1e-6;
/// Relative variation of the required coupling within one trap period
/// beyond which a static coupling cannot follow.
pub const TRACKING_VARIATION: f64 = 0.1;
pub const DEFAULT_DIAGNOSTIC_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanParams {
    #[serde(rename = "Omega1")]
    pub rabi1: f64,
    #[serde(rename = "Omega2")]
    pub rabi2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub k1: f64,
    pub k2: f64,
    pub omega_e: f64,
    /// trap frequency
    pub omega: f64,
    pub mass: f64,
}

impl RamanParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("Omega1", self.rabi1),
            ("Omega2", self.rabi2),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega_e", self.omega_e),
            ("omega", self.omega),
            ("mass", self.mass),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(StaError::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("phi1", self.phi1), ("phi2", self.phi2), ("k1", self.k1), ("k2", self.k2)] {
            if !v.is_finite() {
                return Err(StaError::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveRamanParams {
    /// δ̃ = ω₁ − ω₂
    pub delta: f64,
    /// η̃ = η₁ − η₂
    pub eta: f64,
    /// φ̃ = φ₁ − φ₂
    pub phi: f64,
    /// Ω̃ = Ω₁Ω₂/(2Δ̃)
    #[serde(rename = "Omega")]
    pub rabi: f64,
    /// Stark shift s = (Ω₁² + Ω₂²)/(4Δ̃)
    pub stark: f64,
    /// Δ̃ = ω̃_L − ω_e
    #[serde(rename = "Delta")]
    pub detuning: f64,
    /// ω̃_L = (ω₁ + ω₂)/2
    #[serde(rename = "omegaL")]
    pub omega_l: f64,
    /// x₀ = √(ħ/2mω)
    pub x0: f64,
    /// ηⱼ = kⱼx₀
    pub eta_j: [f64; 2],
    /// trap frequency carried along for the sideband checks
    pub trap_omega: f64,
    /// |Δ̃|/max(Ω₁, Ω₂, ω)
    pub validity_ratio: f64,
    pub warnings: Vec<String>,
}

impl EffectiveRamanParams {
    pub fn half_rabi(&self) -> f64 {
        self.rabi / 2.0
    }
}

pub fn effective_params(raw: &RamanParams, units: &UnitSystem) -> Result<EffectiveRamanParams> {
    effective_params_with(raw, units, DEFAULT_VALIDITY_RATIO)
}

pub fn effective_params_with(raw: &RamanParams, units: &UnitSystem, threshold: f64) -> Result<EffectiveRamanParams> {
    raw.validate()?;
    let omega_l = (raw.omega1 + raw.omega2) / 2.0;
    let detuning = omega_l - raw.omega_e;
    if detuning == 0.0 {
        return Err(StaError::ZeroDetuning);
    }
    let x0 = (units.hbar / (2.0 * raw.mass * raw.omega)).sqrt();
    let eta_j = [raw.k1 * x0, raw.k2 * x0];
    let validity_ratio = detuning.abs() / raw.rabi1.max(raw.rabi2).max(raw.omega);
    let mut warnings = Vec::new();
    if validity_ratio < threshold {
        warnings.push(format!(
            "|Delta|/max(Omega1, Omega2, omega) = {validity_ratio:.3e} is below {threshold}; adiabatic elimination is questionable"
        ));
    }
    Ok(EffectiveRamanParams {
        delta: raw.omega1 - raw.omega2,
        eta: eta_j[0] - eta_j[1],
        phi: raw.phi1 - raw.phi2,
        rabi: raw.rabi1 * raw.rabi2 / (2.0 * detuning),
        stark: (raw.rabi1 * raw.rabi1 + raw.rabi2 * raw.rabi2) / (4.0 * detuning),
        detuning,
        omega_l,
        x0,
        eta_j,
        trap_omega: raw.omega,
        validity_ratio,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandCoupling {
    /// c in H = iħc(â² − â†²)
    pub coefficient: f64,
    pub resonance_ok: bool,
    pub phase_ok: bool,
}

/// Second blue sideband in the Lamb-Dicke regime: iħ(η̃²Ω̃/4)(â² − â†²),
/// valid when δ̃ = 2ω and φ̃ = −π/2.
pub fn second_sideband_coupling(eff: &EffectiveRamanParams) -> SidebandCoupling {
    let resonance_ok = (eff.delta - 2.0 * eff.trap_omega).abs() < RESONANCE_TOLERANCE * eff.trap_omega;
    let offset = (eff.phi + PI / 2.0).rem_euclid(2.0 * PI);
    let phase_ok = offset.min(2.0 * PI - offset) < PHASE_TOLERANCE;
    SidebandCoupling { coefficient: eff.eta * eff.eta * eff.rabi / 4.0, resonance_ok, phase_ok }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityDiagnostic {
    /// max |ω̇|/ω²
    pub max_value: f64,
    pub argmax_time: f64,
}

/// max |ω̇|/ω² over `n_samples` uniform times including both ends.
pub fn adiabaticity_diagnostic(protocol: &FrequencyProtocol, n_samples: usize) -> Result<AdiabaticityDiagnostic> {
    if n_samples < 2 {
        return Err(StaError::invalid("n_samples", "need at least 2"));
    }
    let t_f = protocol.t_f();
    let mut best = AdiabaticityDiagnostic { max_value: 0.0, argmax_time: 0.0 };
    for i in 0..n_samples {
        let t = t_f * i as f64 / (n_samples - 1) as f64;
        let w = protocol.omega(t)?;
        let v = protocol.omega_dot(t)?.abs() / (w * w);
        if v > best.max_value {
            best = AdiabaticityDiagnostic { max_value: v, argmax_time: t };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchReport {
    pub times: Vec<f64>,
    /// |ω̇/4ω|, the prefactor a tracking protocol needs
    pub required: Vec<f64>,
    /// η̃²Ω̃/4, all that a static Raman coupling offers
    pub available: f64,
    /// (required − available)/max(required, available); 0 where both vanish
    pub relative_mismatch: Vec<f64>,
    pub max_required: f64,
    /// largest relative variation of `required` within one trap period
    pub max_period_variation: f64,
    pub static_coupling_cannot_track: bool,
    pub adiabaticity: AdiabaticityDiagnostic,
}

pub fn tt_mismatch_report(protocol: &FrequencyProtocol, eff: &EffectiveRamanParams) -> Result<MismatchReport> {
    tt_mismatch_report_with(protocol, eff, DEFAULT_DIAGNOSTIC_SAMPLES)
}

pub fn tt_mismatch_report_with(
    protocol: &FrequencyProtocol,
    eff: &EffectiveRamanParams,
    n_samples: usize,
) -> Result<MismatchReport> {
    let adiabaticity = adiabaticity_diagnostic(protocol, n_samples)?;
    let t_f = protocol.t_f();
    let times: Vec<f64> = (0..n_samples).map(|i| t_f * i as f64 / (n_samples - 1) as f64).collect();
    let mut required = Vec::with_capacity(n_samples);
    let mut periods = Vec::with_capacity(n_samples);
    for &t in &times {
        let w = protocol.omega(t)?;
        required.push((protocol.omega_dot(t)? / (4.0 * w)).abs());
        periods.push(2.0 * PI / w);
    }
    let available = second_sideband_coupling(eff).coefficient.abs();
    let relative_mismatch = required
        .iter()
        .map(|&r| {
            let scale = r.max(available);
            if scale == 0.0 { 0.0 } else { (r - available) / scale }
        })
        .collect();

    // every window [tᵢ, tᵢ + 2π/ω(tᵢ)]
    let mut max_period_variation: f64 = 0.0;
    for i in 0..n_samples {
        let end = times[i] + periods[i];
        let (mut lo, mut hi) = (required[i], required[i]);
        for j in i..n_samples {
            if times[j] > end {
                break;
            }
            lo = lo.min(required[j]);
            hi = hi.max(required[j]);
        }
        if hi > 0.0 {
            max_period_variation = max_period_variation.max((hi - lo) / hi);
        }
    }
    Ok(MismatchReport {
        times,
        max_required: required.iter().copied().fold(0.0, f64::max),
        required,
        available,
        relative_mismatch,
        max_period_variation,
        static_coupling_cannot_track: max_period_variation > TRACKING_VARIATION,
        adiabaticity,
    })
}
