use serde::{Deserialize, Serialize};

use super::scaling::ScalingFunction;
use crate::error::{Result, StaError};

/// Relative tolerance on ω(0)² = ω₀² and ω(t_f)² = ω_f².
pub const ENDPOINT_TOLERANCE: f64 = 1e-9;

/// How ω(t) is produced on [0, t_f].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProtocolKind {
    Constant,
    LinearRamp,
    /// ω² from the Ermakov equation for a designed scaling function.
    Engineered { scaling: ScalingFunction },
    /// ω² samples, natural cubic spline in between.
    Tabulated { times: Vec<f64>, omega_sq: Vec<f64> },
}

/// A trap-frequency schedule ω(t), possibly with ω² < 0 somewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProtocol", into = "RawProtocol")]
pub struct FrequencyProtocol {
    omega0: f64,
    omegaf: f64,
    t_f: f64,
    kind: ProtocolKind,
    #[serde(skip)]
    spline: Option<Spline>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    omega0: f64,
    omegaf: f64,
    t_f: f64,
    #[serde(flatten)]
    kind: ProtocolKind,
}

impl TryFrom<RawProtocol> for FrequencyProtocol {
    type Error = StaError;

    fn try_from(raw: RawProtocol) -> Result<Self> {
        let p = match raw.kind {
            ProtocolKind::Constant => FrequencyProtocol::constant(raw.omega0, raw.t_f)?,
            ProtocolKind::LinearRamp => FrequencyProtocol::linear_ramp(raw.omega0, raw.omegaf, raw.t_f)?,
            ProtocolKind::Engineered { scaling } => FrequencyProtocol::engineered(scaling)?,
            ProtocolKind::Tabulated { times, omega_sq } => FrequencyProtocol::tabulated(times, omega_sq)?,
        };
        let close = |a: f64, b: f64| (a - b).abs() <= ENDPOINT_TOLERANCE * a.abs().max(b.abs());
        if !close(p.omega0, raw.omega0) || !close(p.omegaf, raw.omegaf) || !close(p.t_f, raw.t_f) {
            return Err(StaError::invalid("protocol", "omega0/omegaf/t_f disagree with the payload"));
        }
        Ok(p)
    }
}

impl From<FrequencyProtocol> for RawProtocol {
    fn from(p: FrequencyProtocol) -> Self {
        RawProtocol { omega0: p.omega0, omegaf: p.omegaf, t_f: p.t_f, kind: p.kind }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(StaError::invalid(name, format!("must be positive, got {v}")))
    }
}

impl FrequencyProtocol {
    pub fn constant(omega0: f64, t_f: f64) -> Result<Self> {
        positive("omega0", omega0)?;
        positive("t_f", t_f)?;
        Ok(FrequencyProtocol { omega0, omegaf: omega0, t_f, kind: ProtocolKind::Constant, spline: None })
    }

    /// ω(t) = ω₀ + (ω_f − ω₀) t/t_f.
    pub fn linear_ramp(omega0: f64, omegaf: f64, t_f: f64) -> Result<Self> {
        positive("omega0", omega0)?;
        positive("omegaf", omegaf)?;
        positive("t_f", t_f)?;
        Ok(FrequencyProtocol { omega0, omegaf, t_f, kind: ProtocolKind::LinearRamp, spline: None })
    }

    /// ω²(t) = ω₀²/b⁴ − b̈/b for the given scaling function.
    pub fn engineered(scaling: ScalingFunction) -> Result<Self> {
        let t_f = scaling.t_f();
        let omega0 = scaling.omega0();
        let w0 = ermakov_omega_sq(&scaling, 0.0);
        let wf = ermakov_omega_sq(&scaling, t_f);
        if (w0 - omega0 * omega0).abs() > ENDPOINT_TOLERANCE * omega0 * omega0 {
            return Err(StaError::invalid(
                "scaling",
                format!("omega(0)^2 = {w0} does not match omega0^2 = {}; need b(0)=1, b''(0)=0", omega0 * omega0),
            ));
        }
        if !(wf > 0.0) {
            return Err(StaError::NonPositiveFrequency { t: t_f, omega_sq: wf });
        }
        Ok(FrequencyProtocol { omega0, omegaf: wf.sqrt(), t_f, kind: ProtocolKind::Engineered { scaling }, spline: None })
    }

    /// Samples of ω² at strictly increasing times starting at 0.
    pub fn tabulated(times: Vec<f64>, omega_sq: Vec<f64>) -> Result<Self> {
        if times.len() != omega_sq.len() || times.len() < 4 {
            return Err(StaError::invalid("tabulated", "need at least 4 (t, omega^2) pairs of equal length"));
        }
        if times[0] != 0.0 {
            return Err(StaError::invalid("times", "must start at 0"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || omega_sq.iter().any(|w| !w.is_finite()) {
            return Err(StaError::invalid("times", "must be strictly increasing with finite omega^2"));
        }
        positive("omega_sq[0]", omega_sq[0])?;
        positive("omega_sq[last]", *omega_sq.last().unwrap())?;
        let spline = Spline::natural(&times, &omega_sq);
        Ok(FrequencyProtocol {
            omega0: omega_sq[0].sqrt(),
            omegaf: omega_sq.last().unwrap().sqrt(),
            t_f: *times.last().unwrap(),
            kind: ProtocolKind::Tabulated { times, omega_sq },
            spline: Some(spline),
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omegaf(&self) -> f64 {
        self.omegaf
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn kind(&self) -> &ProtocolKind {
        &self.kind
    }

    pub fn scaling(&self) -> Option<&ScalingFunction> {
        match &self.kind {
            ProtocolKind::Engineered { scaling } => Some(scaling),
            _ => None,
        }
    }

    /// Same schedule run κ times slower. Only the closed-form kinds stretch.
    pub fn stretched(&self, kappa: f64) -> Result<Self> {
        positive("kappa", kappa)?;
        match self.kind {
            ProtocolKind::Constant => Self::constant(self.omega0, kappa * self.t_f),
            ProtocolKind::LinearRamp => Self::linear_ramp(self.omega0, self.omegaf, kappa * self.t_f),
            _ => Err(StaError::invalid("kappa", "only constant and linear-ramp protocols can be stretched")),
        }
    }

    fn clamp(&self, t: f64) -> f64 {
        t.clamp(0.0, self.t_f)
    }

    /// ω²(t); negative on expulsive intervals.
    pub fn omega_sq(&self, t: f64) -> f64 {
        let t = self.clamp(t);
        match &self.kind {
            ProtocolKind::Constant => self.omega0 * self.omega0,
            ProtocolKind::LinearRamp => {
                let w = self.ramp_omega(t);
                w * w
            }
            ProtocolKind::Engineered { scaling } => ermakov_omega_sq(scaling, t),
            ProtocolKind::Tabulated { .. } => self.spline().value(t),
        }
    }

    /// ω(t) = √ω²; errors where the trap is flat or expulsive.
    pub fn omega(&self, t: f64) -> Result<f64> {
        let t = self.clamp(t);
        if let ProtocolKind::LinearRamp = self.kind {
            return Ok(self.ramp_omega(t));
        }
        let w2 = self.omega_sq(t);
        if w2 > 0.0 {
            Ok(w2.sqrt())
        } else {
            Err(StaError::NonPositiveFrequency { t, omega_sq: w2 })
        }
    }

    /// dω/dt. Analytic for the closed-form kinds; fourth-order finite
    /// differences of ω with step 1e−6·t_f for tabulated schedules.
    pub fn omega_dot(&self, t: f64) -> Result<f64> {
        let t = self.clamp(t);
        match &self.kind {
            ProtocolKind::Constant => Ok(0.0),
            ProtocolKind::LinearRamp => Ok((self.omegaf - self.omega0) / self.t_f),
            ProtocolKind::Engineered { scaling } => {
                let w = self.omega(t)?;
                Ok(ermakov_omega_sq_dot(scaling, t) / (2.0 * w))
            }
            ProtocolKind::Tabulated { .. } => {
                let h = 1e-6 * self.t_f;
                let f = |s: f64| self.omega(s);
                if t - 2.0 * h < 0.0 {
                    // forward fourth-order stencil
                    Ok((-25.0 * f(t)? + 48.0 * f(t + h)? - 36.0 * f(t + 2.0 * h)? + 16.0 * f(t + 3.0 * h)?
                        - 3.0 * f(t + 4.0 * h)?)
                        / (12.0 * h))
                } else if t + 2.0 * h > self.t_f {
                    Ok((25.0 * f(t)? - 48.0 * f(t - h)? + 36.0 * f(t - 2.0 * h)? - 16.0 * f(t - 3.0 * h)?
                        + 3.0 * f(t - 4.0 * h)?)
                        / (12.0 * h))
                } else {
                    Ok((f(t - 2.0 * h)? - 8.0 * f(t - h)? + 8.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h))
                }
            }
        }
    }

    fn ramp_omega(&self, t: f64) -> f64 {
        self.omega0 + (self.omegaf - self.omega0) * t / self.t_f
    }

    fn spline(&self) -> &Spline {
        self.spline.as_ref().expect("tabulated protocols carry a spline")
    }
}

pub(crate) fn ermakov_omega_sq(scaling: &ScalingFunction, t: f64) -> f64 {
    let v = scaling.eval(t);
    let w0 = scaling.omega0();
    w0 * w0 / v.b.powi(4) - v.b_ddot / v.b
}

fn ermakov_omega_sq_dot(scaling: &ScalingFunction, t: f64) -> f64 {
    let v = scaling.eval(t);
    let w0 = scaling.omega0();
    -4.0 * w0 * w0 * v.b_dot / v.b.powi(5) - (v.b_dddot * v.b - v.b_ddot * v.b_dot) / (v.b * v.b)
}

/// Natural cubic spline through (xᵢ, yᵢ).
#[derive(Debug, Clone, PartialEq)]
struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    second: Vec<f64>,
}

impl Spline {
    fn natural(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut second = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
        }
        second[n - 1] = 0.0;
        for k in (0..n - 1).rev() {
            second[k] = second[k] * second[k + 1] + u[k];
        }
        second[0] = 0.0;
        Spline { x: x.to_vec(), y: y.to_vec(), second }
    }

    fn value(&self, t: f64) -> f64 {
        let hi = self.x.partition_point(|&v| v < t).clamp(1, self.x.len() - 1);
        let lo = hi - 1;
        let h = self.x[hi] - self.x[lo];
        let a = (self.x[hi] - t) / h;
        let b = (t - self.x[lo]) / h;
        a * self.y[lo]
            + b * self.y[hi]
            + ((a * a * a - a) * self.second[lo] + (b * b * b - b) * self.second[hi]) * h * h / 6.0
    }
}
