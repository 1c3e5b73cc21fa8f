//! The JSON protocol file.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sta_core::dynamics::{grid_for, HamiltonianSource, PropagationPlan, DEFAULT_OBSERVERS};
use sta_core::invariant::{design_quintic, invert_ermakov, InvariantSpec};
use sta_core::oscillator::MAX_FOCK;
use sta_core::raman::RamanParams;
use sta_core::{FrequencyProtocol, SpatialGrid, UnitSystem};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_POPULATION_CUTOFF: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ii,
    Tt,
    TtBare,
    Plain,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Ii => "ii",
            Method::Tt => "tt",
            Method::TtBare => "tt-bare",
            Method::Plain => "plain",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "ii" => Ok(Method::Ii),
            "tt" => Ok(Method::Tt),
            "tt-bare" => Ok(Method::TtBare),
            "plain" => Ok(Method::Plain),
            other => Err(CliError::Invalid(format!("unknown method `{other}` (expected ii, tt, tt-bare or plain)"))),
        }
    }
}

/// Trap schedule driving tt, tt-bare and plain runs; ii always uses the
/// engineered one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    #[default]
    LinearRamp,
    Engineered,
}

fn is_default_schedule(s: &Schedule) -> bool {
    *s == Schedule::LinearRamp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsBlock {
    pub hbar: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    /// Half-width; sized from the trap when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationBlock {
    /// Derived from the step-resolution rule when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    /// Number of observer rows, including t = 0 and t = t_f.
    pub observers: usize,
    /// Highest Fock level reported in the population columns.
    pub n_max: usize,
}

impl Default for PropagationBlock {
    fn default() -> Self {
        PropagationBlock { n_steps: None, observers: DEFAULT_OBSERVERS, n_max: DEFAULT_POPULATION_CUTOFF }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub version: u32,
    pub units: UnitsBlock,
    pub method: Method,
    #[serde(default, skip_serializing_if = "is_default_schedule")]
    pub schedule: Schedule,
    pub omega0: f64,
    pub omegaf: f64,
    pub t_f: f64,
    pub grid: GridBlock,
    #[serde(default)]
    pub propagation: PropagationBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raman: Option<RamanParams>,
    pub initial_states: Vec<usize>,
}

impl ProtocolFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProtocolFile = serde_json::from_str(text).map_err(|e| CliError::Invalid(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Invalid(msg) => CliError::Invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Canonical form: pretty JSON, fixed field order, shortest round-trip
    /// floats, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("protocol files always serialize");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Invalid(msg));
        if self.version != FORMAT_VERSION {
            return bad(format!("version: expected {FORMAT_VERSION}, got {}", self.version));
        }
        for (name, v) in [
            ("units.hbar", self.units.hbar),
            ("units.mass", self.units.mass),
            ("omega0", self.omega0),
            ("omegaf", self.omegaf),
            ("t_f", self.t_f),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name}: must be positive and finite, got {v}"));
            }
        }
        if let Some(x) = self.grid.x_max {
            if !(x.is_finite() && x > 0.0) {
                return bad(format!("grid.x_max: must be positive and finite, got {x}"));
            }
        }
        if self.grid.n_points < 64 || !self.grid.n_points.is_power_of_two() {
            return bad(format!("grid.n_points: must be a power of two >= 64, got {}", self.grid.n_points));
        }
        if self.propagation.n_steps == Some(0) {
            return bad("propagation.n_steps: must be at least 1".into());
        }
        if self.propagation.observers < 2 {
            return bad(format!("propagation.observers: need at least 2, got {}", self.propagation.observers));
        }
        if self.propagation.n_max > MAX_FOCK {
            return bad(format!("propagation.n_max: at most {MAX_FOCK}, got {}", self.propagation.n_max));
        }
        if self.initial_states.is_empty() {
            return bad("initial_states: need at least one Fock index".into());
        }
        let mut seen = BTreeSet::new();
        for &n in &self.initial_states {
            if n > MAX_FOCK {
                return bad(format!("initial_states: {n} exceeds {MAX_FOCK}"));
            }
            if !seen.insert(n) {
                return bad(format!("initial_states: {n} listed twice"));
            }
        }
        if let Some(r) = &self.raman {
            r.validate().map_err(|e| CliError::Invalid(format!("raman: {e}")))?;
        }
        Ok(())
    }

    pub fn units(&self) -> Result<UnitSystem> {
        Ok(UnitSystem::new(self.units.hbar, self.units.mass)?)
    }

    pub fn cutoff(&self) -> usize {
        self.propagation.n_max.max(*self.initial_states.iter().max().expect("validated nonempty"))
    }

    pub fn engineered_spec(&self) -> Result<InvariantSpec> {
        Ok(InvariantSpec::new(design_quintic(self.omega0, self.omegaf, self.t_f)?)?)
    }

    /// ω(t) the chosen method runs along.
    pub fn schedule_for(&self, method: Method) -> Result<FrequencyProtocol> {
        if method == Method::Ii || self.schedule == Schedule::Engineered {
            Ok(invert_ermakov(self.engineered_spec()?.scaling())?)
        } else {
            Ok(FrequencyProtocol::linear_ramp(self.omega0, self.omegaf, self.t_f)?)
        }
    }

    pub fn source_for(&self, method: Method) -> Result<HamiltonianSource> {
        Ok(match method {
            Method::Ii => HamiltonianSource::InverseInvariant(self.engineered_spec()?),
            Method::Tt => HamiltonianSource::Tracking(self.schedule_for(method)?),
            Method::TtBare => HamiltonianSource::TrackingBare(self.schedule_for(method)?),
            Method::Plain => HamiltonianSource::Plain(self.schedule_for(method)?),
        })
    }

    /// One grid for every method of a file: sized for the narrowest state
    /// any of them reaches.
    pub fn grid_for_methods(&self, methods: &[Method]) -> Result<SpatialGrid> {
        if let Some(x_max) = self.grid.x_max {
            return Ok(SpatialGrid::new(x_max, self.grid.n_points)?);
        }
        let units = self.units()?;
        let mut best: Option<SpatialGrid> = None;
        for &m in methods {
            let g = grid_for(&self.source_for(m)?, self.cutoff(), self.grid.n_points, &units)?;
            if best.is_none_or(|b| g.x_max() > b.x_max()) {
                best = Some(g);
            }
        }
        Ok(best.expect("at least one method"))
    }

    pub fn plan_for(&self, method: Method, grid: SpatialGrid) -> Result<PropagationPlan> {
        let units = self.units()?;
        let source = self.source_for(method)?;
        let n_steps = match self.propagation.n_steps {
            Some(n) => n,
            None => PropagationPlan::auto(source.clone(), grid, units)?.n_steps(),
        };
        Ok(PropagationPlan::new(source, grid, units, n_steps, self.propagation.observers)?.with_n_max(self.propagation.n_max))
    }
}
