//! The four subcommands. Each validates its preconditions, runs, writes
//! its artifacts under the output directory and returns the summary it
//! wrote.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sta_core::dynamics::{propagate as run_plan, PropagationPlan, TrajectoryRecord, MAX_STEP_PHASE};
use sta_core::invariant::{detect_expulsive, min_omega_sq, ExpulsiveInterval, DEFAULT_EXPULSIVE_SAMPLES};
use sta_core::ode::OdeOptions;
use sta_core::oscillator::eigenstate;
use sta_core::raman::{
    adiabaticity_diagnostic, effective_params, second_sideband_coupling, tt_mismatch_report, AdiabaticityDiagnostic,
    EffectiveRamanParams, SidebandCoupling, DEFAULT_DIAGNOSTIC_SAMPLES,
};
use sta_core::{FockIndex, FrequencyProtocol, SpatialGrid, StaError};

use crate::error::{CliError, Result};
use crate::output::{num, prepare_dir, write_csv, write_json};
use crate::protocol_file::{Method, ProtocolFile};

pub const DESIGN_ROWS: usize = 1001;

#[derive(Debug, Clone, Serialize)]
pub struct MinOmegaSq {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleDiagnostics {
    pub min_omega_sq: MinOmegaSq,
    pub expulsive_intervals: Vec<ExpulsiveInterval>,
    /// max |ω̇|/ω²; absent when the trap turns expulsive.
    pub max_adiabaticity: Option<AdiabaticityDiagnostic>,
}

fn schedule_diagnostics(protocol: &FrequencyProtocol) -> Result<ScheduleDiagnostics> {
    let (t, value) = min_omega_sq(protocol, DEFAULT_EXPULSIVE_SAMPLES);
    let max_adiabaticity = match adiabaticity_diagnostic(protocol, DEFAULT_DIAGNOSTIC_SAMPLES) {
        Ok(d) => Some(d),
        Err(StaError::NonPositiveFrequency { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(ScheduleDiagnostics {
        min_omega_sq: MinOmegaSq { t, value },
        expulsive_intervals: detect_expulsive(protocol, DEFAULT_EXPULSIVE_SAMPLES),
        max_adiabaticity,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignSummary {
    pub command: &'static str,
    pub omega0: f64,
    pub omegaf: f64,
    pub t_f: f64,
    pub gamma: f64,
    pub max_b: f64,
    pub schedule: ScheduleDiagnostics,
    pub rows: usize,
    pub wall_time_s: f64,
}

/// Samples the quintic scaling function and the trap it implies.
pub fn design(file: &ProtocolFile, out_dir: &Path) -> Result<DesignSummary> {
    if file.method != Method::Ii {
        return Err(CliError::Invalid(format!("design needs method ii, file has {}", file.method.label())));
    }
    let start = Instant::now();
    let dir = prepare_dir(out_dir)?;
    let spec = file.engineered_spec()?;
    let scaling = spec.scaling();
    let protocol = file.schedule_for(Method::Ii)?;
    let header: Vec<String> = ["t", "b", "b_dot", "b_ddot", "omega_sq"].map(String::from).into();
    let rows = (0..DESIGN_ROWS).map(|i| {
        let t = file.t_f * i as f64 / (DESIGN_ROWS - 1) as f64;
        let v = scaling.eval(t);
        vec![num(t), num(v.b), num(v.b_dot), num(v.b_ddot), num(protocol.omega_sq(t))]
    });
    write_csv(&dir.join("design.csv"), &header, rows)?;
    let summary = DesignSummary {
        command: "design",
        omega0: file.omega0,
        omegaf: file.omegaf,
        t_f: file.t_f,
        gamma: scaling.gamma(),
        max_b: scaling.max_b(),
        schedule: schedule_diagnostics(&protocol)?,
        rows: DESIGN_ROWS,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
    pub k_max: f64,
}

impl From<&SpatialGrid> for GridSummary {
    fn from(g: &SpatialGrid) -> Self {
        GridSummary { x_max: g.x_max(), n_points: g.n_points(), dx: g.dx(), k_max: g.k_max() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StateSummary {
    pub n: usize,
    /// |⟨ideal(t_f)|ψ(t_f)⟩|², phases included
    pub final_fidelity: f64,
    /// Pₙ(t_f) in the tracking basis
    pub final_population: f64,
    pub max_population_deviation: f64,
    pub max_norm_drift: f64,
    pub final_energy: f64,
    pub final_invariant: f64,
    pub warnings: Vec<String>,
    pub csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverSummary {
    pub n_steps: usize,
    pub dt: f64,
    pub observers: usize,
    pub max_step_phase: f64,
    pub splitting: &'static str,
    pub ode_rtol: f64,
    pub ode_atol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: &'static str,
    pub method: &'static str,
    pub grid: GridSummary,
    pub solver: SolverSummary,
    pub schedule: ScheduleDiagnostics,
    pub states: Vec<StateSummary>,
    pub wall_time_s: f64,
}

struct MethodRun {
    plan: PropagationPlan,
    records: Vec<(usize, TrajectoryRecord)>,
    wall_time_s: f64,
}

fn run_method(file: &ProtocolFile, method: Method, grid: SpatialGrid) -> Result<MethodRun> {
    let start = Instant::now();
    let plan = file.plan_for(method, grid)?;
    let units = file.units()?;
    let records = file
        .initial_states
        .par_iter()
        .map(|&n| {
            let psi0 = eigenstate(FockIndex(n), file.omega0, &grid, &units)?;
            Ok((n, run_plan(&psi0, &plan)?))
        })
        .collect::<Result<Vec<_>, StaError>>()?;
    Ok(MethodRun { plan, records, wall_time_s: start.elapsed().as_secs_f64() })
}

fn final_population(rec: &TrajectoryRecord, n: usize) -> f64 {
    rec.final_populations().get(n).copied().unwrap_or(f64::NAN)
}

fn trajectory_rows(rec: &TrajectoryRecord) -> impl Iterator<Item = Vec<String>> + '_ {
    (0..rec.times.len()).map(move |i| {
        let mut row = Vec::with_capacity(rec.populations[i].len() + 5);
        row.push(num(rec.times[i]));
        row.extend(rec.populations[i].iter().map(|&p| num(p)));
        row.extend([num(rec.fidelity[i]), num(rec.invariant[i]), num(rec.energy[i]), num(rec.norm[i])]);
        row
    })
}

fn trajectory_header(n_max: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..=n_max).map(|n| format!("P{n}")));
    h.extend(["fidelity_vs_target", "I", "H", "norm"].map(String::from));
    h
}

/// Propagates every initial state and writes one trajectory CSV each.
pub fn propagate(file: &ProtocolFile, out_dir: &Path) -> Result<RunSummary> {
    let start = Instant::now();
    let dir = prepare_dir(out_dir)?;
    let grid = file.grid_for_methods(&[file.method])?;
    let run = run_method(file, file.method, grid)?;
    let header = trajectory_header(run.plan.n_max());
    let mut states = Vec::with_capacity(run.records.len());
    for (n, rec) in &run.records {
        let name = format!("trajectory_{}_n{n}.csv", file.method.label());
        write_csv(&dir.join(&name), &header, trajectory_rows(rec))?;
        states.push(StateSummary {
            n: *n,
            final_fidelity: rec.final_fidelity(),
            final_population: final_population(rec, *n),
            max_population_deviation: rec.max_population_deviation(),
            max_norm_drift: rec.max_norm_drift(),
            final_energy: *rec.energy.last().expect("nonempty"),
            final_invariant: *rec.invariant.last().expect("nonempty"),
            warnings: rec.warnings.clone(),
            csv: name,
        });
    }
    let opts = OdeOptions::default();
    let summary = RunSummary {
        command: "propagate",
        method: file.method.label(),
        grid: (&grid).into(),
        solver: SolverSummary {
            n_steps: run.plan.n_steps(),
            dt: run.plan.dt(),
            observers: run.plan.observers(),
            max_step_phase: MAX_STEP_PHASE,
            splitting: "strang: V/2 D/2 K D/2 V/2",
            ode_rtol: opts.rtol,
            ode_atol: opts.atol,
        },
        schedule: schedule_diagnostics(run.plan.protocol())?,
        states,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct MismatchSummary {
    pub samples: usize,
    pub available: f64,
    pub max_required: f64,
    pub max_period_variation: f64,
    pub static_coupling_cannot_track: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub command: &'static str,
    pub schedule: &'static str,
    pub effective: EffectiveRamanParams,
    pub sideband: SidebandCoupling,
    /// None when ω² ≤ 0 somewhere: the diagnostic does not apply.
    pub adiabaticity: Option<AdiabaticityDiagnostic>,
    pub mismatch: Option<MismatchSummary>,
    pub notes: Vec<String>,
}

/// Raman parameter chain, plus required vs available squeezing coupling
/// along the file's schedule.
pub fn raman(file: &ProtocolFile, out_dir: &Path) -> Result<FeasibilityReport> {
    let raw = file.raman.as_ref().ok_or(CliError::MissingSection("raman"))?;
    let dir = prepare_dir(out_dir)?;
    let effective = effective_params(raw, &file.units()?)?;
    let sideband = second_sideband_coupling(&effective);
    let protocol = file.schedule_for(file.method)?;
    let mut notes = Vec::new();
    let (adiabaticity, mismatch) = match tt_mismatch_report(&protocol, &effective) {
        Ok(report) => {
            let header: Vec<String> = ["t", "required", "available", "relative_mismatch"].map(String::from).into();
            let rows = report
                .times
                .iter()
                .zip(&report.required)
                .zip(&report.relative_mismatch)
                .map(|((&t, &req), &rel)| vec![num(t), num(req), num(report.available), num(rel)]);
            write_csv(&dir.join("mismatch.csv"), &header, rows)?;
            let summary = MismatchSummary {
                samples: report.times.len(),
                available: report.available,
                max_required: report.max_required,
                max_period_variation: report.max_period_variation,
                static_coupling_cannot_track: report.static_coupling_cannot_track,
            };
            (Some(report.adiabaticity), Some(summary))
        }
        Err(StaError::NonPositiveFrequency { t, omega_sq }) => {
            notes.push(format!(
                "trap turns expulsive (first sample with omega^2 <= 0: {omega_sq:.6e} at t = {t:.6e}); adiabaticity and mismatch not applicable"
            ));
            (None, None)
        }
        Err(e) => return Err(e.into()),
    };
    let report = FeasibilityReport {
        command: "raman",
        schedule: if file.method == Method::Ii || file.schedule == crate::protocol_file::Schedule::Engineered {
            "engineered"
        } else {
            "linear-ramp"
        },
        effective,
        sideband,
        adiabaticity,
        mismatch,
        notes,
    };
    write_json(&dir.join("feasibility.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct StateComparison {
    pub n: usize,
    pub final_fidelity: f64,
    pub final_population: f64,
    pub max_population_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodComparison {
    pub method: &'static str,
    pub n_steps: usize,
    pub min_omega_sq: f64,
    pub states: Vec<StateComparison>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareSummary {
    pub command: &'static str,
    pub grid: GridSummary,
    pub initial_states: Vec<usize>,
    pub methods: Vec<MethodComparison>,
}

/// Runs the same initial states on one shared grid under each method.
pub fn compare(file: &ProtocolFile, methods: &[Method], out_dir: &Path) -> Result<CompareSummary> {
    let mut distinct = methods.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(CliError::Invalid(format!("compare needs at least two distinct methods, got {}", distinct.len())));
    }
    let dir = prepare_dir(out_dir)?;
    let grid = file.grid_for_methods(methods)?;
    let mut rows = Vec::new();
    let mut seen = Vec::new();
    for &m in methods {
        if seen.contains(&m) {
            continue;
        }
        seen.push(m);
        let run = run_method(file, m, grid)?;
        let (_, w2) = min_omega_sq(run.plan.protocol(), DEFAULT_EXPULSIVE_SAMPLES);
        rows.push(MethodComparison {
            method: m.label(),
            n_steps: run.plan.n_steps(),
            min_omega_sq: w2,
            states: run
                .records
                .iter()
                .map(|(n, rec)| StateComparison {
                    n: *n,
                    final_fidelity: rec.final_fidelity(),
                    final_population: final_population(rec, *n),
                    max_population_deviation: rec.max_population_deviation(),
                })
                .collect(),
            wall_time_s: run.wall_time_s,
        });
    }
    let header: Vec<String> =
        ["method", "n", "n_steps", "final_fidelity", "final_population", "max_population_deviation", "min_omega_sq"]
            .map(String::from)
            .into();
    let csv_rows = rows.iter().flat_map(|m| {
        m.states.iter().map(move |s| {
            vec![
                m.method.to_string(),
                s.n.to_string(),
                m.n_steps.to_string(),
                num(s.final_fidelity),
                num(s.final_population),
                num(s.max_population_deviation),
                num(m.min_omega_sq),
            ]
        })
    });
    write_csv(&dir.join("compare.csv"), &header, csv_rows)?;
    let summary = CompareSummary { command: "compare", grid: (&grid).into(), initial_states: file.initial_states.clone(), methods: rows };
    write_json(&dir.join("compare.json"), &summary)?;
    Ok(summary)
}
