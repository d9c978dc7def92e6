//! Batches of independent runs over one initial-condition axis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{self, PhaseGates, PhaseReport};
use crate::integrator::{self, EventKind, HaltReason, IntegrationConfig, Run};
use crate::model::{Params, State};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "TIPPE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    PhiDot0,
    NuX0,
    NuY0,
    ThetaDot0,
    Theta0,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PhiDot0 => "phi_dot0",
            SweepAxis::NuX0 => "nu_x0",
            SweepAxis::NuY0 => "nu_y0",
            SweepAxis::ThetaDot0 => "theta_dot0",
            SweepAxis::Theta0 => "theta0",
        }
    }

    pub fn apply(self, base: &State, value: f64) -> State {
        let mut s = *base;
        match self {
            SweepAxis::PhiDot0 => s.phi_dot = value,
            SweepAxis::NuX0 => s.nu_x = value,
            SweepAxis::NuY0 => s.nu_y = value,
            SweepAxis::ThetaDot0 => s.theta_dot = value,
            SweepAxis::Theta0 => s.theta = value,
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub params: Params,
    pub base: State,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub integration: IntegrationConfig,
    pub gates: PhaseGates,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("sweep has no values")]
    Empty,
    #[error("sweep value #{index} is not finite")]
    NonFinite { index: usize },
    #[error(transparent)]
    Integration(#[from] integrator::IntegrationError),
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.values.is_empty() {
            return Err(SweepError::Empty);
        }
        if let Some(index) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(SweepError::NonFinite { index });
        }
        self.integration.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum RunStatus {
    Completed,
    Halted(String),
    Failed(String),
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::Halted(_) => "halted",
            RunStatus::Failed(_) => "failed",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            RunStatus::Completed => "",
            RunStatus::Halted(s) | RunStatus::Failed(s) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub inverted: bool,
    pub smooth: bool,
    pub sync_phase_present: bool,
    pub gn_positive_throughout: bool,
}

/// Qualitative flags of one run.
pub fn classify(report: &PhaseReport, run: &Run) -> Classification {
    Classification {
        inverted: report.inverted,
        smooth: report.smooth(),
        sync_phase_present: report.sync_phase_present,
        gn_positive_throughout: report.min_gn > 0.0
            && run.events_of(EventKind::GnNonPositive).next().is_none()
            && !matches!(run.halt, Some(h) if h.reason == HaltReason::NonPositiveNormalForce),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub initial: [f64; 6],
    pub lambda: f64,
    pub lambda_ratio: f64,
    pub status: RunStatus,
    pub phases: Option<PhaseReport>,
    pub flags: Classification,
    pub max_abs_nu_x: f64,
    pub max_abs_nu_y: f64,
    pub max_abs_theta_dot: f64,
}

fn halt_label(reason: HaltReason) -> &'static str {
    match reason {
        HaltReason::NonPositiveNormalForce => "normal force not positive",
        HaltReason::PoleApproach => "pole approach",
        HaltReason::StepUnderflow => "step size underflow",
        HaltReason::RhsFailure => "right-hand side failure",
    }
}

/// Runs one initial condition; never panics on a bad state.
pub fn run_one(spec: &SweepSpec, index: usize, lambda_thres: f64) -> SweepRow {
    let value = spec.values[index];
    let s0 = spec.axis.apply(&spec.base, value);
    let lambda = analysis::jellett(&s0, &spec.params);
    let mut row = SweepRow {
        index,
        value,
        initial: s0.to_array(),
        lambda,
        lambda_ratio: lambda / lambda_thres,
        status: RunStatus::Completed,
        phases: None,
        flags: Classification::default(),
        max_abs_nu_x: f64::NAN,
        max_abs_nu_y: f64::NAN,
        max_abs_theta_dot: f64::NAN,
    };
    let run = match integrator::integrate(&s0, &spec.params, &spec.integration) {
        Ok(run) => run,
        Err(e) => {
            row.status = RunStatus::Failed(e.to_string());
            return row;
        }
    };
    if let Some(h) = run.halt {
        row.status = RunStatus::Halted(format!("{} at t = {}", halt_label(h.reason), h.t));
    }
    let max_abs = |f: fn(&State) -> f64| run.trajectory.samples().iter().fold(0.0, |m: f64, s| m.max(f(&s.state).abs()));
    row.max_abs_nu_x = max_abs(|s| s.nu_x);
    row.max_abs_nu_y = max_abs(|s| s.nu_y);
    row.max_abs_theta_dot = max_abs(|s| s.theta_dot);
    let report = analysis::detect_phases(&run.trajectory, &run.events, &spec.params, &spec.gates);
    row.flags = classify(&report, &run);
    row.phases = Some(report);
    row
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs every value of the sweep, in parallel, returning rows in input order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let lambda_thres = analysis::thresholds(&spec.params).map(|t| t.lambda_thres).unwrap_or(f64::NAN);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| SweepError::Pool(e.to_string()))?;
    Ok(pool.install(|| {
        (0..spec.values.len())
            .into_par_iter()
            .map(|i| run_one(spec, i, lambda_thres))
            .collect()
    }))
}

/// `n` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|k| start + (end - start) * k as f64 / (n - 1) as f64).collect(),
    }
}
