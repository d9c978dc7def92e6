//! TOML run configuration. Every section and key is optional; omitted
//! values fall back to the reference top and the default integrator
//! settings. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::PhaseGates;
use crate::integrator::{GnPolicy, IntegrationConfig};
use crate::model::{ModelError, Params, State};
use crate::sweep::SweepAxis;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: &str, reason: impl ToString) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            reason: reason.to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub m: f64,
    pub r: f64,
    pub alpha: f64,
    pub i1: f64,
    pub i3: f64,
    pub g: f64,
    pub mu: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        let p = Params::reference();
        Self {
            m: p.m(),
            r: p.r(),
            alpha: p.alpha(),
            i1: p.i1(),
            i3: p.i3(),
            g: p.g(),
            mu: p.mu(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub theta: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub omega3: f64,
    pub nu_x: f64,
    pub nu_y: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        let s = State::reference();
        Self {
            theta: s.theta,
            theta_dot: s.theta_dot,
            phi_dot: s.phi_dot,
            omega3: s.omega3,
            nu_x: s.nu_x,
            nu_y: s.nu_y,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum GnPolicySetting {
    #[default]
    Halt,
    Warn,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationSection {
    pub t0: f64,
    pub t1: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_out: f64,
    pub max_step: f64,
    pub gn_policy: GnPolicySetting,
}

impl Default for IntegrationSection {
    fn default() -> Self {
        let c = IntegrationConfig::default();
        Self {
            t0: c.t0,
            t1: c.t1,
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            dt_out: c.dt_out,
            max_step: c.max_step,
            gn_policy: GnPolicySetting::Halt,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub trajectory: String,
    pub diagnostics: String,
    pub phases: String,
    pub summary: String,
    pub sweep: String,
    pub potential: String,
    pub minima: String,
    /// Also write the integrator's step endpoints, not just the output grid.
    pub include_steps: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            trajectory: "trajectory.csv".into(),
            diagnostics: "diagnostics.csv".into(),
            phases: "phases.json".into(),
            summary: "summary.txt".into(),
            sweep: "sweep.csv".into(),
            potential: "potential.csv".into(),
            minima: "potential_minima.csv".into(),
            include_steps: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    /// Explicit values; alternatively `start`, `end` and `count`.
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub count: Option<usize>,
}

impl SweepSection {
    pub fn resolve_values(&self) -> Result<Vec<f64>, ConfigError> {
        let values = match (&self.values, self.start, self.end, self.count) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => crate::sweep::linspace(a, b, n),
            _ => {
                return Err(ConfigError::invalid(
                    "sweep",
                    "give either `values` or all of `start`, `end`, `count`",
                ))
            }
        };
        if values.is_empty() {
            return Err(ConfigError::invalid("sweep.values", "must not be empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ConfigError::invalid("sweep.values", format!("entry {i} is not finite")));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialSection {
    /// Jellett integral; defaults to the value at the initial state.
    pub lambda: Option<f64>,
    /// Routh values; defaults to `d_count` values from `D0` to `D1`.
    pub d_values: Option<Vec<f64>>,
    pub d_count: usize,
    pub z_start: f64,
    pub z_end: f64,
    pub z_count: usize,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self {
            lambda: None,
            d_values: None,
            d_count: 11,
            z_start: -0.999,
            z_end: 0.999,
            z_count: 1999,
        }
    }
}

impl PotentialSection {
    pub fn z_grid(&self) -> Result<Vec<f64>, ConfigError> {
        if self.z_count == 0 {
            return Err(ConfigError::invalid("potential.z_count", "must be positive"));
        }
        for (name, z) in [("potential.z_start", self.z_start), ("potential.z_end", self.z_end)] {
            if !(z.abs() < 1.0) {
                return Err(ConfigError::invalid(name, format!("{z} is not inside (-1, 1)")));
            }
        }
        Ok(crate::sweep::linspace(self.z_start, self.z_end, self.z_count))
    }
}

/// Whole configuration file.
#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ParamsSection,
    pub initial: InitialSection,
    pub integration: IntegrationSection,
    pub phases: PhaseGates,
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
    pub potential: PotentialSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn params(&self) -> Result<Params, ConfigError> {
        let s = &self.params;
        Params::new(s.m, s.r, s.alpha, s.i1, s.i3, s.g, s.mu).map_err(|e| match e {
            ModelError::OutOfRange { name, .. } => ConfigError::invalid(&format!("params.{}", name.to_lowercase()), e),
            other => ConfigError::invalid("params", other),
        })
    }

    pub fn initial_state(&self) -> Result<State, ConfigError> {
        let i = &self.initial;
        let s = State::new(i.theta, i.theta_dot, i.phi_dot, i.omega3, i.nu_x, i.nu_y);
        if !s.is_finite() {
            return Err(ConfigError::invalid("initial", "all values must be finite"));
        }
        Ok(s)
    }

    pub fn integration(&self) -> Result<IntegrationConfig, ConfigError> {
        let i = &self.integration;
        let cfg = IntegrationConfig {
            t0: i.t0,
            t1: i.t1,
            rel_tol: i.rel_tol,
            abs_tol: i.abs_tol,
            dt_out: i.dt_out,
            max_step: i.max_step,
            gn_policy: match i.gn_policy {
                GnPolicySetting::Halt => GnPolicy::Halt,
                GnPolicySetting::Warn => GnPolicy::Warn,
            },
        };
        cfg.validate().map_err(|e| match e {
            crate::integrator::IntegrationError::InvalidConfig { field, reason } => {
                ConfigError::invalid(&format!("integration.{field}"), reason)
            }
            other => ConfigError::invalid("integration", other),
        })?;
        Ok(cfg)
    }

    pub fn gates(&self) -> Result<PhaseGates, ConfigError> {
        let g = self.phases;
        for (name, v) in [
            ("phases.theta_low", g.theta_low),
            ("phases.theta_high", g.theta_high),
            ("phases.amplitude_min", g.amplitude_min),
            ("phases.window", g.window),
            ("phases.sync_min", g.sync_min),
            ("phases.smooth_from", g.smooth_from),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::invalid(name, "must be finite and non-negative"));
            }
        }
        Ok(g)
    }
}
