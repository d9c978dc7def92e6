//! The `simulate`, `sweep` and `potential` commands and their file formats.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), `.` as the
//! decimal separator and `\n` line endings, so identical inputs produce
//! byte-identical files.

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::analysis::{self, PhaseReport};
use crate::dynamics;
use crate::integrator::{self, Halt, HaltReason, Run, Sample};
use crate::model::Params;
use crate::sweep::{self, SweepRow, SweepSpec};

pub use config::{ConfigError, RunConfig};

/// Header of the trajectory CSV.
pub const TRAJECTORY_HEADER: &str =
    "t,theta,theta_dot,phi_dot,psi_dot,omega3,nu_x,nu_y,g_n,lambda,D,E,E_trans,E_rot,E_pot,Etilde,E_dot,tau_x,tau_y,tau_z,xi";
pub const DIAGNOSTICS_HEADER: &str = "t,g_n,lambda,D,Etilde,E,E_trans,E_rot,E_pot,E_dot,tau_x,tau_y,tau_z,xi,met_residual,\
phi_dot_identity_residual,phi_dot_identity_printed,Etilde_minus_E,Etilde_minus_E_estimate";
pub const SWEEP_HEADER: &str =
    "index,axis,value,theta0,theta_dot0,phi_dot0,omega30,nu_x0,nu_y0,lambda,lambda_ratio,status,t_init,t_end,t_inv,\
inverted,smooth,sync_phase_present,gn_positive_throughout,min_gn,max_abs_nu_x,max_abs_nu_y,max_abs_theta_dot,detail";
pub const POTENTIAL_HEADER: &str = "D,z,V";
pub const MINIMA_HEADER: &str = "D,z_min,V_min,interior";

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const MODEL_BREAKDOWN: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError {
            code: exit::CONFIG,
            message: e.to_string(),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError {
        code: exit::IO,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn num(x: f64) -> String {
    // Normalise negative zero.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_line(out: &mut String, fields: &[f64]) {
    for (i, x) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&num(*x));
    }
    out.push('\n');
}

/// Machine-readable halt reason.
pub fn halt_code(reason: HaltReason) -> &'static str {
    match reason {
        HaltReason::NonPositiveNormalForce => "normal_force_nonpositive",
        HaltReason::PoleApproach => "pole_approach",
        HaltReason::StepUnderflow => "step_underflow",
        HaltReason::RhsFailure => "rhs_failure",
    }
}

pub fn exit_code_for(halt: Option<Halt>) -> i32 {
    match halt.map(|h| h.reason) {
        None => exit::OK,
        Some(HaltReason::NonPositiveNormalForce) => exit::MODEL_BREAKDOWN,
        Some(_) => exit::NUMERICAL,
    }
}

/// Trajectory CSV text for the given samples.
pub fn trajectory_csv(samples: &[Sample], p: &Params) -> String {
    let mut out = String::with_capacity(samples.len() * 21 * 24 + 256);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for smp in samples {
        let s = &smp.state;
        let gn = dynamics::normal_force(s, p).map(|g| g.value()).unwrap_or(f64::NAN);
        let split = analysis::energy_split(s, p);
        let tau = analysis::diagnostics::torque_with(s, p, gn);
        csv_line(
            &mut out,
            &[
                smp.t,
                s.theta,
                s.theta_dot,
                s.phi_dot,
                s.psi_dot(),
                s.omega3,
                s.nu_x,
                s.nu_y,
                gn,
                analysis::jellett(s, p),
                analysis::routh(s, p),
                split.total,
                split.translational,
                split.rotational,
                split.potential,
                analysis::modified_energy(s, p),
                analysis::diagnostics::energy_rate_with(s, p, gn),
                tau.x,
                tau.y,
                tau.z,
                analysis::xi(s, p),
            ],
        );
    }
    out
}

/// Diagnostics CSV text; identities are evaluated against `lambda0`.
pub fn diagnostics_csv(samples: &[Sample], p: &Params, lambda0: f64) -> String {
    let mut out = String::new();
    out.push_str(DIAGNOSTICS_HEADER);
    out.push('\n');
    for smp in samples {
        let s = &smp.state;
        let row = analysis::diagnostic_row(smp.t, s, p, lambda0);
        let ident = analysis::phi_dot_identity_at(s, p, lambda0);
        let gap = analysis::etilde_minus_e(s, p);
        let fields = match row {
            Ok(r) => [
                r.t,
                r.gn,
                r.lambda,
                r.d,
                r.etilde,
                r.e,
                r.e_trans,
                r.e_rot,
                r.e_pot,
                r.e_dot,
                r.tau_x,
                r.tau_y,
                r.tau_z,
                r.xi,
                r.met_residual,
                r.phi_dot_identity_residual,
                ident.printed,
                gap.exact,
                gap.estimate,
            ],
            Err(_) => {
                let mut f = [f64::NAN; 19];
                f[0] = smp.t;
                f
            }
        };
        csv_line(&mut out, &fields);
    }
    out
}

fn max_rel_drift(values: impl Iterator<Item = f64>) -> f64 {
    let mut first = None;
    let mut worst: f64 = 0.0;
    for v in values {
        let f = *first.get_or_insert(v);
        worst = worst.max((v - f).abs() / f.abs());
    }
    worst
}

/// Plain-text summary of a finished run.
pub fn summary_text(run: &Run, report: &PhaseReport, p: &Params) -> String {
    let samples = run.trajectory.samples();
    let mut out = String::new();
    let Some(first) = samples.first() else {
        let _ = writeln!(out, "empty trajectory");
        return out;
    };
    let s0 = &first.state;
    let lambda0 = analysis::jellett(s0, p);
    let lam_drift = max_rel_drift(samples.iter().map(|s| analysis::jellett(&s.state, p)));
    let d_drift = max_rel_drift(samples.iter().map(|s| analysis::routh(&s.state, p)));
    let et_drift = max_rel_drift(samples.iter().map(|s| analysis::modified_energy(&s.state, p)));
    let energies: Vec<f64> = samples.iter().map(|s| analysis::energy_split(&s.state, p).total).collect();
    let max_rise = energies.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let last = samples.last().expect("non-empty");
    let fmt_t = |v: Option<f64>| v.map_or("not detected".to_string(), |t| format!("{t:.4} s"));

    let _ = writeln!(out, "span                  {} .. {} s ({} samples)", first.t, last.t, samples.len());
    let _ = writeln!(
        out,
        "steps                 {} accepted, {} rejected",
        run.stats.accepted_steps, run.stats.rejected_steps
    );
    match analysis::thresholds(p) {
        Ok(th) => {
            let _ = writeln!(
                out,
                "lambda(0)             {lambda0:.6e} ({:.4} x lambda_thres)",
                lambda0 / th.lambda_thres
            );
        }
        Err(_) => {
            let _ = writeln!(out, "lambda(0)             {lambda0:.6e}");
        }
    }
    let _ = writeln!(out, "lambda drift          {lam_drift:.3e} relative");
    let _ = writeln!(out, "D drift               {d_drift:.3e} relative");
    let _ = writeln!(out, "Etilde drift          {et_drift:.3e} relative");
    let _ = writeln!(
        out,
        "E(0) -> E(end)        {:.6e} -> {:.6e} J",
        energies[0],
        energies[energies.len() - 1]
    );
    if energies.len() > 1 {
        let _ = writeln!(out, "largest E increase    {:.3e} of E(0)", max_rise / energies[0]);
    }
    let _ = writeln!(out, "min g_n               {:.6} N", report.min_gn);
    let _ = writeln!(out, "t_init                {}", fmt_t(report.t_init));
    let _ = writeln!(out, "t_end                 {}", fmt_t(report.t_end));
    let _ = writeln!(out, "T_inv                 {}", fmt_t(report.t_inv));
    let _ = writeln!(out, "sync phase            {}", report.sync_phase_present);
    let _ = writeln!(out, "inverted              {}", report.inverted);
    let _ = writeln!(out, "smooth                {}", report.smooth());
    let _ = writeln!(
        out,
        "final state           theta {:.6} rad, omega3 {:.4} rad/s, phi_dot {:.4} rad/s",
        last.state.theta, last.state.omega3, last.state.phi_dot
    );
    match run.halt {
        Some(h) => {
            let _ = writeln!(out, "halt                  {} at t = {}", halt_code(h.reason), h.t);
        }
        None => {
            let _ = writeln!(out, "halt                  none");
        }
    }
    out
}

fn phase_json(run: &Run, report: &PhaseReport, p: &Params, lambda0: f64) -> String {
    let thres = analysis::thresholds(p).ok();
    let asym = analysis::asymptotic_constants(lambda0, p);
    let value = json!({
        "phases": report,
        "smooth": report.smooth(),
        "lambda0": lambda0,
        "lambda_thres": thres.map(|t| t.lambda_thres),
        "lambda_up": thres.and_then(|t| t.lambda_up),
        "asymptotic": {
            "D0": asym.d0,
            "D1": asym.d1,
            "Etilde0": asym.etilde0,
            "Etilde1": asym.etilde1,
            "L0": asym.l0,
            "L1": asym.l1,
            "omega3_upright": asym.omega3_upright(p),
            "omega3_inverted": asym.omega3_inverted(p),
            "T_upp_D0": analysis::t_upp(lambda0, asym.d0, p),
        },
        "halt": run.halt.map(|h| json!({"reason": halt_code(h.reason), "t": h.t})),
        "events": run.events.len(),
    });
    let mut s = serde_json::to_string_pretty(&value).expect("json values serialise");
    s.push('\n');
    s
}

/// Outcome of [`cmd_simulate`].
#[derive(Debug)]
pub struct SimulateOutcome {
    pub run: Run,
    pub report: PhaseReport,
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
}

/// Integrates the configured run and writes trajectory, diagnostics, phase
/// report and summary into `out_dir`. Halted runs still write their partial
/// output; the halt shows up in `exit_code`.
pub fn cmd_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<SimulateOutcome, CliError> {
    let p = cfg.params()?;
    let s0 = cfg.initial_state()?;
    let icfg = cfg.integration()?;
    let gates = cfg.gates()?;
    let run = integrator::integrate(&s0, &p, &icfg).map_err(|e| CliError {
        code: match e {
            integrator::IntegrationError::InvalidConfig { .. } => exit::CONFIG,
            _ => exit::NUMERICAL,
        },
        message: e.to_string(),
    })?;
    let report = analysis::detect_phases(&run.trajectory, &run.events, &p, &gates);
    let lambda0 = analysis::jellett(&s0, &p);
    let samples: Vec<Sample> = if cfg.output.include_steps {
        run.trajectory.samples().to_vec()
    } else {
        run.trajectory.grid_samples().copied().collect()
    };
    let o = &cfg.output;
    let files = vec![
        write_file(out_dir, &o.trajectory, &trajectory_csv(&samples, &p))?,
        write_file(out_dir, &o.diagnostics, &diagnostics_csv(&samples, &p, lambda0))?,
        write_file(out_dir, &o.phases, &phase_json(&run, &report, &p, lambda0))?,
        write_file(out_dir, &o.summary, &summary_text(&run, &report, &p))?,
    ];
    let exit_code = exit_code_for(run.halt);
    Ok(SimulateOutcome {
        run,
        report,
        files,
        exit_code,
    })
}

fn bool_field(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Sweep CSV text, one line per row in input order.
pub fn sweep_csv(rows: &[SweepRow], axis: sweep::SweepAxis) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let ph = r.phases.as_ref();
        let mut fields: Vec<String> = vec![r.index.to_string(), axis.name().to_string(), num(r.value)];
        fields.extend(r.initial.iter().map(|x| num(*x)));
        fields.extend([num(r.lambda), num(r.lambda_ratio), r.status.label().to_string()]);
        fields.extend([
            opt_num(ph.and_then(|p| p.t_init)),
            opt_num(ph.and_then(|p| p.t_end)),
            opt_num(ph.and_then(|p| p.t_inv)),
        ]);
        fields.extend(
            [
                r.flags.inverted,
                r.flags.smooth,
                r.flags.sync_phase_present,
                r.flags.gn_positive_throughout,
            ]
            .map(|b| bool_field(b).to_string()),
        );
        fields.extend([
            opt_num(ph.map(|p| p.min_gn)),
            num(r.max_abs_nu_x),
            num(r.max_abs_nu_y),
            num(r.max_abs_theta_dot),
            r.status.detail().replace([',', '\n'], ";"),
        ]);
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub files: Vec<PathBuf>,
}

/// Runs the configured sweep. Individual failures are recorded per row.
pub fn cmd_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<SweepOutcome, CliError> {
    let section = cfg.sweep.as_ref().ok_or_else(|| ConfigError::Invalid {
        field: "sweep".into(),
        reason: "section is required for the sweep command".into(),
    })?;
    let spec = SweepSpec {
        params: cfg.params()?,
        base: cfg.initial_state()?,
        axis: section.axis,
        values: section.resolve_values()?,
        integration: cfg.integration()?,
        gates: cfg.gates()?,
    };
    let rows = sweep::run_sweep(&spec).map_err(|e| CliError {
        code: exit::CONFIG,
        message: e.to_string(),
    })?;
    let files = vec![write_file(out_dir, &cfg.output.sweep, &sweep_csv(&rows, spec.axis))?];
    Ok(SweepOutcome { rows, files })
}

#[derive(Debug)]
pub struct PotentialOutcome {
    pub lambda: f64,
    pub minima: Vec<(f64, analysis::PotentialMinimum)>,
    pub files: Vec<PathBuf>,
}

/// Tabulates `V(z, D, λ)` for a family of Routh values and locates the
/// minimum for each.
pub fn cmd_potential(cfg: &RunConfig, out_dir: &Path) -> Result<PotentialOutcome, CliError> {
    let p = cfg.params()?;
    let pc = &cfg.potential;
    let lambda = match pc.lambda {
        Some(l) if l.is_finite() => l,
        Some(_) => {
            return Err(ConfigError::Invalid {
                field: "potential.lambda".into(),
                reason: "must be finite".into(),
            }
            .into())
        }
        None => analysis::jellett(&cfg.initial_state()?, &p),
    };
    let zs = pc.z_grid()?;
    let ds = match &pc.d_values {
        Some(v) if v.is_empty() => {
            return Err(ConfigError::Invalid {
                field: "potential.d_values".into(),
                reason: "must not be empty".into(),
            }
            .into())
        }
        Some(v) => v.clone(),
        None => {
            let a = analysis::asymptotic_constants(lambda, &p);
            sweep::linspace(a.d0, a.d1, pc.d_count)
        }
    };
    let lo = zs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = zs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut curves = String::new();
    curves.push_str(POTENTIAL_HEADER);
    curves.push('\n');
    let mut table = String::new();
    table.push_str(MINIMA_HEADER);
    table.push('\n');
    let mut minima = Vec::with_capacity(ds.len());
    for &d in &ds {
        for &z in &zs {
            let v = analysis::effective_potential(z, d, lambda, &p).map_err(|e| CliError {
                code: exit::CONFIG,
                message: e.to_string(),
            })?;
            csv_line(&mut curves, &[d, z, v]);
        }
        let m = analysis::potential_minimum(d, lambda, &p, (lo, hi)).map_err(|e| CliError {
            code: exit::CONFIG,
            message: e.to_string(),
        })?;
        let _ = writeln!(table, "{},{},{},{}", num(d), num(m.z), num(m.value), bool_field(m.interior));
        minima.push((d, m));
    }
    let files = vec![
        write_file(out_dir, &cfg.output.potential, &curves)?,
        write_file(out_dir, &cfg.output.minima, &table)?,
    ];
    Ok(PotentialOutcome { lambda, minima, files })
}
