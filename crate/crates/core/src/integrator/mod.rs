//! Adaptive integration of the Euler-angle equations with dense output and
//! event detection.
//!
//! The azimuth `φ` is integrated alongside the six dynamical variables so
//! that inertial-frame quantities can be reconstructed from a trajectory.

pub mod dopri;

use thiserror::Error;

use crate::dynamics::{self, DynamicsError};
use crate::model::{Params, State};
use dopri::{Control, DenseSegment, OdeSystem, SolveError, StepControl, StepStats};

/// `|sinθ|` below which a run is stopped as having reached a pole.
pub const POLE_HALT: f64 = 1e-8;
/// Width of the bracket an event time is refined to.
pub const EVENT_RESOLUTION: f64 = 1e-9;

const DIM: usize = 7;

/// What to do when the normal force stops pushing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GnPolicy {
    #[default]
    Halt,
    Warn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub t0: f64,
    pub t1: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_out: f64,
    pub max_step: f64,
    pub gn_policy: GnPolicy,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t1: 10.0,
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            dt_out: 1e-3,
            max_step: 1e-2,
            gn_policy: GnPolicy::Halt,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<(), IntegrationError> {
        let bad = |field: &'static str, reason: &'static str| Err(IntegrationError::InvalidConfig { field, reason });
        if !(self.t0.is_finite() && self.t1.is_finite()) {
            return bad("t0/t1", "must be finite");
        }
        // An empty span is allowed and yields an empty trajectory.
        if self.t1 < self.t0 {
            return bad("t1", "must not precede t0");
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("rel_tol/abs_tol", "must be positive");
        }
        if !(self.dt_out > 0.0 && self.dt_out.is_finite()) {
            return bad("dt_out", "must be positive");
        }
        if !(self.max_step > 0.0) {
            return bad("max_step", "must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("invalid integration config `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: &'static str },
    #[error("invalid initial state: {0}")]
    InvalidInitialState(DynamicsError),
    #[error("time {t} is outside the trajectory span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
}

/// One trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    /// Azimuth of the rotating frame (rad).
    pub phi: f64,
    /// `true` for samples on the `t0 + k·dt_out` grid, `false` for step
    /// endpoints in between.
    pub on_grid: bool,
}

/// Time-ordered samples plus the continuous extension of every accepted step.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    samples: Vec<Sample>,
    segments: Vec<DenseSegment<DIM>>,
}

impl Trajectory {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Samples on the uniform output grid only.
    pub fn grid_samples(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(|s| s.on_grid)
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.t, self.samples.last()?.t))
    }

    /// State and azimuth at `t`. Stored samples are returned verbatim.
    pub fn dense_eval_with_phi(&self, t: f64) -> Result<(State, f64), IntegrationError> {
        let (start, end) = self.span().ok_or(IntegrationError::OutOfRange {
            t,
            start: f64::NAN,
            end: f64::NAN,
        })?;
        if !(t >= start && t <= end) {
            return Err(IntegrationError::OutOfRange { t, start, end });
        }
        if let Ok(i) = self.samples.binary_search_by(|s| s.t.total_cmp(&t)) {
            let s = &self.samples[i];
            return Ok((s.state, s.phi));
        }
        let idx = self.segments.partition_point(|seg| seg.t_end() < t);
        let seg = self.segments.get(idx).ok_or(IntegrationError::OutOfRange { t, start, end })?;
        let y = seg.eval(t);
        Ok((state_of(&y), y[6]))
    }

    /// Resamples the run on a uniform grid of spacing `dt` starting at the
    /// first sample.
    pub fn resample(&self, dt: f64) -> Vec<Sample> {
        let Some((start, end)) = self.span() else {
            return Vec::new();
        };
        let n = ((end - start) / dt + 1e-9).floor() as usize;
        (0..=n)
            .filter_map(|k| {
                let t = start + k as f64 * dt;
                self.dense_eval_with_phi(t).ok().map(|(state, phi)| Sample {
                    t,
                    state,
                    phi,
                    on_grid: true,
                })
            })
            .collect()
    }
}

pub fn dense_eval(traj: &Trajectory, t: f64) -> Result<State, IntegrationError> {
    traj.dense_eval_with_phi(t).map(|(s, _)| s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    PhiDotZeroCrossing,
    ThetaLocalMin,
    ThetaLocalMax,
    GnNonPositive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub state: State,
    /// Times at which the event function has opposite signs (or reaches zero
    /// at the upper end); `bracket.1 - bracket.0 <= EVENT_RESOLUTION`.
    pub bracket: (f64, f64),
    /// Sign of the event function after the crossing.
    pub rising: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    NonPositiveNormalForce,
    PoleApproach,
    StepUnderflow,
    RhsFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halt {
    pub reason: HaltReason,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    /// Largest error estimate of any accepted step (weighted RMS norm).
    pub max_error_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub trajectory: Trajectory,
    pub events: Vec<Event>,
    pub halt: Option<Halt>,
    pub stats: RunStats,
}

impl Run {
    pub fn completed(&self) -> bool {
        self.halt.is_none()
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

struct TopSystem<'a> {
    params: &'a Params,
}

impl OdeSystem<DIM> for TopSystem<'_> {
    type Error = DynamicsError;

    fn rhs(&self, _t: f64, y: &[f64; DIM]) -> Result<[f64; DIM], DynamicsError> {
        let s = state_of(y);
        let d = dynamics::euler_rhs(&s, self.params)?;
        Ok([d.d_theta, d.d_theta_dot, d.d_phi_dot, d.d_omega3, d.d_nu_x, d.d_nu_y, s.phi_dot])
    }
}

fn state_of(y: &[f64; DIM]) -> State {
    State::new(y[0], y[1], y[2], y[3], y[4], y[5])
}

fn pack(s: &State, phi: f64) -> [f64; DIM] {
    let a = s.to_array();
    [a[0], a[1], a[2], a[3], a[4], a[5], phi]
}

fn crosses(a: f64, b: f64) -> bool {
    (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)
}

/// Bisects `f` on `[lo, hi]` given opposite signs at the ends.
fn refine(mut lo: f64, mut hi: f64, f_lo: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let negative_lo = f_lo < 0.0;
    while hi - lo > EVENT_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v < 0.0) == negative_lo && v != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn normal_force_or_nan(s: &State, p: &Params) -> f64 {
    dynamics::normal_force(s, p).map(|g| g.value()).unwrap_or(f64::NAN)
}

/// Integrates the top from `s0` (with `φ(t0) = 0`).
///
/// Invalid configuration or an initial state the equations refuse are
/// errors; failures during the run stop it and are reported in
/// [`Run::halt`] alongside the partial trajectory.
pub fn integrate(s0: &State, p: &Params, cfg: &IntegrationConfig) -> Result<Run, IntegrationError> {
    integrate_from(s0, 0.0, p, cfg)
}

pub fn integrate_from(s0: &State, phi0: f64, p: &Params, cfg: &IntegrationConfig) -> Result<Run, IntegrationError> {
    cfg.validate()?;
    if !s0.is_finite() {
        return Err(IntegrationError::InvalidInitialState(DynamicsError::NonFinite));
    }
    if cfg.t1 == cfg.t0 {
        return Ok(Run {
            trajectory: Trajectory::default(),
            events: Vec::new(),
            halt: None,
            stats: RunStats::default(),
        });
    }
    dynamics::euler_rhs(s0, p).map_err(IntegrationError::InvalidInitialState)?;
    if s0.theta.sin().abs() < POLE_HALT {
        return Err(IntegrationError::InvalidInitialState(DynamicsError::PoleApproach {
            theta: s0.theta,
        }));
    }

    let system = TopSystem { params: p };
    let ctl = StepControl::new(cfg.rel_tol, cfg.abs_tol, cfg.max_step);
    let mut stats = StepStats::default();
    let mut samples = vec![Sample {
        t: cfg.t0,
        state: *s0,
        phi: phi0,
        on_grid: true,
    }];
    let mut segments: Vec<DenseSegment<DIM>> = Vec::new();
    let mut events = Vec::new();
    let mut halt = None;
    let mut max_error_norm: f64 = 0.0;
    let mut next_grid: u64 = 1;
    let mut gn_prev = normal_force_or_nan(s0, p);
    if gn_prev <= 0.0 && cfg.gn_policy == GnPolicy::Halt {
        halt = Some(Halt {
            reason: HaltReason::NonPositiveNormalForce,
            t: cfg.t0,
        });
    }

    let result = if halt.is_some() {
        Ok((cfg.t0, pack(s0, phi0)))
    } else {
        dopri::solve(&system, cfg.t0, pack(s0, phi0), cfg.t1, &ctl, &mut stats, |step| {
            let seg = step.segment;
            max_error_norm = max_error_norm.max(step.error_norm);
            let (ta, tb) = (seg.t, seg.t_end());
            let (ya, yb) = (step.y_start, step.y_end);
            let mut t_stop = tb;
            let mut flow = Control::Continue;

            // Normal force first: a halt truncates everything after it.
            let s_end = state_of(yb);
            let gn_end = normal_force_or_nan(&s_end, p);
            if gn_prev > 0.0 && !(gn_end > 0.0) {
                let gn_at = |t: f64| {
                    let v = normal_force_or_nan(&state_of(&seg.eval(t)), p);
                    if v.is_nan() {
                        -1.0
                    } else {
                        v
                    }
                };
                let (lo, hi) = refine(ta, tb, gn_prev, gn_at);
                events.push(Event {
                    kind: EventKind::GnNonPositive,
                    t: hi,
                    state: state_of(&seg.eval(hi)),
                    bracket: (lo, hi),
                    rising: false,
                });
                if cfg.gn_policy == GnPolicy::Halt {
                    t_stop = hi;
                    flow = Control::Stop;
                    halt = Some(Halt {
                        reason: HaltReason::NonPositiveNormalForce,
                        t: hi,
                    });
                }
            }
            gn_prev = gn_end;

            for (index, kind_rising, kind_falling) in [
                (2usize, EventKind::PhiDotZeroCrossing, EventKind::PhiDotZeroCrossing),
                (1usize, EventKind::ThetaLocalMin, EventKind::ThetaLocalMax),
            ] {
                if crosses(ya[index], yb[index]) {
                    let (lo, hi) = refine(ta, tb, ya[index], |t| seg.eval(t)[index]);
                    if hi <= t_stop {
                        let rising = ya[index] < 0.0;
                        events.push(Event {
                            kind: if rising { kind_rising } else { kind_falling },
                            t: 0.5 * (lo + hi),
                            state: state_of(&seg.eval(0.5 * (lo + hi))),
                            bracket: (lo, hi),
                            rising,
                        });
                    }
                }
            }

            loop {
                let tg = cfg.t0 + next_grid as f64 * cfg.dt_out;
                if tg > t_stop || tg > cfg.t1 {
                    break;
                }
                let y = if tg == tb { *yb } else { seg.eval(tg) };
                samples.push(Sample {
                    t: tg,
                    state: state_of(&y),
                    phi: y[6],
                    on_grid: true,
                });
                next_grid += 1;
            }
            let last_t = samples.last().map(|s| s.t).unwrap_or(f64::NEG_INFINITY);
            if t_stop > last_t {
                let y = if t_stop == tb { *yb } else { seg.eval(t_stop) };
                samples.push(Sample {
                    t: t_stop,
                    state: state_of(&y),
                    phi: y[6],
                    on_grid: false,
                });
            }
            segments.push(seg.clone());

            if flow == Control::Continue && s_end.theta.sin().abs() < POLE_HALT {
                halt = Some(Halt {
                    reason: HaltReason::PoleApproach,
                    t: tb,
                });
                flow = Control::Stop;
            }
            flow
        })
    };

    match result {
        Ok(_) => {}
        Err(SolveError::StepUnderflow { t, .. }) | Err(SolveError::TooManySteps { t }) => {
            halt = Some(Halt {
                reason: HaltReason::StepUnderflow,
                t,
            })
        }
        Err(SolveError::Rhs { t, error }) => {
            halt = Some(Halt {
                reason: match error {
                    DynamicsError::PoleApproach { .. } => HaltReason::PoleApproach,
                    _ => HaltReason::RhsFailure,
                },
                t,
            })
        }
    }

    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(Run {
        trajectory: Trajectory { samples, segments },
        events,
        halt,
        stats: RunStats {
            accepted_steps: stats.accepted,
            rejected_steps: stats.rejected,
            rhs_evals: stats.rhs_evals,
            max_error_norm,
        },
    })
}
