//! Detection of the initiation and ending times of an inversion.
//!
//! Inversion starts at the last upward zero crossing of `φ̇` near the
//! upright pole before the axis passes the equator, and ends at the first
//! crossing near the inverted pole after it. Only crossings inside a burst
//! of large `φ̇` oscillation count.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::dynamics;
use crate::integrator::{Event, EventKind, Trajectory};
use crate::model::Params;

/// Thresholds that turn the verbal phase definitions into tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseGates {
    /// Initiation crossings must have `θ` below this (rad).
    pub theta_low: f64,
    /// Ending crossings must have `θ` above `π − theta_high` (rad).
    pub theta_high: f64,
    /// Minimum `max |φ̇|` around a crossing (rad/s).
    pub amplitude_min: f64,
    /// Half-width of the amplitude window (s).
    pub window: f64,
    /// A synchronisation phase is present when initiation comes later than this (s).
    pub sync_min: f64,
    /// Axis threshold for θ̇ oscillation counting in the smooth test (rad).
    pub smooth_from: f64,
}

impl Default for PhaseGates {
    fn default() -> Self {
        Self {
            theta_low: 0.5,
            theta_high: 0.5,
            amplitude_min: 50.0,
            window: 0.2,
            sync_min: 0.2,
            smooth_from: 0.8,
        }
    }
}

/// Final-state criteria for an inverted top.
pub const INVERTED_THETA_MARGIN: f64 = 0.3;
pub const INVERTED_THETA_DOT_MAX: f64 = 0.5;
/// Most `θ̇` sign changes a smooth climb may have.
pub const SMOOTH_MAX_SIGN_CHANGES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub t_init: Option<f64>,
    pub t_end: Option<f64>,
    pub t_inv: Option<f64>,
    /// First time `θ > π/2`.
    pub t_equator: Option<f64>,
    pub sync_phase_present: bool,
    pub inverted: bool,
    pub min_gn: f64,
    /// `θ̇` sign changes within `[t_init, t_end]`.
    pub climb_oscillations: Option<usize>,
    /// `θ̇` sign changes between `θ` first exceeding `smooth_from` and first
    /// exceeding `π − theta_high`.
    pub late_oscillations: Option<usize>,
}

impl PhaseReport {
    pub fn smooth(&self) -> bool {
        self.late_oscillations.is_some_and(|n| n <= SMOOTH_MAX_SIGN_CHANGES)
    }
}

fn first_time_above(traj: &Trajectory, level: f64) -> Option<f64> {
    traj.samples().iter().find(|s| s.state.theta > level).map(|s| s.t)
}

fn phi_dot_amplitude(traj: &Trajectory, t: f64, window: f64) -> f64 {
    let s = traj.samples();
    let lo = s.partition_point(|x| x.t < t - window);
    let hi = s.partition_point(|x| x.t <= t + window);
    s[lo..hi].iter().fold(0.0, |m, x| m.max(x.state.phi_dot.abs()))
}

fn count_extrema(events: &[Event], from: f64, to: f64) -> usize {
    events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::ThetaLocalMin | EventKind::ThetaLocalMax) && e.t >= from && e.t <= to)
        .count()
}

pub fn detect_phases(traj: &Trajectory, events: &[Event], p: &Params, gates: &PhaseGates) -> PhaseReport {
    let min_gn = traj
        .samples()
        .iter()
        .filter_map(|s| dynamics::normal_force(&s.state, p).ok().map(|g| g.value()))
        .fold(f64::INFINITY, f64::min);
    let Some(first) = traj.first() else {
        return PhaseReport {
            t_init: None,
            t_end: None,
            t_inv: None,
            t_equator: None,
            sync_phase_present: false,
            inverted: false,
            min_gn,
            climb_oscillations: None,
            late_oscillations: None,
        };
    };
    let last = traj.last().expect("non-empty");
    let t_equator = first_time_above(traj, FRAC_PI_2);
    let burst = |e: &Event| phi_dot_amplitude(traj, e.t, gates.window) > gates.amplitude_min;
    let crossings = events.iter().filter(|e| e.kind == EventKind::PhiDotZeroCrossing);

    let t_init = t_equator.map(|te| {
        crossings
            .clone()
            .rev()
            .find(|e| e.t < te && e.rising && e.state.theta < gates.theta_low && burst(e))
            .map_or(first.t, |e| e.t)
    });
    let t_end = t_equator.and_then(|te| {
        crossings
            .clone()
            .find(|e| e.t > te && e.state.theta > PI - gates.theta_high && burst(e))
            .map(|e| e.t)
    });
    let t_inv = t_init.zip(t_end).map(|(a, b)| b - a);
    let inverted = last.state.theta > PI - INVERTED_THETA_MARGIN && last.state.theta_dot.abs() < INVERTED_THETA_DOT_MAX;
    let climb_oscillations = t_init.zip(t_end).map(|(a, b)| count_extrema(events, a, b));
    let late_oscillations = first_time_above(traj, gates.smooth_from)
        .zip(first_time_above(traj, PI - gates.theta_high))
        .map(|(a, b)| count_extrema(events, a, b));

    PhaseReport {
        t_init,
        t_end,
        t_inv,
        t_equator,
        sync_phase_present: t_init.is_some_and(|t| t - first.t > gates.sync_min),
        inverted,
        min_gn,
        climb_oscillations,
        late_oscillations,
    }
}
