//! Shared fixtures for the integration tests.
#![allow(dead_code)]

pub mod kinematics;

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use tippe_top::analysis::{self, PhaseGates, PhaseReport};
use tippe_top::{integrate, IntegrationConfig, Params, Run, State};

pub struct Reference {
    pub params: Params,
    pub s0: State,
    pub run: Run,
    pub report: PhaseReport,
    pub elapsed: Duration,
}

/// The reference top from its reference initial condition over `[0, 10]` s
/// with default integrator settings, computed once per test binary.
pub fn reference() -> &'static Reference {
    static CELL: OnceLock<Reference> = OnceLock::new();
    CELL.get_or_init(|| {
        let params = Params::reference();
        let s0 = State::reference();
        let start = Instant::now();
        let run = integrate(&s0, &params, &IntegrationConfig::default()).expect("reference run integrates");
        let elapsed = start.elapsed();
        let report = analysis::detect_phases(&run.trajectory, &run.events, &params, &PhaseGates::default());
        Reference {
            params,
            s0,
            run,
            report,
            elapsed,
        }
    })
}

/// Prints a `PASS`/`FAIL` line for an acceptance criterion, then asserts it.
/// Writes to the process's stderr directly so the line survives output
/// capture of passing tests.
pub fn verdict(name: &str, pass: bool, detail: String) {
    let _ = writeln!(std::io::stderr(), "{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}
