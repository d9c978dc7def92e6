//! Sweeps the initial precession rate and tabulates the phase times.
//!
//! Options: `--step <rad/s>` grid spacing (default 5), `--theta0 <rad>`
//! initial tilt (default 0.1), `--halt` to stop runs whose normal force
//! vanishes instead of integrating through.

use tippe_top::analysis::PhaseGates;
use tippe_top::integrator::{GnPolicy, IntegrationConfig};
use tippe_top::sweep::{self, SweepAxis, SweepSpec};
use tippe_top::{Params, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let opt = |name: &str, default: f64| -> Result<f64, Box<dyn std::error::Error>> {
        match args.iter().position(|a| a == name) {
            Some(i) => Ok(args.get(i + 1).ok_or(format!("{name} needs a value"))?.parse()?),
            None => Ok(default),
        }
    };
    let step = opt("--step", 5.0)?;
    let theta0 = opt("--theta0", 0.1)?;
    let gn_policy = if args.iter().any(|a| a == "--halt") {
        GnPolicy::Halt
    } else {
        GnPolicy::Warn
    };
    let n = (400.0 / step) as usize + 1;
    let spec = SweepSpec {
        params: Params::reference(),
        base: State {
            theta: theta0,
            ..State::reference()
        },
        axis: SweepAxis::PhiDot0,
        values: sweep::linspace(-200.0, 200.0, n),
        integration: IntegrationConfig {
            gn_policy,
            ..Default::default()
        },
        gates: PhaseGates::default(),
    };
    let rows = sweep::run_sweep(&spec)?;
    println!(
        "{:>8} {:>8} {:>8} {:>8} {:>6} {:>6} {:>6} {:>6}",
        "phi_dot0", "lam/thr", "t_init", "t_end", "inv", "smooth", "sync", "gn>0"
    );
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |t| format!("{t:.3}"));
    for r in &rows {
        let ph = r.phases.as_ref();
        println!(
            "{:>8.1} {:>8.4} {:>8} {:>8} {:>6} {:>6} {:>6} {:>6}",
            r.value,
            r.lambda_ratio,
            fmt(ph.and_then(|p| p.t_init)),
            fmt(ph.and_then(|p| p.t_end)),
            r.flags.inverted,
            r.flags.smooth,
            r.flags.sync_phase_present,
            r.flags.gn_positive_throughout
        );
    }
    Ok(())
}
