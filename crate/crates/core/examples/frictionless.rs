//! Spins the reference top on a frictionless table (μ = 0). Energy and the
//! Jellett integral stay constant; the Routh function and the modified
//! energy do not, because the contact point is still free to glide.

use tippe_top::analysis::{energy_split, jellett, modified_energy, routh, PhaseGates};
use tippe_top::{analysis, integrate, IntegrationConfig, Params, State};

type Quantity = fn(&State, &Params) -> f64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Params::reference().with_mu(0.0)?;
    let s0 = State::reference();
    let run = integrate(&s0, &p, &IntegrationConfig::default())?;
    let quantities: [(&str, Quantity); 4] = [
        ("lambda", jellett),
        ("E", |s, p| energy_split(s, p).total),
        ("D", routh),
        ("Etilde", modified_energy),
    ];
    println!("{:>8} {:>14} {:>14}", "", "initial", "max rel drift");
    for (name, f) in quantities {
        let f0 = f(&s0, &p);
        let drift = run
            .trajectory
            .samples()
            .iter()
            .fold(0.0f64, |m, smp| m.max((f(&smp.state, &p) - f0).abs()))
            / f0.abs();
        println!("{name:>8} {f0:>14.6e} {drift:>14.3e}");
    }
    let glide = run
        .trajectory
        .samples()
        .iter()
        .fold(0.0f64, |m, smp| m.max(smp.state.nu_x.hypot(smp.state.nu_y)));
    let report = analysis::detect_phases(&run.trajectory, &run.events, &p, &PhaseGates::default());
    println!("largest gliding speed {glide:.3e} m/s; inverted = {}", report.inverted);
    Ok(())
}
