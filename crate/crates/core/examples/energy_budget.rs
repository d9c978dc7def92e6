//! Energy budget of the reference run: the split into translational,
//! rotational and potential parts, the dissipation rate, the gap between
//! the modified energy and the energy, and the friction torque.
//!
//! Pass `--csv` to print every 0.1 s as CSV instead of a table.

use tippe_top::analysis::{energy_rate, energy_split, etilde_minus_e, modified_energy, torque, PhaseGates};
use tippe_top::{analysis, integrate, IntegrationConfig, Params, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let csv = std::env::args().any(|a| a == "--csv");
    let p = Params::reference();
    let s0 = State::reference();
    let run = integrate(&s0, &p, &IntegrationConfig::default())?;
    let report = analysis::detect_phases(&run.trajectory, &run.events, &p, &PhaseGates::default());

    if csv {
        println!("t,theta,E,E_trans,E_rot,E_pot,E_dot,Etilde,Etilde_minus_E,tau_x,tau_y,tau_z");
    } else {
        println!(
            "{:>5} {:>7} {:>10} {:>10} {:>10} {:>10} {:>11} {:>11} {:>11}",
            "t", "theta", "E", "E_trans", "E_rot", "E_pot", "E_dot", "Et-E", "tau_y"
        );
    }
    for smp in run.trajectory.resample(0.1) {
        let s = &smp.state;
        let e = energy_split(s, &p);
        // `+ 0.0` turns a zero rate's negative sign positive.
        let edot = energy_rate(s, &p)? + 0.0;
        let gap = etilde_minus_e(s, &p).exact;
        let tau = torque(s, &p)?;
        if csv {
            println!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                smp.t,
                s.theta,
                e.total,
                e.translational,
                e.rotational,
                e.potential,
                edot,
                modified_energy(s, &p),
                gap,
                tau.x,
                tau.y,
                tau.z
            );
        } else {
            println!(
                "{:>5.1} {:>7.4} {:>10.4e} {:>10.3e} {:>10.4e} {:>10.4e} {:>11.3e} {:>11.3e} {:>11.3e}",
                smp.t, s.theta, e.total, e.translational, e.rotational, e.potential, edot, gap, tau.y
            );
        }
    }
    if !csv {
        let first = energy_split(&s0, &p);
        let last = energy_split(&run.trajectory.last().expect("non-empty run").state, &p);
        println!();
        println!("climb {:?} .. {:?}", report.t_init, report.t_end);
        println!("E dissipated: {:.3e} J of {:.3e} J", first.total - last.total, first.total);
        println!("E_pot gained: {:.3e} J", last.potential - first.potential);
    }
    Ok(())
}
