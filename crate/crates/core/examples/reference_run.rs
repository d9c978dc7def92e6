//! Integrates the reference top for ten seconds and prints the headline
//! numbers of the inversion.

use std::time::Instant;

use tippe_top::analysis::{self, PhaseGates};
use tippe_top::integrator::{self, IntegrationConfig};
use tippe_top::{Params, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Params::reference();
    let s0 = State::reference();
    let cfg = IntegrationConfig::default();

    let start = Instant::now();
    let run = integrator::integrate(&s0, &p, &cfg)?;
    let elapsed = start.elapsed();

    let traj = &run.trajectory;
    let lambda0 = analysis::jellett(&s0, &p);
    let thres = analysis::thresholds(&p)?;
    let drift = traj
        .samples()
        .iter()
        .map(|s| (analysis::jellett(&s.state, &p) - lambda0).abs())
        .fold(0.0, f64::max);
    let report = analysis::detect_phases(traj, &run.events, &p, &PhaseGates::default());
    let last = traj.last().expect("non-empty run");
    let asym = analysis::asymptotic_constants(lambda0, &p);
    let e_pot_8 = analysis::energy_split(&integrator::dense_eval(traj, 8.0)?, &p).potential;
    let e_pot_0 = analysis::energy_split(&s0, &p).potential;

    println!("wall clock          {:.3} s", elapsed.as_secs_f64());
    println!(
        "steps               {} accepted, {} rejected",
        run.stats.accepted_steps, run.stats.rejected_steps
    );
    println!(
        "lambda(0)           {lambda0:.6e}  ({:.4} x threshold)",
        lambda0 / thres.lambda_thres
    );
    println!("lambda drift        {:.3e} relative", drift / lambda0);
    println!("t_init              {:?}", report.t_init);
    println!("t_end               {:?}", report.t_end);
    println!("T_inv               {:?}", report.t_inv);
    println!("theta-dot reversals {:?}", report.climb_oscillations);
    println!("min g_n             {:.6} N", report.min_gn);
    println!("E_pot(8)/E_pot(0)   {:.5}", e_pot_8 / e_pot_0);
    println!(
        "omega3(10)          {:.3} rad/s (limit {:.3})",
        last.state.omega3,
        asym.omega3_inverted(&p)
    );
    println!("theta(10)           {:.5} rad", last.state.theta);
    println!("inverted            {}", report.inverted);
    Ok(())
}
