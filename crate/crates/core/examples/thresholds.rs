//! Prints the inversion thresholds and asymptotic constants for the
//! reference top, or for a top given as `m R alpha I1 I3 [mu]` on the
//! command line.

use tippe_top::analysis::{asymptotic_constants, jellett, t_upp, thresholds};
use tippe_top::model::rationality_check;
use tippe_top::{Params, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let r = Params::reference();
    let p = match args.as_slice() {
        [] => r,
        [m, rad, alpha, i1, i3] => Params::new(*m, *rad, *alpha, *i1, *i3, r.g(), r.mu())?,
        [m, rad, alpha, i1, i3, mu] => Params::new(*m, *rad, *alpha, *i1, *i3, r.g(), *mu)?,
        _ => return Err("expected no arguments or: m R alpha I1 I3 [mu]".into()),
    };
    println!("gamma = I1/I3 = {:.6}  sigma = mR^2/I3 = {:.6}", p.gamma(), p.sigma());
    println!("inversion window 1 - alpha < gamma < 1 + alpha: {}", p.inversion_window_holds());
    let rat = rationality_check(&p, 1e-12);
    println!(
        "rationality: printed form holds {}, alternative form holds {}",
        rat.printed_holds, rat.alternative_holds
    );

    let th = thresholds(&p)?;
    println!("lambda_thres = {:.6e}", th.lambda_thres);
    match th.lambda_up {
        Some(up) => println!("lambda_up    = {up:.6e}"),
        None => println!("lambda_up    = (not defined for these parameters)"),
    }
    if let Some(ok) = th.ordering_holds {
        println!("lambda_thres > lambda_up: {ok}");
    }

    let lambda = jellett(&State::reference(), &p);
    let c = asymptotic_constants(lambda, &p);
    println!(
        "reference IC: lambda = {lambda:.6e} ({:.4} x lambda_thres)",
        lambda / th.lambda_thres
    );
    println!("L0 = {:.6e}  L1 = {:.6e}", c.l0, c.l1);
    println!("D0 = {:.6e}  D1 = {:.6e}", c.d0, c.d1);
    println!("Etilde0 = {:.6e}  Etilde1 = {:.6e}", c.etilde0, c.etilde1);
    println!(
        "omega3 upright = {:.4}  inverted = {:.4} rad/s",
        c.omega3_upright(&p),
        c.omega3_inverted(&p)
    );
    match t_upp(lambda, c.d0, &p) {
        Some(t) => println!("T_upp(D0) = {t:.6} s"),
        None => println!("T_upp(D0) undefined"),
    }
    Ok(())
}
