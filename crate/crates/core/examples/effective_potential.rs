//! Tabulates the effective potential V(z, D, λ) of the reference top for a
//! few Routh values between the upright and inverted limits, and follows its
//! minimum as D decreases.

use tippe_top::analysis::{asymptotic_constants, effective_potential, jellett, potential_minimum, routh_offsets};
use tippe_top::{Params, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Params::reference();
    let lambda = jellett(&State::reference(), &p);
    let c = asymptotic_constants(lambda, &p);
    println!("lambda = {lambda:.6e}");
    println!("D0 = {:.6e}  D1 = {:.6e}", c.d0, c.d1);
    println!("Etilde0 = {:.6e}  Etilde1 = {:.6e}", c.etilde0, c.etilde1);

    let zs = [-0.99, -0.5, 0.0, 0.5, 0.99];
    print!("{:>13}", "D \\ z");
    for z in zs {
        print!("{z:>13.2}");
    }
    println!("{:>13}", "z_min");
    let (off0, off1) = routh_offsets(1e-8, &p);
    for k in 0..=8 {
        let d = (c.d0 - off0) + ((c.d1 + off1) - (c.d0 - off0)) * k as f64 / 8.0;
        print!("{d:>13.4e}");
        for z in zs {
            print!("{:>13.4e}", effective_potential(z, d, lambda, &p)?);
        }
        let m = potential_minimum(d, lambda, &p, (-1.0, 1.0))?;
        println!("{:>13.5}", m.z);
    }
    Ok(())
}
