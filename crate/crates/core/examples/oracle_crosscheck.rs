//! Compares the Euler-angle right-hand side with the Newton–Euler vector
//! form on random states and reports the worst disagreement.
//!
//! Usage: `oracle_crosscheck [count] [seed]`.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tippe_top::dynamics::{euler_rate_to_vector, vector_rhs};
use tippe_top::model::{euler_to_vector, vector_to_euler};
use tippe_top::{euler_rhs, Params, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let count: usize = args.first().map_or(Ok(1000), |a| a.parse())?;
    let mut rng = StdRng::seed_from_u64(args.get(1).map_or(Ok(1), |a| a.parse())?);
    let p = Params::reference();
    let (mut worst_rhs, mut worst_trip) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let s = State::new(
            rng.random_range(0.05..3.09),
            rng.random_range(-10.0..10.0),
            rng.random_range(-300.0..300.0),
            rng.random_range(-200.0..200.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        );
        let phi = rng.random_range(-3.1..3.1);
        let a = euler_rate_to_vector(&s, &euler_rhs(&s, &p)?, &p, phi);
        let b = vector_rhs(&euler_to_vector(&s, &p, phi), &p)?;
        for (x, y) in [(a.angular_momentum, b.angular_momentum), (a.axis3, b.axis3), (a.v_a, b.v_a)] {
            worst_rhs = worst_rhs.max((x - y).norm() / x.norm().max(y.norm()));
        }
        let (back, _) = vector_to_euler(&euler_to_vector(&s, &p, phi), &p)?;
        for (x, y) in s.to_array().iter().zip(back.to_array()) {
            worst_trip = worst_trip.max((x - y).abs() / x.abs().max(1.0));
        }
    }
    println!("{count} states");
    println!("Euler vs vector right-hand side: {worst_rhs:.3e} relative");
    println!("state round trip:               {worst_trip:.3e} relative");
    Ok(())
}
