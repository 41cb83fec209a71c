//! The reflection `(u, v) -> (-u, 1 - v)` maps orbits at `(a, b, c)` onto
//! orbits at `(a, b, b - a - c)`.
//!
//! ```text
//! cargo run --example symmetry
//! ```

use twoneuron::dynamics::integrate_with;
use twoneuron::dynamics::{IntegrateOptions, IntegratorConfig};
use twoneuron::model::reflect_state;
use twoneuron::{symmetry_conjugate, Params, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Params::new(6.0, 3.0, 0.4)?;
    let q = symmetry_conjugate(&p);
    println!("{p:?} mirrors to {q:?}");

    let opts = IntegrateOptions {
        integrator: IntegratorConfig::with_tolerances(1e-10, 1e-12),
        sample_dt: Some(1.0),
        ..IntegrateOptions::default()
    };
    let s0 = State::new(2.5, 0.1);
    let x = integrate_with(&p, s0.to_array(), 20.0, &opts)?;
    let y = integrate_with(&q, reflect_state(s0).to_array(), 20.0, &opts)?;
    for (a, b) in x.samples.iter().zip(&y.samples).step_by(4) {
        let r = reflect_state(State::new(b.u, b.v));
        println!(
            "t = {:>4}: ({:+.8}, {:.8}) vs mirrored ({:+.8}, {:.8})",
            a.t, a.u, a.v, r.u, r.v
        );
    }
    Ok(())
}
