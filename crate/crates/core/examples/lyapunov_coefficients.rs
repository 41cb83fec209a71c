//! First three Lyapunov coefficients along the Hopf manifold, from the closed
//! form in `(theta, d)` and from the generic Liénard formulas.
//!
//! ```text
//! cargo run --example lyapunov_coefficients
//! ```

use twoneuron::lyapunov::{cross_check, generic_scale};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>10} {:>8} {:>14} {:>14} {:>14} {:>14}  agree",
        "theta", "d", "l1", "l2", "l3", "generic l1"
    );
    for theta in [0.05, 0.3, 1.0, 2.0, 13.6349] {
        for d in [-5.0, 0.0, 0.4] {
            let x = cross_check(theta, d, 1e-8)?;
            let k = generic_scale(theta);
            println!(
                "{theta:>10} {d:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}  {:?}",
                x.closed.l1,
                x.closed.l2,
                x.closed.l3,
                x.generic.l1 / k[0],
                x.agree
            );
        }
    }
    Ok(())
}
