//! Three nested limit cycles around an unstable focus, and a trajectory that
//! starts between the inner two and settles on the innermost.
//!
//! ```text
//! cargo run --release --example limit_cycles -- [trajectory.csv]
//! ```

use std::fs::File;

use twoneuron::dynamics::{find_cycles, integrate, Stability};
use twoneuron::{equilibria, Params, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Params::new(16.0, 130.0, 111.165)?;
    let eq = equilibria(&p, 1e-13)[0];
    println!("equilibrium ({:.6}, {:.6}) {:?}", eq.u0, eq.v0, eq.kind);

    let cycles = find_cycles(&p, &eq, None);
    for c in &cycles {
        println!(
            "  cycle r = {:.6}  period {:.4}  {:?}  dP/dr {:.6}",
            c.section_radius, c.period, c.stability, c.floquet_slope
        );
    }

    let stable: Vec<_> = cycles.iter().filter(|c| c.stability == Stability::Stable).collect();
    let unstable = cycles.iter().find(|c| c.stability == Stability::Unstable);
    if let (Some(inner), Some(middle)) = (stable.first(), unstable) {
        // halfway between the inner stable cycle and the unstable one
        let s0 = State::new(
            (inner.crossing.u + middle.crossing.u) / 2.0,
            (inner.crossing.v + middle.crossing.v) / 2.0,
        );
        let traj = integrate(&p, s0, 60.0, 1e-10, 1e-12)?;
        println!("trajectory from ({:.4}, {:.4}) ends at {:?}", s0.u, s0.v, traj.last());
        if let Some(path) = std::env::args().nth(1) {
            traj.write_csv(File::create(&path)?)?;
            println!("wrote {} samples to {path}", traj.samples.len());
        }
    }
    Ok(())
}
