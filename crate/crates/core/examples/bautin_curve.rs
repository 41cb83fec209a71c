//! Samples the Bautin curve `l1 = 0`, marks where the second coefficient
//! changes sign and checks the `vartheta <-> 1 / vartheta` reflection.
//!
//! ```text
//! cargo run --example bautin_curve
//! ```

use twoneuron::lyapunov::{bautin_curve, l2bar_roots, lyapunov_closed};
use twoneuron::symmetry_conjugate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (t1, t2) = l2bar_roots();
    println!("l2bar vanishes at vartheta = {t1:.12} and {t2:.12}");
    for t in [t1, t2] {
        let bp = bautin_curve(t)?;
        let l3 = lyapunov_closed(t, bp.d())?.l3;
        println!("  (a, b, c) = ({:.6}, {:.6}, {:.6}), l3 = {l3:.4e}", bp.a, bp.b, bp.c);
    }

    println!(
        "\n{:>10} {:>10} {:>10} {:>10} {:>12}",
        "vartheta", "a", "b", "c", "l2bar"
    );
    for i in 0..=12 {
        let t = 1e-3 * 10f64.powf(i as f64 / 2.0);
        if (t - 1.0).abs() < 1e-12 {
            continue;
        }
        let bp = bautin_curve(t)?;
        println!(
            "{t:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>12.4e}",
            bp.a,
            bp.b,
            bp.c,
            bp.l2bar()
        );
    }

    let p = bautin_curve(5.0)?.params();
    let q = bautin_curve(0.2)?.params();
    println!("\nmirror of vartheta = 5: {:?}", symmetry_conjugate(&p));
    println!("curve at vartheta = 0.2: {q:?}");
    Ok(())
}
