//! Numerical focal values from the Poincaré return map, compared with the
//! closed-form signs. The displacement `P(r) - r` is fitted to
//! `C r^(2k+1)` on a ladder of small radii.
//!
//! ```text
//! cargo run --release --example focal_oracle
//! ```

use twoneuron::lienard::hopf_manifold;
use twoneuron::lyapunov::{bautin_curve, focal_oracle, l2bar, lyapunov_closed, OracleConfig};
use twoneuron::model::classify_equilibrium;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = OracleConfig::default();

    println!("first coefficient at Hopf points");
    for (u0, d) in [(0.3, -4.0), (-0.2, 0.5), (0.6, -20.0)] {
        let h = hopf_manifold(u0, (1.0 + (4.0 * u0).cosh()) - d)?;
        let p = h.params()?;
        let fit = focal_oracle(&p, &classify_equilibrium(&p, u0), 1, &cfg)?;
        let l1 = lyapunov_closed(h.theta, d)?.l1;
        println!(
            "  u0 {u0:+.2} d {d:+6.1}: oracle sign {:+}, slope {:.3}, closed l1 {l1:+.4e}",
            fit.sign, fit.slope
        );
    }

    println!("second coefficient on the Bautin curve");
    for t in [20.0, 3.0, 0.3, 0.05] {
        let bp = bautin_curve(t)?;
        let p = bp.params();
        match focal_oracle(&p, &classify_equilibrium(&p, bp.u0), 2, &cfg) {
            Ok(fit) => println!(
                "  vartheta {t:>5}: oracle sign {:+}, slope {:.3}, l2bar {:+.4e}",
                fit.sign,
                fit.slope,
                l2bar(t)
            ),
            Err(e) => println!("  vartheta {t:>5}: {e}"),
        }
    }
    Ok(())
}
