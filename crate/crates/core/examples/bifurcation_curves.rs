//! Analytic bifurcation curves in the `(b, c)` plane at fixed `a`, plus the
//! fold of limit cycles located numerically on a segment in `c`.
//!
//! ```text
//! cargo run --release --example bifurcation_curves -- [curves.csv]
//! ```

use std::fs::File;

use twoneuron::scan::{bautin_points, bt_points, hopf_curve, sn_curve, snpo_locate, write_curves_csv};
use twoneuron::Params;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = 16.0;
    let sn = sn_curve(a, (-3.0, 3.0), 200);
    let hopf = hopf_curve(a, (0.1, 10.0 * a), 200)?;
    let dh = bautin_points(a);
    let bt = bt_points(a);
    println!("a = {a}: {} saddle-node and {} Hopf samples", sn.len(), hopf.len());
    for s in dh.iter().chain(&bt) {
        println!(
            "  {:?} at b = {:.6}, c = {:.6}, residual {:.1e}, l2bar {:?}",
            s.kind,
            s.params.b(),
            s.params.c(),
            s.max_residual(),
            s.l2bar
        );
    }

    let fold = snpo_locate(&Params::new(a, 130.0, 111.165)?, &Params::new(a, 130.0, 111.16)?, 1e-8)?;
    println!("double cycle at c = {:.9}: {:?}", fold.params.c(), fold.double_cycle);

    if let Some(path) = std::env::args().nth(1) {
        let all: Vec<_> = sn.into_iter().chain(hopf).chain(dh).chain(bt).chain([fold]).collect();
        write_curves_csv(&all, File::create(&path)?)?;
        println!("wrote {} rows to {path}", all.len());
    }
    Ok(())
}
