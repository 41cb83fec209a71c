//! Portrait codes at representative parameter points and under the mirror
//! symmetry, which swaps the subscripts.
//!
//! ```text
//! cargo run --release --example phase_portrait -- [a b c]
//! ```

use twoneuron::portrait::{classify_portrait, is_catalogued, PortraitConfig};
use twoneuron::{symmetry_conjugate, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PortraitConfig::default();
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let points: Vec<(f64, f64, f64)> = match args[..] {
        [a, b, c] => vec![(a, b, c)],
        _ => vec![
            (1.0, 1.0, 0.0),
            (5.0, 1.0, -2.0),
            (16.0, 130.0, 111.165),
            (16.0, 130.0, 111.17),
            (16.0, 10.641444052592341, -1.02566902443116),
            (10.0, 8.419550588622542, -0.7580467395985293),
            (30.0, 28.074504688790036, -1.0676887959800827),
        ],
    };
    for (a, b, c) in points {
        let p = Params::new(a, b, c)?;
        match classify_portrait(&p, &cfg) {
            Ok(code) => {
                let mirror = classify_portrait(&symmetry_conjugate(&p), &cfg)?;
                println!(
                    "({a}, {b}, {c}): {code:<8} catalogued {:<5} mirror {mirror}",
                    is_catalogued(&code)
                );
            }
            Err(e) => println!("({a}, {b}, {c}): {e}"),
        }
    }
    Ok(())
}
