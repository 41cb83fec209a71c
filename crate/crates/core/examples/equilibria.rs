//! Equilibria and their linear type at a few parameter points, including a
//! network given in its original five-parameter form.
//!
//! ```text
//! cargo run --example equilibria -- [a b c]
//! ```

use twoneuron::{equilibria, reduce_original, OriginalParams, Params};

fn show(p: &Params) {
    println!("a = {}, b = {}, c = {} (d = {})", p.a(), p.b(), p.c(), p.d());
    for eq in equilibria(p, 1e-13) {
        println!(
            "  ({:+.9}, {:.9})  {:?}  trace {:+.3e}  det {:+.3e}",
            eq.u0, eq.v0, eq.kind, eq.trace, eq.det
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    if let [a, b, c] = args[..] {
        show(&Params::new(a, b, c)?);
        return Ok(());
    }

    show(&Params::new(16.0, 130.0, 111.165)?);
    show(&Params::new(5.0, 1.0, -2.0)?);

    let original = OriginalParams::new(5.0, 0.5, 2.0, -1.0, 2.0)?;
    let (p, map) = reduce_original(&original);
    println!("\noriginal network {original:?} reduces to");
    show(&p);
    for eq in equilibria(&p, 1e-13) {
        let (u1, u2) = map.invert(eq.state());
        println!("  original coordinates ({u1:+.9}, {u2:.9})");
    }
    Ok(())
}
