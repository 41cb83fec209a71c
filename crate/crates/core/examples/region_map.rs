//! Classifies every cell of a `(b, c)` grid and prints a character map,
//! one letter per portrait code.
//!
//! ```text
//! cargo run --release --example region_map -- [map.csv]
//! ```

use std::collections::BTreeMap;
use std::fs::File;

use twoneuron::portrait::PortraitConfig;
use twoneuron::scan::{region_scan, Cell};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = region_scan(
        16.0,
        (129.95, 130.05),
        (111.14, 111.19),
        (26, 26),
        &PortraitConfig::default(),
    )?;

    let mut letters = BTreeMap::new();
    for (code, _) in map.codes() {
        let next = (b'A' + letters.len() as u8) as char;
        letters.insert(code, next);
    }
    for j in (0..map.nc).rev() {
        let row: String = (0..map.nb)
            .map(|i| match map.cell(i, j) {
                Cell::Code(c) => letters[&c.to_string()],
                Cell::Degenerate(_) => '.',
                Cell::Failed(_) => '?',
            })
            .collect();
        println!("{:>10.4} {row}", map.c_at(j));
    }
    println!("b from {} to {}", map.b_range.0, map.b_range.1);
    for (code, count) in map.codes() {
        println!("  {} = {code} ({count} cells)", letters[&code]);
    }

    if let Some(path) = std::env::args().nth(1) {
        map.write_csv(File::create(&path)?)?;
    }
    Ok(())
}
