//! Heralding yield of a complete splitter tree with 2^N detectors.

use std::time::Instant;

use whichway::{build_tree, entangled_yield, Statistics};

fn main() -> whichway::error::Result<()> {
    println!("{:>5} {:>10} {:>12} {:>10}", "depth", "yield", "1 - 2^-N", "time");
    for depth in 1..=7 {
        let t = Instant::now();
        let net = build_tree(depth)?;
        let y = entangled_yield(&net, &net.opposite_spin_input(Statistics::Boson)?)?;
        let closed = 1.0 - 0.5f64.powi(depth as i32);
        println!("{depth:>5} {y:>10.6} {closed:>12.6} {:>10.2?}", t.elapsed());
    }
    Ok(())
}
