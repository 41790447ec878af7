//! Entanglement of the heralded pair when one Gaussian packet arrives late.

use whichway::scenarios::{delay_grid, scenario_gaussian};
use whichway::Statistics;

fn main() -> whichway::error::Result<()> {
    let (v, sigma) = (1.0, 0.5);
    let delays = delay_grid(1.5, 16)?;
    let r = scenario_gaussian(v, sigma, &delays, Statistics::Fermion)?;
    let t = r.table("curve").unwrap();
    let e = t.column("entanglement").unwrap();
    let closed = t.column("closed_form").unwrap();
    for ((dt, e), c) in delays.iter().zip(e).zip(closed) {
        let bar = "#".repeat((e * 50.0).round() as usize);
        println!("dt {dt:5.2}  E {e:.5} ({c:.5})  {bar}");
    }
    Ok(())
}
