//! Partially distinguishable particles: entanglement E and
//! distinguishability D add up to one.

use whichway::metrics::{complementarity_check, OverlapParam};
use whichway::Statistics;

fn main() -> whichway::error::Result<()> {
    println!("{:>6} {:>8} {:>8} {:>8} {:>8}", "|a|^2", "E", "D", "E+D", "E_chsh");
    for k in 0..=10 {
        let a2 = k as f64 / 10.0;
        let c = complementarity_check(OverlapParam::from_squared(a2)?, Statistics::Boson)?;
        println!(
            "{a2:>6.2} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            c.entanglement, c.distinguishability, c.sum, c.entanglement_chsh
        );
    }
    Ok(())
}
