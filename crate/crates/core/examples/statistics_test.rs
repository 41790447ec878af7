//! Rotate both spins of the heralded pair and read the z-basis correlation:
//! +1 identifies fermions, -1 bosons.

use whichway::scenarios::scenario_statistics_test;
use whichway::Statistics;

fn main() -> whichway::error::Result<()> {
    for stats in [Statistics::Fermion, Statistics::Boson] {
        let r = scenario_statistics_test(stats)?;
        let p = r.table("joint_distribution").unwrap().column("probability").unwrap();
        println!(
            "{stats:>8}: <zz> = {:+.3}  verdict {}  P(uu,ud,du,dd) = {p:.3?}",
            r.number("correlation").unwrap(),
            r.text("verdict").unwrap()
        );
    }
    Ok(())
}
