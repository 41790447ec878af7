//! Two identical particles meeting on a 50:50 splitter. Bosons with equal
//! spins always leave together; fermions never do.

use whichway::fock::{FockState, Mode, Statistics};
use whichway::{detect, fig1_network, run_network};

fn main() -> whichway::error::Result<()> {
    let net = fig1_network();
    for stats in [Statistics::Boson, Statistics::Fermion] {
        for (label, modes) in [
            ("equal spins", [Mode::up("A"), Mode::up("B")]),
            ("opposite spins", [Mode::up("A"), Mode::down("B")]),
        ] {
            let input = match FockState::product(stats, &modes) {
                Ok(s) => s,
                Err(e) => {
                    println!("{stats:>8} {label:<15} rejected: {e}");
                    continue;
                }
            };
            let branches = detect(&run_network(&net, &input)?, net.monitored());
            let coincidence = branches.coincidence_probability();
            println!("{stats:>8} {label:<15} P(coincidence) = {coincidence:.3}");
        }
    }
    Ok(())
}
