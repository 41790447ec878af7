//! |A↑;B↓⟩ through one splitter, then post-selection on a click in both
//! output paths. The surviving spin state is a Bell state whose sign is set
//! by the exchange statistics.

use whichway::metrics::{concurrence, BellState};
use whichway::{detect, fig1_network, postselect, reduce_to_spin_dm, run_network, Statistics};

fn main() -> whichway::error::Result<()> {
    let net = fig1_network();
    for stats in [Statistics::Fermion, Statistics::Boson] {
        let out = run_network(&net, &net.opposite_spin_input(stats)?)?;
        println!("{stats}: {out}");
        let (p, kept) = postselect(&detect(&out, net.monitored()), |pat| pat.is_coincidence())?;
        let branch = &kept.branches[0];
        let (x, y) = branch.pattern.pair().unwrap();
        let dm = reduce_to_spin_dm(&branch.state, x, y)?;
        let bell = BellState::identify(&dm, 1e-9)
            .map(|b| b.to_string())
            .unwrap_or("none".into());
        println!("  coincidence {p:.3} -> {bell}, concurrence {:.6}\n", concurrence(&dm));
    }
    Ok(())
}
