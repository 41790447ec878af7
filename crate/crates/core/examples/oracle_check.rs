//! Cross-check the second-quantized engine against the first-quantized
//! brute-force simulator on the three-splitter network.

use whichway::oracle::{cross_check_in, oracle_detect, oracle_run, OracleBasis};
use whichway::{detect, fig2_network, run_network, Statistics};

fn main() -> whichway::error::Result<()> {
    let net = fig2_network();
    for stats in [Statistics::Boson, Statistics::Fermion] {
        let input = net.opposite_spin_input(stats)?;
        let basis = OracleBasis::for_network(&net, 1)?;
        let engine = detect(&run_network(&net, &input)?, net.monitored());
        let oracle = oracle_detect(&oracle_run(&net, &cross_check_in(&input, &basis)?)?, net.monitored());
        let mut worst: f64 = 0.0;
        for ob in &oracle {
            let eb = engine.get(&ob.pattern).expect("same patterns");
            worst = worst.max((eb.probability - ob.probability).abs());
            worst = worst.max(cross_check_in(&eb.state, &basis)?.distance_up_to_phase(&ob.state));
        }
        println!("{stats:>8}: {} patterns, max disagreement {worst:.2e}", oracle.len());
    }
    Ok(())
}
