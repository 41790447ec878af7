//! Networks round-trip through JSON; the same document is accepted by
//! `whichway network <file>`.

use whichway::interferometer::{BeamSplitter, Network};
use whichway::scenarios::scenario_network;
use whichway::Statistics;

fn main() -> whichway::error::Result<()> {
    // a Mach-Zehnder-like chain: the outputs of the first splitter recombine
    let net = Network::new(
        vec![
            BeamSplitter::new("A", "B", "X", "Y")?,
            BeamSplitter::new("X", "Y", "C", "D")?,
        ],
        vec!["A".into(), "B".into()],
        vec!["C".into(), "D".into()],
    )?;
    let json = net.to_json();
    println!("{json}");
    let back = Network::from_json(&json)?;
    assert_eq!(back, net);
    for stats in [Statistics::Boson, Statistics::Fermion] {
        let r = scenario_network(&back, stats)?;
        println!("{stats:>8}: heralding yield {:.4}", r.number("yield").unwrap());
    }
    Ok(())
}
