//! Unpolarized particles: an equal mixture of the four product spin inputs.

use whichway::metrics::{chsh_expectation, concurrence, ChshSettings};
use whichway::scenarios::{ensemble_coincidence, Ensemble};
use whichway::{fig1_network, Statistics};

fn main() -> whichway::error::Result<()> {
    for stats in [Statistics::Boson, Statistics::Fermion] {
        let r = ensemble_coincidence(&fig1_network(), &Ensemble::unpolarized_pair(stats)?)?;
        println!(
            "{stats:>8}: P(coincidence) = {:.4}, concurrence = {:.4}, CHSH = {:+.4}",
            r.probability,
            concurrence(&r.density_matrix),
            chsh_expectation(&r.density_matrix, &ChshSettings::default())
        );
        for i in 0..4 {
            let row: Vec<String> = (0..4)
                .map(|j| format!("{:6.3}", r.density_matrix.element(i, j).re))
                .collect();
            println!("    {}", row.join(" "));
        }
    }
    Ok(())
}
