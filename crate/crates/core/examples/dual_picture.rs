//! The heralded state read two ways: paths label the particles and spins are
//! the qubits, or spins label the particles and paths are the qubits.

use whichway::metrics::{concurrence, dual_relabel};
use whichway::scenarios::dual_family_concurrences;
use whichway::{detect, fig1_network, reduce_to_spin_dm, run_network, Statistics};

fn main() -> whichway::error::Result<()> {
    let net = fig1_network();
    let out = run_network(&net, &net.opposite_spin_input(Statistics::Fermion)?)?;
    let branches = detect(&out, net.monitored());
    let coinc = branches.iter().find(|b| b.pattern.is_coincidence()).unwrap();
    let (x, y) = coinc.pattern.pair().unwrap();
    let spin = reduce_to_spin_dm(&coinc.state, x, y)?;
    let path = dual_relabel(&coinc.state, x, y)?;
    println!("spin picture: C = {:.6}", concurrence(&spin));
    println!("path picture: C = {:.6}", concurrence(&path));
    println!("\n|a|^2  spin   path");
    for k in 0..=4 {
        let a2 = k as f64 / 4.0;
        let (s, p, _) = dual_family_concurrences(a2, Statistics::Fermion)?;
        println!("{a2:5.2}  {s:.4} {p:.4}");
    }
    Ok(())
}
