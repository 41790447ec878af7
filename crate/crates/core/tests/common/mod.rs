#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use whichway::fock::{FockState, Mode, Path, Spin, Statistics};
use whichway::interferometer::{detect, run_network, BeamSplitter, ExcitationPattern, Network};
use whichway::oracle::{cross_check_in, oracle_detect, oracle_run, OracleBasis};

pub const AGREEMENT_TOLERANCE: f64 = 1e-9;

/// Random feed-forward network with `1..=max_splitters` splitters. Each
/// splitter takes a live path and either another live path or a fresh vacuum
/// input; every path left unconsumed is monitored.
pub fn random_network(rng: &mut ChaCha8Rng, max_splitters: usize) -> Network {
    let mut inputs: Vec<Path> = vec!["i0".into(), "i1".into()];
    let mut live = inputs.clone();
    let mut splitters = Vec::new();
    let n = rng.random_range(1..=max_splitters);
    for k in 0..n {
        let in1 = live.remove(rng.random_range(0..live.len()));
        let in2 = if !live.is_empty() && rng.random_bool(0.6) {
            live.remove(rng.random_range(0..live.len()))
        } else {
            let v = Path::new(format!("v{k}"));
            inputs.push(v.clone());
            v
        };
        let (out1, out2) = (Path::new(format!("o{k}a")), Path::new(format!("o{k}b")));
        let (in1, in2) = if rng.random_bool(0.5) { (in1, in2) } else { (in2, in1) };
        splitters.push(BeamSplitter::new(in1, in2, out1.clone(), out2.clone()).expect("distinct paths"));
        live.push(out1);
        live.push(out2);
    }
    Network::new(splitters, inputs, live).expect("valid random network")
}

fn random_mode(rng: &mut ChaCha8Rng, paths: &[&str], tags: u8) -> Mode {
    let path = paths[rng.random_range(0..paths.len())];
    let spin = if rng.random_bool(0.5) { Spin::Up } else { Spin::Down };
    Mode::tagged(path, spin, rng.random_range(0..tags))
}

/// Normalized superposition of one to three random two-particle monomials on
/// the paths `i0`, `i1`, with tags drawn from `0..tags`.
pub fn random_input(rng: &mut ChaCha8Rng, statistics: Statistics, tags: u8) -> FockState {
    loop {
        let terms: Vec<(Vec<Mode>, Complex64)> = (0..rng.random_range(1..=3))
            .map(|_| {
                let modes = vec![
                    random_mode(rng, &["i0", "i1"], tags),
                    random_mode(rng, &["i0", "i1"], tags),
                ];
                (
                    modes,
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            })
            .filter(|(m, _)| statistics == Statistics::Boson || m[0] != m[1])
            .collect();
        if let Ok(s) = FockState::from_terms(statistics, terms).and_then(|s| s.normalized()) {
            return s;
        }
    }
}

/// Largest disagreement between engine and oracle over pattern
/// probabilities and conditional states (the latter up to global phase).
pub fn engine_oracle_disagreement(net: &Network, input: &FockState) -> f64 {
    let tags = input.tags().into_iter().max().map_or(1, |t| t + 1);
    let basis = OracleBasis::for_network(net, tags).expect("basis");
    let engine = detect(&run_network(net, input).expect("engine run"), net.monitored());
    let oracle_in = cross_check_in(input, &basis).expect("input maps into oracle");
    let oracle = oracle_detect(&oracle_run(net, &oracle_in).expect("oracle run"), net.monitored());

    let mut probs: BTreeMap<ExcitationPattern, (f64, f64)> = BTreeMap::new();
    for b in engine.iter() {
        probs.entry(b.pattern.clone()).or_default().0 = b.probability;
    }
    for b in &oracle {
        probs.entry(b.pattern.clone()).or_default().1 = b.probability;
    }
    let mut worst = probs.values().map(|(e, o)| (e - o).abs()).fold(0.0, f64::max);
    for b in engine.iter().filter(|b| b.probability > AGREEMENT_TOLERANCE) {
        let Some(o) = oracle.iter().find(|o| o.pattern == b.pattern) else {
            return f64::INFINITY;
        };
        let mapped = cross_check_in(&b.state, &basis).expect("branch maps into oracle");
        worst = worst.max(mapped.distance_up_to_phase(&o.state));
    }
    worst
}
