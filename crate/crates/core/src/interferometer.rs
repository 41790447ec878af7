//! Beam-splitter networks, absorptionless which-way detection and
//! post-selection on detector patterns.
//!
//! Splitter convention (50:50, spin and tag untouched):
//!
//! ```text
//! a†_{in1} → (a†_{out1} + i a†_{out2}) / √2
//! a†_{in2} → (a†_{out2} + i a†_{out1}) / √2
//! ```
//!
//! With `(in1, in2, out1, out2) = (A, B, D, C)` this sends `|A↑;B↓⟩` to
//! `½(|D↑;C↓⟩ ± |D↓;C↑⟩) + (i/2)(|C↑;C↓⟩ + |D↑;D↓⟩)`, `+` for fermions.
//!
//! Tree networks name paths by binary strings: the root splitter takes
//! inputs `A`, `B` and emits `0` (out1) and `1` (out2); the splitter fed by
//! path `p` has its unused port named `p + "v"` and emits `p0` and `p1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, Mode, Path, SingleParticleUnitary, Spin, Statistics};
use crate::metrics;

pub const MAX_TREE_DEPTH: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamSplitter {
    pub in1: Path,
    pub in2: Path,
    pub out1: Path,
    pub out2: Path,
}

impl BeamSplitter {
    pub fn new(
        in1: impl Into<Path>,
        in2: impl Into<Path>,
        out1: impl Into<Path>,
        out2: impl Into<Path>,
    ) -> Result<Self> {
        let bs = BeamSplitter {
            in1: in1.into(),
            in2: in2.into(),
            out1: out1.into(),
            out2: out2.into(),
        };
        bs.validate()?;
        Ok(bs)
    }

    fn validate(&self) -> Result<()> {
        let paths: BTreeSet<&Path> = self.paths().into_iter().collect();
        if paths.len() != 4 {
            return Err(Error::InvalidNetwork(format!("splitter {self} reuses a path")));
        }
        Ok(())
    }

    pub fn paths(&self) -> [&Path; 4] {
        [&self.in1, &self.in2, &self.out1, &self.out2]
    }

    /// Mode-level unitary over the four ports, both spins and the given tags.
    ///
    /// The input columns follow the module convention; the output-port
    /// columns complete the matrix to a unitary and only matter if a
    /// particle already sits in an output path.
    pub fn unitary(&self, tags: &BTreeSet<u8>) -> SingleParticleUnitary {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let re = Complex64::new(h, 0.0);
        let im = Complex64::new(0.0, h);
        // rows/cols: in1, in2, out1, out2
        let block = [
            [Complex64::default(), Complex64::default(), re, im],
            [Complex64::default(), Complex64::default(), im, re],
            [re, im, Complex64::default(), Complex64::default()],
            [im, re, Complex64::default(), Complex64::default()],
        ];
        let ports = self.paths();
        let mut domain = Vec::new();
        for &tag in tags {
            for spin in [Spin::Up, Spin::Down] {
                for p in ports {
                    domain.push(Mode::tagged(p.clone(), spin, tag));
                }
            }
        }
        let n = domain.len();
        let mut matrix = DMatrix::zeros(n, n);
        for b in 0..n / 4 {
            for i in 0..4 {
                for j in 0..4 {
                    matrix[(4 * b + i, 4 * b + j)] = block[i][j];
                }
            }
        }
        SingleParticleUnitary::new(domain, matrix).expect("splitter matrix is unitary")
    }

    fn renamed(&self, map: &BTreeMap<Path, Path>) -> BeamSplitter {
        let r = |p: &Path| map.get(p).cloned().unwrap_or_else(|| p.clone());
        BeamSplitter {
            in1: r(&self.in1),
            in2: r(&self.in2),
            out1: r(&self.out1),
            out2: r(&self.out2),
        }
    }
}

impl fmt::Display for BeamSplitter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})→({},{})", self.in1, self.in2, self.out1, self.out2)
    }
}

/// Feed-forward arrangement of splitters with detectors on the monitored paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NetworkSpec", into = "NetworkSpec")]
pub struct Network {
    splitters: Vec<BeamSplitter>,
    inputs: Vec<Path>,
    monitored: Vec<Path>,
}

/// JSON shape of a [`Network`]: splitters as `[in1, in2, out1, out2]` tuples.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct NetworkSpec {
    splitters: Vec<[Path; 4]>,
    inputs: Vec<Path>,
    monitored: Vec<Path>,
}

impl TryFrom<NetworkSpec> for Network {
    type Error = Error;

    fn try_from(spec: NetworkSpec) -> Result<Self> {
        let splitters = spec
            .splitters
            .into_iter()
            .map(|[a, b, c, d]| BeamSplitter::new(a, b, c, d))
            .collect::<Result<Vec<_>>>()?;
        Network::new(splitters, spec.inputs, spec.monitored)
    }
}

impl From<Network> for NetworkSpec {
    fn from(net: Network) -> Self {
        NetworkSpec {
            splitters: net
                .splitters
                .into_iter()
                .map(|s| [s.in1, s.in2, s.out1, s.out2])
                .collect(),
            inputs: net.inputs,
            monitored: net.monitored,
        }
    }
}

impl Network {
    pub fn new(splitters: Vec<BeamSplitter>, inputs: Vec<Path>, monitored: Vec<Path>) -> Result<Self> {
        let mut produced: BTreeSet<&Path> = BTreeSet::new();
        let mut consumed: BTreeSet<&Path> = BTreeSet::new();
        for s in &splitters {
            s.validate()?;
            for p in [&s.in1, &s.in2] {
                if !consumed.insert(p) {
                    return Err(Error::InvalidNetwork(format!("path {p} enters two splitters")));
                }
            }
            for p in [&s.out1, &s.out2] {
                if consumed.contains(p) {
                    return Err(Error::InvalidNetwork(format!("path {p} feeds an earlier splitter")));
                }
                if !produced.insert(p) {
                    return Err(Error::InvalidNetwork(format!("path {p} leaves two splitters")));
                }
            }
        }
        for p in &inputs {
            if produced.contains(p) {
                return Err(Error::InvalidNetwork(format!("input {p} is also a splitter output")));
            }
        }
        for p in &monitored {
            if consumed.contains(p) {
                return Err(Error::InvalidNetwork(format!("monitored path {p} feeds a splitter")));
            }
        }
        let unique_inputs: BTreeSet<&Path> = inputs.iter().collect();
        let unique_monitored: BTreeSet<&Path> = monitored.iter().collect();
        if unique_inputs.len() != inputs.len() || unique_monitored.len() != monitored.len() {
            return Err(Error::InvalidNetwork("duplicate input or monitored path".into()));
        }
        Ok(Network {
            splitters,
            inputs,
            monitored,
        })
    }

    pub fn splitters(&self) -> &[BeamSplitter] {
        &self.splitters
    }

    pub fn inputs(&self) -> &[Path] {
        &self.inputs
    }

    pub fn monitored(&self) -> &[Path] {
        &self.monitored
    }

    /// Renames paths throughout the network.
    pub fn relabeled(&self, map: &BTreeMap<Path, Path>) -> Result<Network> {
        let r = |p: &Path| map.get(p).cloned().unwrap_or_else(|| p.clone());
        Network::new(
            self.splitters.iter().map(|s| s.renamed(map)).collect(),
            self.inputs.iter().map(r).collect(),
            self.monitored.iter().map(r).collect(),
        )
    }

    /// The standard input `|in1 ↑; in2 ↓⟩` of the first splitter.
    pub fn opposite_spin_input(&self, statistics: Statistics) -> Result<FockState> {
        let first = self
            .splitters
            .first()
            .ok_or_else(|| Error::InvalidNetwork("network has no splitters".into()))?;
        FockState::product(
            statistics,
            &[Mode::up(first.in1.clone()), Mode::down(first.in2.clone())],
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Network> {
        serde_json::from_str(text).map_err(|e| Error::InvalidNetwork(e.to_string()))
    }
}

/// Single splitter with inputs A, B and outputs C, D (out1 = D).
pub fn fig1_network() -> Network {
    build_tree(1)
        .and_then(|t| t.relabeled(&rename_map(&[("0", "D"), ("1", "C")])))
        .expect("fig1 network is valid")
}

/// Three splitters: C feeds the splitter emitting (E, F), D the one emitting (G, H).
pub fn fig2_network() -> Network {
    build_tree(2)
        .and_then(|t| t.relabeled(&fig2_names()))
        .expect("fig2 network is valid")
}

/// Mapping from depth-2 tree names to the lettered paths of [`fig2_network`].
pub fn fig2_names() -> BTreeMap<Path, Path> {
    rename_map(&[
        ("0", "D"),
        ("1", "C"),
        ("0v", "Dv"),
        ("1v", "Cv"),
        ("00", "G"),
        ("01", "H"),
        ("10", "E"),
        ("11", "F"),
    ])
}

fn rename_map(pairs: &[(&str, &str)]) -> BTreeMap<Path, Path> {
    pairs.iter().map(|(a, b)| (Path::from(*a), Path::from(*b))).collect()
}

/// Binary splitter tree with `2^depth` monitored leaves.
pub fn build_tree(depth: usize) -> Result<Network> {
    if !(1..=MAX_TREE_DEPTH).contains(&depth) {
        return Err(Error::InvalidDepth(depth));
    }
    let mut splitters = vec![BeamSplitter::new("A", "B", "0", "1")?];
    let mut frontier = vec!["0".to_owned(), "1".to_owned()];
    for _ in 1..depth {
        let mut next = Vec::with_capacity(2 * frontier.len());
        for p in &frontier {
            splitters.push(BeamSplitter::new(
                p.as_str(),
                format!("{p}v"),
                format!("{p}0"),
                format!("{p}1"),
            )?);
            next.push(format!("{p}0"));
            next.push(format!("{p}1"));
        }
        frontier = next;
    }
    frontier.sort();
    Network::new(
        splitters,
        vec![Path::from("A"), Path::from("B")],
        frontier.into_iter().map(Path::from).collect(),
    )
}

/// Propagates `input` through every splitter in order.
pub fn run_network(net: &Network, input: &FockState) -> Result<FockState> {
    let inputs: BTreeSet<&Path> = net.inputs.iter().collect();
    if let Some(p) = input.occupied_paths().into_iter().find(|p| !inputs.contains(p)) {
        return Err(Error::UnsupportedInput(p.to_string()));
    }
    let tags = input.tags();
    let mut state = input.clone();
    if !tags.is_empty() {
        for s in &net.splitters {
            state.apply_unitary_in_place(&s.unitary(&tags));
        }
    }
    state.normalized()
}

/// Set of monitored paths that registered one or more particles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExcitationPattern(BTreeSet<Path>);

impl ExcitationPattern {
    pub fn new<I, P>(paths: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<Path>,
    {
        ExcitationPattern(paths.into_iter().map(Into::into).collect())
    }

    pub fn paths(&self) -> &BTreeSet<Path> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Exactly two distinct detectors fired.
    pub fn is_coincidence(&self) -> bool {
        self.0.len() == 2
    }

    /// The two paths of a coincidence, in sorted order.
    pub fn pair(&self) -> Option<(&Path, &Path)> {
        if !self.is_coincidence() {
            return None;
        }
        let mut it = self.0.iter();
        Some((it.next()?, it.next()?))
    }
}

impl fmt::Display for ExcitationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub pattern: ExcitationPattern,
    pub state: FockState,
    pub probability: f64,
}

/// Decoherent mixture of detector outcomes, sorted by pattern.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BranchSet {
    pub branches: Vec<Branch>,
}

impl BranchSet {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).fold(0.0, |a, p| a + p)
    }

    /// Total probability of two-detector patterns.
    pub fn coincidence_probability(&self) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.pattern.is_coincidence())
            .fold(0.0, |a, b| a + b.probability)
    }

    pub fn get(&self, pattern: &ExcitationPattern) -> Option<&Branch> {
        self.branches.iter().find(|b| &b.pattern == pattern)
    }

    pub fn probability_of(&self, pattern: &ExcitationPattern) -> f64 {
        self.get(pattern).map_or(0.0, |b| b.probability)
    }

    /// Keeps the branches satisfying `predicate`, renormalized.
    pub fn postselect<F>(&self, predicate: F) -> Result<(f64, BranchSet)>
    where
        F: Fn(&ExcitationPattern) -> bool,
    {
        postselect(self, predicate)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Branch> {
        self.branches.iter()
    }
}

/// Groups terms by which monitored paths are occupied.
pub fn detect(state: &FockState, monitored: &[Path]) -> BranchSet {
    let monitored: BTreeSet<&Path> = monitored.iter().collect();
    let total = state.norm_sqr();
    let groups = state.partition(|m| {
        ExcitationPattern(
            m.paths()
                .into_iter()
                .filter(|p| monitored.contains(p))
                .cloned()
                .collect(),
        )
    });
    let branches = groups
        .into_iter()
        .filter_map(|(pattern, component)| {
            let weight = component.norm_sqr();
            let conditional = component.normalized().ok()?;
            Some(Branch {
                pattern,
                state: conditional,
                probability: weight / total,
            })
        })
        .collect();
    BranchSet { branches }
}

/// Probability of the matching branches and those branches renormalized.
pub fn postselect<F>(branches: &BranchSet, predicate: F) -> Result<(f64, BranchSet)>
where
    F: Fn(&ExcitationPattern) -> bool,
{
    let kept: Vec<Branch> = branches
        .branches
        .iter()
        .filter(|b| predicate(&b.pattern))
        .cloned()
        .collect();
    let total: f64 = kept.iter().map(|b| b.probability).sum();
    if kept.is_empty() || total <= 0.0 {
        return Err(Error::ImpossiblePostSelection);
    }
    let renormalized = kept
        .into_iter()
        .map(|b| Branch {
            probability: b.probability / total,
            ..b
        })
        .collect();
    Ok((total, BranchSet { branches: renormalized }))
}

/// Total probability of two-detector coincidences for a two-particle input.
pub fn entangled_yield(net: &Network, input: &FockState) -> Result<f64> {
    let numbers = input.particle_numbers();
    if numbers.len() != 1 || !numbers.contains(&2) {
        let found = numbers.into_iter().max().unwrap_or(0);
        return Err(Error::ParticleNumber { expected: 2, found });
    }
    let out = run_network(net, input)?;
    Ok(detect(&out, &net.monitored).coincidence_probability())
}

/// One round of the single-splitter feedback protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackRound {
    pub round: usize,
    /// Probability that the protocol reaches this round.
    pub reached: f64,
    /// Coincidence probability given that this round was reached.
    pub success_probability: f64,
    /// Probability that every round up to and including this one failed.
    pub cumulative_failure: f64,
    /// Coincidence states of this round with their conditional weights.
    /// With the in1 re-injection rule every failure branch collapses onto the
    /// same state up to global phase, so this normally holds a single entry.
    pub conditional_states: Vec<(f64, FockState)>,
    /// Failure states that are re-injected into the next round.
    pub reinjected: Vec<(f64, FockState)>,
}

impl FeedbackRound {
    /// Unconditional probability of succeeding in exactly this round.
    pub fn unconditional_success(&self) -> f64 {
        self.reached * self.success_probability
    }

    pub fn conditional_state(&self) -> &FockState {
        &self.conditional_states[0].1
    }
}

/// Runs the single-splitter network repeatedly, feeding every bunched
/// (single-detector) outcome back into input port in1.
pub fn feedback_run(max_rounds: usize, statistics: Statistics) -> Result<Vec<FeedbackRound>> {
    if max_rounds == 0 {
        return Err(Error::InvalidParameter("feedback needs at least one round".into()));
    }
    let net = fig1_network();
    let in1 = net.splitters[0].in1.clone();
    let mut members = vec![(1.0, net.opposite_spin_input(statistics)?)];
    let mut cumulative_failure = 1.0;
    let mut rounds = Vec::with_capacity(max_rounds);
    for round in 1..=max_rounds {
        let mut success = 0.0;
        let mut successes: Vec<(f64, FockState)> = Vec::new();
        let mut failures: Vec<(f64, FockState)> = Vec::new();
        for (weight, state) in &members {
            let out = run_network(&net, state)?;
            for branch in detect(&out, &net.monitored).branches {
                let w = weight * branch.probability;
                if branch.pattern.is_coincidence() {
                    success += w;
                    merge_up_to_phase(&mut successes, w, branch.state);
                } else {
                    let reinjected = branch.state.map_paths(|_| in1.clone())?.normalized()?;
                    merge_up_to_phase(&mut failures, w, reinjected);
                }
            }
        }
        let reached = cumulative_failure;
        cumulative_failure *= 1.0 - success;
        normalize_weights(&mut successes);
        normalize_weights(&mut failures);
        rounds.push(FeedbackRound {
            round,
            reached,
            success_probability: success,
            cumulative_failure,
            conditional_states: successes,
            reinjected: failures.clone(),
        });
        members = failures;
        if members.is_empty() {
            break;
        }
    }
    Ok(rounds)
}

fn merge_up_to_phase(into: &mut Vec<(f64, FockState)>, weight: f64, state: FockState) {
    for (w, existing) in into.iter_mut() {
        if existing.fidelity(&state).is_ok_and(|f| f > 1.0 - 1e-12) {
            *w += weight;
            return;
        }
    }
    into.push((weight, state));
}

fn normalize_weights(items: &mut [(f64, FockState)]) {
    let total: f64 = items.iter().map(|(w, _)| w).sum();
    if total > 0.0 {
        for (w, _) in items.iter_mut() {
            *w /= total;
        }
    }
}

/// Per-path local spin unitaries that turn a coincidence branch into |ψ+⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinCorrection {
    pub rotations: BTreeMap<Path, Matrix2<Complex64>>,
}

impl SpinCorrection {
    /// Correction for a pure coincidence state with one particle in each of
    /// `x` and `y`. Spin-swapped (|↑↑⟩/|↓↓⟩) states get a σx on the second
    /// path; the relative phase is then removed on the first path.
    pub fn for_state(state: &FockState, x: &Path, y: &Path) -> Result<SpinCorrection> {
        let (first, second) = if x <= y { (x, y) } else { (y, x) };
        let mut amps = metrics::spin_amplitudes(state, first, second)?;
        let mut rotations = BTreeMap::new();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        if amps[0].norm_sqr() + amps[3].norm_sqr() > 0.5 {
            rotations.insert(second.clone(), Matrix2::new(zero, one, one, zero));
            amps = [amps[1], amps[0], amps[3], amps[2]];
        }
        let ratio = amps[1] * amps[2].conj();
        let phase = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { one };
        rotations.insert(first.clone(), Matrix2::new(one, zero, zero, phase));
        Ok(SpinCorrection { rotations })
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        let mut out = state.clone();
        for (path, r) in &self.rotations {
            out = out.apply_spin_rotation(path, r)?;
        }
        Ok(out)
    }

    /// True when every rotation is the identity within `tol`.
    pub fn is_identity(&self, tol: f64) -> bool {
        self.rotations
            .values()
            .all(|r| (r - Matrix2::identity()).iter().all(|c| c.norm() < tol))
    }

    /// Human-readable summary such as `D:diag(1,-1)`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .rotations
            .iter()
            .filter(|(_, r)| (*r - Matrix2::identity()).iter().any(|c| c.norm() > 1e-12))
            .map(|(p, r)| {
                if r[(0, 0)].norm() < 1e-12 {
                    format!("{p}:X")
                } else {
                    let phase = r[(1, 1)].arg();
                    format!("{p}:diag(1,exp({:.6}i))", phase)
                }
            })
            .collect();
        if parts.is_empty() {
            "identity".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Local correction for the coincidence `pattern` of `net` with the standard
/// opposite-spin input.
pub fn correction_phase(net: &Network, pattern: &ExcitationPattern, statistics: Statistics) -> Result<SpinCorrection> {
    let (x, y) = pattern
        .pair()
        .ok_or_else(|| Error::NotCoincidence(pattern.to_string()))?;
    let out = run_network(net, &net.opposite_spin_input(statistics)?)?;
    let branches = detect(&out, &net.monitored);
    let branch = branches
        .get(pattern)
        .ok_or_else(|| Error::NotCoincidence(pattern.to_string()))?;
    SpinCorrection::for_state(&branch.state, x, y)
}

/// Monte Carlo histogram of detector patterns; deterministic for a given seed.
pub fn sample_clicks(
    net: &Network,
    input: &FockState,
    trials: u64,
    seed: u64,
) -> Result<BTreeMap<ExcitationPattern, u64>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let out = run_network(net, input)?;
    let branches = detect(&out, &net.monitored);
    sample_branches(&branches, trials, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub(crate) fn sample_branches(
    branches: &BranchSet,
    trials: u64,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<ExcitationPattern, u64>> {
    let weights: Vec<f64> = branches.iter().map(|b| b.probability).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut hist = BTreeMap::new();
    for _ in 0..trials {
        let pattern = &branches.branches[dist.sample(rng)].pattern;
        *hist.entry(pattern.clone()).or_insert(0) += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pattern(paths: &[&str]) -> ExcitationPattern {
        ExcitationPattern::new(paths.iter().copied())
    }

    #[test]
    fn single_particle_split() {
        let net = fig1_network();
        let s = FockState::product(Statistics::Boson, &[Mode::up("A")]).unwrap();
        let out = run_network(&net, &s).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude_of(&[Mode::up("D")]) - c(h, 0.0)).norm() < 1e-15);
        assert!((out.amplitude_of(&[Mode::up("C")]) - c(0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn fermion_equal_spins_antibunch() {
        let net = fig1_network();
        let s = FockState::product(Statistics::Fermion, &[Mode::up("A"), Mode::up("B")]).unwrap();
        let out = run_network(&net, &s).unwrap();
        assert_eq!(out.num_terms(), 1);
        assert!((out.amplitude_of(&[Mode::up("C"), Mode::up("D")]).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boson_equal_spins_bunch() {
        let net = fig1_network();
        let s = FockState::product(Statistics::Boson, &[Mode::up("A"), Mode::up("B")]).unwrap();
        let out = run_network(&net, &s).unwrap();
        assert_eq!(out.amplitude_of(&[Mode::up("C"), Mode::up("D")]), c(0.0, 0.0));
        let cc = out.amplitude_of(&[Mode::up("C"), Mode::up("C")]);
        assert!((cc - c(0.0, 0.5)).norm() < 1e-12);
        let b = detect(&out, net.monitored());
        assert_eq!(b.probability_of(&pattern(&["C", "D"])), 0.0);
    }

    #[test]
    fn vacuum_passes_through() {
        let net = fig1_network();
        let vac = FockState::vacuum(Statistics::Boson);
        let out = run_network(&net, &vac).unwrap();
        assert_eq!(out, vac);
        let b = detect(&out, net.monitored());
        assert_eq!(b.branches.len(), 1);
        assert!(b.branches[0].pattern.is_empty());
        assert_eq!(b.branches[0].probability, 1.0);
    }

    #[test]
    fn input_outside_network_inputs_is_rejected() {
        let s = FockState::product(Statistics::Boson, &[Mode::up("C")]).unwrap();
        assert!(matches!(
            run_network(&fig1_network(), &s),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn boson_fig1_branches() {
        let net = fig1_network();
        let out = run_network(&net, &net.opposite_spin_input(Statistics::Boson).unwrap()).unwrap();
        let b = detect(&out, net.monitored());
        assert_eq!(b.branches.len(), 3);
        assert!((b.probability_of(&pattern(&["C", "D"])) - 0.5).abs() < 1e-12);
        assert!((b.probability_of(&pattern(&["C"])) - 0.25).abs() < 1e-12);
        assert!((b.probability_of(&pattern(&["D"])) - 0.25).abs() < 1e-12);
        let coinc = &b.get(&pattern(&["C", "D"])).unwrap().state;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((coinc.amplitude_of(&[Mode::up("D"), Mode::down("C")]) - c(h, 0.0)).norm() < 1e-12);
        assert!((coinc.amplitude_of(&[Mode::down("D"), Mode::up("C")]) - c(-h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn postselect_renormalizes_and_flags_impossible() {
        let net = fig1_network();
        let out = run_network(&net, &net.opposite_spin_input(Statistics::Fermion).unwrap()).unwrap();
        let b = detect(&out, net.monitored());
        let (p, cond) = postselect(&b, ExcitationPattern::is_coincidence).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((cond.total_probability() - 1.0).abs() < 1e-12);
        assert_eq!(postselect(&b, |p| p.len() == 3), Err(Error::ImpossiblePostSelection));
    }

    #[test]
    fn tree_shapes() {
        assert_eq!(build_tree(0), Err(Error::InvalidDepth(0)));
        assert_eq!(build_tree(13), Err(Error::InvalidDepth(13)));
        let t3 = build_tree(3).unwrap();
        assert_eq!(t3.splitters().len(), 7);
        assert_eq!(t3.monitored().len(), 8);
        let t1 = build_tree(1).unwrap();
        assert_eq!(
            t1.relabeled(&rename_map(&[("0", "D"), ("1", "C")])).unwrap(),
            fig1_network()
        );
        let f2 = fig2_network();
        assert_eq!(f2.splitters().len(), 3);
        let names: Vec<&str> = f2.monitored().iter().map(Path::as_str).collect();
        assert_eq!(names, vec!["G", "H", "E", "F"]);
    }

    #[test]
    fn network_validation() {
        let bs = BeamSplitter::new("A", "B", "C", "D").unwrap();
        assert!(BeamSplitter::new("A", "A", "C", "D").is_err());
        // monitored path feeding a splitter
        let bs2 = BeamSplitter::new("C", "X", "E", "F").unwrap();
        assert!(Network::new(vec![bs.clone(), bs2.clone()], vec!["A".into()], vec!["C".into()]).is_err());
        // output produced twice
        let bs3 = BeamSplitter::new("D", "Y", "E", "G").unwrap();
        assert!(Network::new(vec![bs.clone(), bs2, bs3], vec!["A".into()], vec![]).is_err());
        // cycle: output feeds earlier splitter
        let back = BeamSplitter::new("P", "Q", "A", "R").unwrap();
        assert!(Network::new(vec![bs, back], vec![], vec![]).is_err());
    }

    #[test]
    fn network_json_round_trip() {
        let net = fig2_network();
        let text = net.to_json();
        assert!(text.contains("\"splitters\""));
        let back = Network::from_json(&text).unwrap();
        assert_eq!(back, net);
        assert!(Network::from_json(r#"{"splitters":[["A","A","C","D"]],"inputs":[],"monitored":[]}"#).is_err());
    }

    #[test]
    fn entangled_yield_requires_two_particles() {
        let s = FockState::product(Statistics::Boson, &[Mode::up("A")]).unwrap();
        assert!(matches!(
            entangled_yield(&fig1_network(), &s),
            Err(Error::ParticleNumber { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn feedback_rounds_halve_failure() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let rounds = feedback_run(4, stats).unwrap();
            for r in &rounds {
                assert!((r.success_probability - 0.5).abs() < 1e-12);
                assert!((r.cumulative_failure - 0.5f64.powi(r.round as i32)).abs() < 1e-12);
                assert_eq!(r.conditional_states.len(), 1);
            }
        }
        assert!(feedback_run(0, Statistics::Boson).is_err());
    }

    #[test]
    fn correction_rejects_non_coincidence() {
        let err = correction_phase(&fig2_network(), &pattern(&["E"]), Statistics::Fermion).unwrap_err();
        assert!(matches!(err, Error::NotCoincidence(_)));
    }

    #[test]
    fn sampling_is_seeded() {
        let net = fig1_network();
        let input = net.opposite_spin_input(Statistics::Boson).unwrap();
        let a = sample_clicks(&net, &input, 1000, 7).unwrap();
        let b = sample_clicks(&net, &input, 1000, 7).unwrap();
        assert_eq!(a, b);
        let one = sample_clicks(&net, &input, 1, 7).unwrap();
        assert_eq!(one.values().sum::<u64>(), 1);
        assert_eq!(one.len(), 1);
        assert!(sample_clicks(&net, &input, 0, 7).is_err());
    }

    #[test]
    fn fig2_output_has_twelve_split_and_four_bunched_terms() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let net = fig2_network();
            let out = run_network(&net, &net.opposite_spin_input(stats).unwrap()).unwrap();
            let bunched = out.terms().filter(|(m, _)| m.paths().len() == 1).count();
            assert_eq!((out.num_terms(), bunched), (16, 4), "{stats}");
        }
    }
}
