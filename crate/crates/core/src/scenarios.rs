//! Named end-to-end experiments. Each returns a [`ScenarioReport`] that the
//! CLI renders as a table, JSON or CSV.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map};

use crate::error::{Error, Result};
use crate::fock::{hadamard, FockState, Mode, Path, Spin, Statistics};
use crate::interferometer::{
    build_tree, detect, feedback_run, fig1_network, fig2_network, postselect, run_network, BranchSet,
    ExcitationPattern, Network, SpinCorrection,
};
use crate::metrics::{
    chsh_expectation, complementarity_check, concurrence, dual_relabel, gaussian_overlap, reduce_to_spin_dm, BellState,
    ChshSettings, OverlapParam, TwoQubitDM,
};

/// Seed used when the caller does not provide one.
pub const DEFAULT_SEED: u64 = 1729;

/// Largest depth accepted by the tree scenario.
pub const MAX_SCENARIO_TREE_DEPTH: usize = 7;

/// Largest number of feedback rounds accepted by the feedback scenario.
pub const MAX_FEEDBACK_ROUNDS: usize = 60;

/// Correlations with magnitude below this give an inconclusive verdict.
pub const VERDICT_DEAD_ZONE: f64 = 0.1;

const BELL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Integer(i64),
    Number(f64),
    Bool(bool),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            Value::Integer(n) => Some(*n as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Number(x)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Integer(n as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(n) => write!(f, "{n}"),
            Value::Number(x) => write!(f, "{:.6}", x),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scalar {
    pub name: String,
    pub value: Value,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// Value in `column` for the first row whose first cell displays as `key`.
    pub fn lookup(&self, key: &str, column: &str) -> Option<&Value> {
        let i = self.columns.iter().position(|c| c == column)?;
        self.rows.iter().find(|r| r[0].to_string() == key).map(|r| &r[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedMatrix {
    pub name: String,
    pub density_matrix: TwoQubitDM,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub parameters: Map<String, serde_json::Value>,
    pub scalars: Vec<Scalar>,
    /// The first table is the primary one (emitted as CSV).
    pub tables: Vec<Table>,
    pub matrices: Vec<NamedMatrix>,
    pub notes: Vec<String>,
}

impl ScenarioReport {
    fn new(scenario: &str, parameters: serde_json::Value) -> Self {
        let parameters = match parameters {
            serde_json::Value::Object(m) => m,
            _ => Map::new(),
        };
        ScenarioReport {
            scenario: scenario.into(),
            parameters,
            scalars: Vec::new(),
            tables: Vec::new(),
            matrices: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn exact(&mut self, name: &str, value: impl Into<Value>) {
        self.scalars.push(Scalar {
            name: name.into(),
            value: value.into(),
            provenance: Provenance::Exact,
        });
    }

    fn sampled(&mut self, name: &str, value: impl Into<Value>) {
        self.scalars.push(Scalar {
            name: name.into(),
            value: value.into(),
            provenance: Provenance::Sampled,
        });
    }

    fn matrix(&mut self, name: &str, dm: TwoQubitDM) {
        self.matrices.push(NamedMatrix {
            name: name.into(),
            density_matrix: dm,
        });
    }

    pub fn scalar(&self, name: &str) -> Option<&Scalar> {
        self.scalars.iter().find(|s| s.name == name)
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        self.scalar(name).and_then(|s| s.value.as_f64())
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        self.scalar(name).and_then(|s| s.value.as_str())
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn density_matrix(&self, name: &str) -> Option<&TwoQubitDM> {
        self.matrices.iter().find(|m| m.name == name).map(|m| &m.density_matrix)
    }
}

/// Classical mixture of pure two-particle inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    components: Vec<(f64, FockState)>,
}

impl Ensemble {
    pub fn new(components: Vec<(f64, FockState)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidEnsemble("no components".into()));
        }
        if components.iter().any(|(p, _)| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidEnsemble("negative probability".into()));
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        let stats = components[0].1.statistics();
        if components.iter().any(|(_, s)| s.statistics() != stats) {
            return Err(Error::InvalidEnsemble("components mix statistics".into()));
        }
        Ok(Ensemble { components })
    }

    /// Each particle independently in the maximally mixed spin state: the four
    /// product inputs `|A s₁; B s₂⟩` with probability 1/4 each.
    pub fn unpolarized_pair(statistics: Statistics) -> Result<Self> {
        let mut components = Vec::with_capacity(4);
        for s1 in [Spin::Up, Spin::Down] {
            for s2 in [Spin::Up, Spin::Down] {
                components.push((
                    0.25,
                    FockState::product(statistics, &[Mode::new("A", s1), Mode::new("B", s2)])?,
                ));
            }
        }
        Ensemble::new(components)
    }

    pub fn components(&self) -> &[(f64, FockState)] {
        &self.components
    }

    pub fn statistics(&self) -> Statistics {
        self.components[0].1.statistics()
    }
}

/// Coincidence probability and spin density matrix of an ensemble sent
/// through `net`, plus the per-component contributions.
pub struct EnsembleCoincidence {
    pub probability: f64,
    pub density_matrix: TwoQubitDM,
    /// (input probability, coincidence probability, conditional spin state)
    pub contributions: Vec<(f64, f64, Option<TwoQubitDM>)>,
}

pub fn ensemble_coincidence(net: &Network, ensemble: &Ensemble) -> Result<EnsembleCoincidence> {
    let mut contributions = Vec::new();
    let mut parts = Vec::new();
    let mut total = 0.0;
    for (p, state) in ensemble.components() {
        let out = run_network(net, state)?;
        let branches = detect(&out, net.monitored());
        let mut comp_prob = 0.0;
        let mut comp_parts = Vec::new();
        for b in branches.iter().filter(|b| b.pattern.is_coincidence()) {
            let (x, y) = b.pattern.pair().expect("coincidence");
            let dm = reduce_to_spin_dm(&b.state, x, y)?;
            comp_prob += b.probability;
            comp_parts.push((b.probability, dm));
        }
        let comp_dm = if comp_parts.is_empty() {
            None
        } else {
            Some(TwoQubitDM::mixture(&comp_parts)?)
        };
        if let Some(dm) = &comp_dm {
            parts.push((p * comp_prob, dm.clone()));
        }
        total += p * comp_prob;
        contributions.push((*p, comp_prob, comp_dm));
    }
    if total <= 0.0 {
        return Err(Error::ImpossiblePostSelection);
    }
    Ok(EnsembleCoincidence {
        probability: total,
        density_matrix: TwoQubitDM::mixture(&parts)?,
        contributions,
    })
}

fn bell_label(dm: &TwoQubitDM) -> String {
    BellState::identify(dm, BELL_TOLERANCE).map_or_else(|| "none".to_string(), |b| b.to_string())
}

fn coincidence_dm(branches: &BranchSet) -> Result<(f64, TwoQubitDM, FockState, ExcitationPattern)> {
    let (p, cond) = postselect(branches, ExcitationPattern::is_coincidence)?;
    if cond.branches.len() != 1 {
        return Err(Error::InvalidParameter("expected a single coincidence pattern".into()));
    }
    let b = &cond.branches[0];
    let (x, y) = b.pattern.pair().expect("coincidence");
    Ok((
        p,
        reduce_to_spin_dm(&b.state, x, y)?,
        b.state.clone(),
        b.pattern.clone(),
    ))
}

/// Table of detector outcomes; coincidence rows carry the Bell-state
/// identity, concurrence and the local correction to |ψ+⟩.
fn branch_table(branches: &BranchSet) -> Result<Table> {
    let mut t = Table::new(
        "branches",
        &[
            "pattern",
            "probability",
            "detectors",
            "bell_state",
            "concurrence",
            "correction",
        ],
    );
    for b in branches.iter() {
        let (bell, conc, corr) = match b.pattern.pair() {
            Some((x, y)) => {
                let dm = reduce_to_spin_dm(&b.state, x, y)?;
                let corr = SpinCorrection::for_state(&b.state, x, y)?;
                (
                    Value::from(bell_label(&dm)),
                    Value::from(concurrence(&dm)),
                    Value::from(corr.describe()),
                )
            }
            None => (Value::from("-"), Value::from("-"), Value::from("-")),
        };
        t.push(vec![
            b.pattern.to_string().into(),
            b.probability.into(),
            b.pattern.len().into(),
            bell,
            conc,
            corr,
        ]);
    }
    Ok(t)
}

fn amplitude_table(state: &FockState) -> Table {
    let mut t = Table::new("amplitudes", &["monomial", "re", "im"]);
    for (m, c) in state.terms() {
        t.push(vec![m.to_string().into(), c.re.into(), c.im.into()]);
    }
    t
}

/// Single splitter with opposite (or, with `equal_spins`, identical) spins.
pub fn scenario_fig1(statistics: Statistics, equal_spins: bool) -> Result<ScenarioReport> {
    let net = fig1_network();
    let spin_b = if equal_spins { Spin::Up } else { Spin::Down };
    let input = FockState::product(statistics, &[Mode::up("A"), Mode::new("B", spin_b)])?;
    let out = run_network(&net, &input)?;
    let branches = detect(&out, net.monitored());
    let mut r = ScenarioReport::new("fig1", json!({ "statistics": statistics, "equal_spins": equal_spins }));
    let coincidence = branches.coincidence_probability();
    r.exact("coincidence_probability", coincidence);
    match coincidence_dm(&branches) {
        Ok((_, dm, _, _)) => {
            r.exact("bell_state", bell_label(&dm));
            r.exact("concurrence", concurrence(&dm));
            r.matrix("coincidence_spin_state", dm);
        }
        Err(Error::ImpossiblePostSelection) => {
            r.exact("bell_state", "none");
            r.notes
                .push("no coincidence: both particles always leave through the same port".into());
        }
        Err(e) => return Err(e),
    }
    r.tables.push(branch_table(&branches)?);
    r.tables.push(amplitude_table(&out));
    Ok(r)
}

/// Three-splitter network with four monitored outputs.
pub fn scenario_fig2(statistics: Statistics) -> Result<ScenarioReport> {
    let net = fig2_network();
    let out = run_network(&net, &net.opposite_spin_input(statistics)?)?;
    let branches = detect(&out, net.monitored());
    let mut r = ScenarioReport::new("fig2", json!({ "statistics": statistics }));
    let coincidence = branches.coincidence_probability();
    r.exact("coincidence_probability", coincidence);
    r.exact("patterns", branches.branches.len());
    r.exact("monomials", out.num_terms());
    r.tables.push(branch_table(&branches)?);
    r.tables.push(amplitude_table(&out));
    Ok(r)
}

/// Depth-`depth` splitter tree: heralded yield and per-pattern Bell states.
pub fn scenario_tree(depth: usize, statistics: Statistics) -> Result<ScenarioReport> {
    if !(1..=MAX_SCENARIO_TREE_DEPTH).contains(&depth) {
        return Err(Error::InvalidDepth(depth));
    }
    // depth 2 is reported with the lettered detector names
    let net = if depth == 2 { fig2_network() } else { build_tree(depth)? };
    let input = net.opposite_spin_input(statistics)?;
    let out = run_network(&net, &input)?;
    let branches = detect(&out, net.monitored());
    let mut r = ScenarioReport::new("tree", json!({ "statistics": statistics, "depth": depth }));
    let coincidence = branches.coincidence_probability();
    r.exact("yield", coincidence);
    r.exact("expected_yield", 1.0 - 0.5f64.powi(depth as i32));
    r.exact("splitters", net.splitters().len());
    r.exact("detectors", net.monitored().len());
    r.tables.push(branch_table(&branches)?);
    Ok(r)
}

/// Exact per-round feedback probabilities plus a seeded Monte Carlo run.
pub fn scenario_feedback(rounds: usize, statistics: Statistics, trials: u64, seed: u64) -> Result<ScenarioReport> {
    if !(1..=MAX_FEEDBACK_ROUNDS).contains(&rounds) {
        return Err(Error::InvalidParameter(format!(
            "feedback rounds must be in 1..={MAX_FEEDBACK_ROUNDS}"
        )));
    }
    let exact = feedback_run(rounds, statistics)?;
    let net = fig1_network();
    let mut r = ScenarioReport::new(
        "feedback",
        json!({ "statistics": statistics, "rounds": rounds, "trials": trials, "seed": seed }),
    );

    // per-round branch distributions of every re-injected member, for sampling
    let mut members: Vec<(f64, FockState)> = vec![(1.0, net.opposite_spin_input(statistics)?)];
    let mut round_branches: Vec<Vec<(f64, BranchSet)>> = Vec::with_capacity(rounds);
    for round in &exact {
        let mut per_member = Vec::with_capacity(members.len());
        for (w, s) in &members {
            per_member.push((*w, detect(&run_network(&net, s)?, net.monitored())));
        }
        round_branches.push(per_member);
        members = round.reinjected.clone();
    }
    let sampled = if trials > 0 {
        Some(sample_feedback(&round_branches, trials, seed))
    } else {
        None
    };

    let mut t = Table::new(
        "rounds",
        &[
            "round",
            "success_probability",
            "cumulative_failure",
            "cumulative_success",
            "bell_state",
            "concurrence",
            "sampled_cumulative_success",
        ],
    );
    for (k, round) in exact.iter().enumerate() {
        let mut dms = Vec::new();
        for (w, s) in &round.conditional_states {
            dms.push((*w, reduce_to_spin_dm(s, &"C".into(), &"D".into())?));
        }
        let dm = TwoQubitDM::mixture(&dms)?;
        let sampled_cell = match &sampled {
            Some(successes) => Value::from(successes[k] as f64 / trials as f64),
            None => Value::from("-"),
        };
        t.push(vec![
            round.round.into(),
            round.success_probability.into(),
            round.cumulative_failure.into(),
            (1.0 - round.cumulative_failure).into(),
            bell_label(&dm).into(),
            concurrence(&dm).into(),
            sampled_cell,
        ]);
    }
    let last = exact.last().expect("at least one round");
    r.exact("cumulative_failure", last.cumulative_failure);
    r.exact("cumulative_success", 1.0 - last.cumulative_failure);
    if let Some(successes) = &sampled {
        let p = 1.0 - last.cumulative_failure;
        r.sampled(
            "sampled_cumulative_success",
            *successes.last().unwrap() as f64 / trials as f64,
        );
        r.exact("binomial_sigma", (p * (1.0 - p) / trials as f64).sqrt());
    }
    r.tables.push(t);
    Ok(r)
}

/// Cumulative success counts after each round.
fn sample_feedback(round_branches: &[Vec<(f64, BranchSet)>], trials: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first_success = vec![0u64; round_branches.len()];
    for _ in 0..trials {
        for (k, members) in round_branches.iter().enumerate() {
            let mut u: f64 = rng.random();
            let mut chosen = &members[members.len() - 1].1;
            for (w, b) in members {
                if u < *w {
                    chosen = b;
                    break;
                }
                u -= w;
            }
            let mut v: f64 = rng.random();
            let mut coincident = false;
            for b in chosen.iter() {
                if v < b.probability {
                    coincident = b.pattern.is_coincidence();
                    break;
                }
                v -= b.probability;
            }
            if coincident {
                first_success[k] += 1;
                break;
            }
        }
    }
    first_success
        .iter()
        .scan(0u64, |acc, &n| {
            *acc += n;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Boson,
    Fermion,
    Inconclusive,
}

impl Verdict {
    pub fn from_correlation(correlation: f64) -> Verdict {
        if correlation > VERDICT_DEAD_ZONE {
            Verdict::Fermion
        } else if correlation < -VERDICT_DEAD_ZONE {
            Verdict::Boson
        } else {
            Verdict::Inconclusive
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Boson => "boson",
            Verdict::Fermion => "fermion",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Hadamard-like rotation on both coincidence paths, then z-basis spin correlation.
pub fn scenario_statistics_test(statistics: Statistics) -> Result<ScenarioReport> {
    let net = fig1_network();
    let out = run_network(&net, &net.opposite_spin_input(statistics)?)?;
    let (_, _, state, pattern) = coincidence_dm(&detect(&out, net.monitored()))?;
    let (x, y) = pattern.pair().expect("coincidence");
    let rotated = state
        .apply_spin_rotation(x, &hadamard())?
        .apply_spin_rotation(y, &hadamard())?;
    let dm = reduce_to_spin_dm(&rotated, x, y)?;
    let pops = dm.populations();
    let correlation = pops[0] - pops[1] - pops[2] + pops[3];
    let verdict = Verdict::from_correlation(correlation);
    let mut r = ScenarioReport::new("statistics-test", json!({ "statistics": statistics }));
    r.exact("correlation", correlation);
    r.exact("verdict", verdict.to_string());
    let mut t = Table::new("joint_distribution", &["outcome", "probability"]);
    for (label, p) in ["up-up", "up-down", "down-up", "down-down"].iter().zip(pops) {
        t.push(vec![(*label).into(), p.into()]);
    }
    r.tables.push(t);
    r.matrix("rotated_spin_state", dm);
    Ok(r)
}

/// Unpolarized input: the four product spin inputs with probability 1/4 each.
pub fn scenario_mixed_input(statistics: Statistics) -> Result<ScenarioReport> {
    let net = fig1_network();
    let ensemble = Ensemble::unpolarized_pair(statistics)?;
    let result = ensemble_coincidence(&net, &ensemble)?;
    let dm = result.density_matrix.clone();

    // correction map derived from the opposite-spin component
    let opposite = run_network(&net, &net.opposite_spin_input(statistics)?)?;
    let (_, _, coinc, pattern) = coincidence_dm(&detect(&opposite, net.monitored()))?;
    let (x, y) = pattern.pair().expect("coincidence");
    let correction = SpinCorrection::for_state(&coinc, x, y)?;
    let id = Matrix2::<Complex64>::identity();
    let u1 = correction.rotations.get(x).copied().unwrap_or(id);
    let u2 = correction.rotations.get(y).copied().unwrap_or(id);
    let settings = ChshSettings::default();
    let chsh_default = chsh_expectation(&dm, &settings);
    let chsh_corrected = chsh_expectation(&dm.locally_rotated(&u1, &u2)?, &settings);

    let mut r = ScenarioReport::new("mixed-input", json!({ "statistics": statistics }));
    r.exact("coincidence_probability", result.probability);
    r.exact("concurrence", concurrence(&dm));
    r.exact("bell_state", bell_label(&dm));
    r.exact("chsh_default", chsh_default);
    r.exact("chsh_corrected", chsh_corrected);
    r.exact("chsh_max_abs", chsh_default.abs().max(chsh_corrected.abs()));
    let mut t = Table::new(
        "components",
        &["input", "weight", "coincidence_probability", "concurrence"],
    );
    for ((p, prob, cdm), (_, state)) in result.contributions.iter().zip(ensemble.components()) {
        let label = state.terms().next().map(|(m, _)| m.to_string()).unwrap_or_default();
        let conc = cdm.as_ref().map_or(Value::from("-"), |d| Value::from(concurrence(d)));
        t.push(vec![label.into(), (*p).into(), (*prob).into(), conc]);
    }
    r.tables.push(t);
    if statistics == Statistics::Fermion {
        r.notes.push(
            "conditional state is (1/3)|up,up><up,up| + (1/3)|down,down><down,down| + (1/3)|psi+><psi+|, \
             from direct enumeration of the four inputs; a (1/2, 1/2, 1/sqrt2) weighting with a psi- \
             component would not have unit trace"
                .into(),
        );
    }
    r.matrix("conditional_spin_state", dm);
    Ok(r)
}

/// Evenly spaced |a|² values on [0, 1].
pub fn overlap_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    Ok((0..points).map(|k| k as f64 / (points - 1) as f64).collect())
}

/// Sweep of concurrence against distinguishability over |a|².
pub fn scenario_complementarity(grid: &[f64], statistics: Statistics) -> Result<ScenarioReport> {
    let mut r = ScenarioReport::new("complementarity", json!({ "statistics": statistics, "grid": grid }));
    let mut t = Table::new(
        "sweep",
        &[
            "overlap_sq",
            "entanglement",
            "distinguishability",
            "sum",
            "entanglement_chsh",
        ],
    );
    let mut worst_sum: f64 = 0.0;
    let mut worst_chsh: f64 = 0.0;
    for &a2 in grid {
        let c = complementarity_check(OverlapParam::from_squared(a2)?, statistics)?;
        worst_sum = worst_sum.max((c.sum - 1.0).abs());
        worst_chsh = worst_chsh.max((c.entanglement - c.entanglement_chsh).abs());
        t.push(vec![
            a2.into(),
            c.entanglement.into(),
            c.distinguishability.into(),
            c.sum.into(),
            c.entanglement_chsh.into(),
        ]);
    }
    r.exact("max_abs_sum_deviation", worst_sum);
    r.exact("max_abs_chsh_deviation", worst_chsh);
    r.tables.push(t);
    Ok(r)
}

/// `points` delays evenly spaced on [0, dt_max].
pub fn delay_grid(dt_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || dt_max.is_nan() || dt_max <= 0.0 {
        return Err(Error::InvalidParameter(
            "delay grid needs ≥2 points and a positive maximum".into(),
        ));
    }
    Ok((0..points).map(|k| dt_max * k as f64 / (points - 1) as f64).collect())
}

/// Entanglement against packet delay, computed through the full pipeline.
pub fn scenario_gaussian(v: f64, sigma: f64, delays: &[f64], statistics: Statistics) -> Result<ScenarioReport> {
    let mut r = ScenarioReport::new(
        "gaussian",
        json!({ "statistics": statistics, "v": v, "sigma": sigma, "dt": delays }),
    );
    let mut t = Table::new("curve", &["dt", "entanglement", "closed_form", "distinguishability"]);
    let mut worst: f64 = 0.0;
    for &dt in delays {
        let a = gaussian_overlap(v, dt, sigma)?;
        let c = complementarity_check(a, statistics)?;
        let closed = (-(v * v * dt * dt) / (2.0 * sigma * sigma)).exp();
        worst = worst.max((c.entanglement - closed).abs());
        t.push(vec![
            dt.into(),
            c.entanglement.into(),
            closed.into(),
            c.distinguishability.into(),
        ]);
    }
    r.exact("max_abs_deviation", worst);
    r.tables.push(t);
    Ok(r)
}

/// Coincidence states of the single splitter with both exchange signs:
/// `(|D↑;C↓⟩ + s|D↓;C↑⟩)/√2`.
fn signed_coincidence_state(statistics: Statistics, sign: f64) -> Result<FockState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    FockState::from_terms(
        statistics,
        vec![
            (vec![Mode::up("D"), Mode::down("C")], Complex64::new(h, 0.0)),
            (vec![Mode::down("D"), Mode::up("C")], Complex64::new(sign * h, 0.0)),
        ],
    )
}

/// Spin-labelled and path-labelled concurrences of an exchange-family
/// mixture with |a|² = `overlap_sq`, realised as a two-component ensemble of
/// tag-free coincidence states.
pub fn dual_family_concurrences(overlap_sq: f64, statistics: Statistics) -> Result<(f64, f64, TwoQubitDM)> {
    let native = -statistics.exchange_sign();
    let (c, d) = (Path::from("C"), Path::from("D"));
    let mut spin = Vec::new();
    let mut path = Vec::new();
    for (w, sign) in [((1.0 + overlap_sq) / 2.0, native), ((1.0 - overlap_sq) / 2.0, -native)] {
        if w <= 0.0 {
            continue;
        }
        let s = signed_coincidence_state(statistics, sign)?;
        spin.push((w, reduce_to_spin_dm(&s, &c, &d)?));
        path.push((w, dual_relabel(&s, &c, &d)?));
    }
    let spin_dm = TwoQubitDM::mixture(&spin)?;
    let path_dm = TwoQubitDM::mixture(&path)?;
    Ok((concurrence(&spin_dm), concurrence(&path_dm), spin_dm))
}

/// Spin-labelled versus path-labelled reading of the coincidence state.
pub fn scenario_dual(statistics: Statistics, grid: &[f64]) -> Result<ScenarioReport> {
    let net = fig1_network();
    let out = run_network(&net, &net.opposite_spin_input(statistics)?)?;
    let branches = detect(&out, net.monitored());
    let (_, spin_dm, state, pattern) = coincidence_dm(&branches)?;
    let (x, y) = pattern.pair().expect("coincidence");
    let path_dm = dual_relabel(&state, x, y)?;
    let mut r = ScenarioReport::new("dual", json!({ "statistics": statistics, "grid": grid }));
    let (cs, cp) = (concurrence(&spin_dm), concurrence(&path_dm));
    r.exact("spin_concurrence", cs);
    r.exact("path_concurrence", cp);
    r.exact("agree", (cs - cp).abs() < 1e-9);

    // a bunched branch has no particle-per-path labelling
    let bunched = branches.iter().find(|b| b.pattern.len() == 1).map(|b| &b.state);
    let rejected = match bunched {
        Some(s) => reduce_to_spin_dm(s, x, y).is_err(),
        None => false,
    };
    r.exact("non_coincidence_rejected", rejected);

    let mut t = Table::new(
        "family",
        &["overlap_sq", "spin_concurrence", "path_concurrence", "difference"],
    );
    let mut worst: f64 = 0.0;
    for &a2 in grid {
        let (s, p, _) = dual_family_concurrences(a2, statistics)?;
        worst = worst.max((s - p).abs());
        t.push(vec![a2.into(), s.into(), p.into(), (s - p).into()]);
    }
    r.exact("max_abs_family_difference", worst);
    r.tables.insert(0, t);
    r.matrix("spin_picture", spin_dm);
    r.matrix("path_picture", path_dm);
    Ok(r)
}

/// Opposite-spin input through a user-supplied network.
pub fn scenario_network(net: &Network, statistics: Statistics) -> Result<ScenarioReport> {
    let input = net.opposite_spin_input(statistics)?;
    let out = run_network(net, &input)?;
    let branches = detect(&out, net.monitored());
    let spec: serde_json::Value = serde_json::from_str(&net.to_json()).unwrap_or(serde_json::Value::Null);
    let mut r = ScenarioReport::new("network", json!({ "statistics": statistics, "network": spec }));
    r.exact("yield", branches.coincidence_probability());
    r.exact("splitters", net.splitters().len());
    r.exact("detectors", net.monitored().len());
    r.tables.push(branch_table(&branches)?);
    r.tables.push(amplitude_table(&out));
    Ok(r)
}

/// Catalog entry for one scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub parameters: &'static [&'static str],
    /// The claim the scenario reproduces.
    pub anchor: &'static str,
}

/// Sorted catalog of the shipped scenarios.
pub const CATALOG: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "complementarity",
        parameters: &["statistics", "grid"],
        anchor: "coincidence concurrence E and distinguishability D satisfy E + D = 1",
    },
    ScenarioInfo {
        name: "dual",
        parameters: &["statistics", "grid"],
        anchor: "spin-labelled and path-labelled readings carry the same entanglement",
    },
    ScenarioInfo {
        name: "feedback",
        parameters: &["statistics", "depth", "trials", "seed"],
        anchor: "re-injecting failures into one splitter drives failure down as 2^-N",
    },
    ScenarioInfo {
        name: "fig1",
        parameters: &["statistics", "equal-spins"],
        anchor: "single splitter heralds a spin Bell pair with probability 1/2",
    },
    ScenarioInfo {
        name: "fig2",
        parameters: &["statistics"],
        anchor: "three splitters herald a Bell pair on a detector pair 75% of the time",
    },
    ScenarioInfo {
        name: "gaussian",
        parameters: &["statistics", "v", "sigma", "dt-max", "grid"],
        anchor: "delayed Gaussian packets give E = exp(-v^2 dt^2 / 2 sigma^2)",
    },
    ScenarioInfo {
        name: "mixed-input",
        parameters: &["statistics"],
        anchor: "unpolarized bosons herald psi-, unpolarized fermions a separable state",
    },
    ScenarioInfo {
        name: "statistics-test",
        parameters: &["statistics"],
        anchor: "rotated spin correlation is +1 for fermions and -1 for bosons",
    },
    ScenarioInfo {
        name: "tree",
        parameters: &["statistics", "depth"],
        anchor: "2^N-output splitter tree heralds entangled pairs with yield 1 - 2^-N",
    },
];

pub fn list_scenarios() -> &'static [ScenarioInfo] {
    CATALOG
}

/// Map from excitation pattern to Bell label for the coincidence rows of a branch table.
pub fn bell_by_pattern(report: &ScenarioReport) -> BTreeMap<String, String> {
    report
        .table("branches")
        .map(|t| {
            t.rows
                .iter()
                .filter(|r| r[3].as_str().is_some_and(|s| s != "-"))
                .map(|r| (r[0].to_string(), r[3].to_string()))
                .collect()
        })
        .unwrap_or_default()
}
