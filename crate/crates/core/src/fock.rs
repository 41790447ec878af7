//! Sparse second-quantized states of a few identical particles.
//!
//! A [`FockState`] is a superposition of creation-operator monomials acting
//! on the vacuum. Each monomial is stored in canonical (sorted) mode order;
//! the sign picked up by reordering fermionic operators is folded into the
//! amplitude when the monomial is built. Amplitudes multiply *raw* monomials,
//! so a bosonic mode occupied `k` times contributes `k!` to the self-overlap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes smaller than this are dropped after every operation.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-12;

/// Tolerance used when validating unitary matrices.
pub const UNITARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// Sign picked up by exchanging two creation operators.
    pub fn exchange_sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Boson => f.pad("boson"),
            Statistics::Fermion => f.pad("fermion"),
        }
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "boson" | "bosons" => Ok(Statistics::Boson),
            "fermion" | "fermions" => Ok(Statistics::Fermion),
            other => Err(Error::InvalidParameter(format!("unknown statistics '{other}'"))),
        }
    }
}

/// Opaque, totally ordered path label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(String);

impl Path {
    pub fn new(name: impl Into<String>) -> Self {
        Path(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Path {
    fn from(s: &str) -> Self {
        Path(s.to_owned())
    }
}

impl From<String> for Path {
    fn from(s: String) -> Self {
        Path(s)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Spin projection. `Up` sorts before `Down` and is basis index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_index(i: usize) -> Spin {
        if i == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spin::Up => f.write_str("↑"),
            Spin::Down => f.write_str("↓"),
        }
    }
}

/// A single-particle mode: path, spin and an internal (non-spin) tag.
///
/// The derived ordering is lexicographic on (path, spin, tag) and defines
/// the canonical order of creation operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub path: Path,
    pub spin: Spin,
    pub tag: u8,
}

impl Mode {
    pub fn new(path: impl Into<Path>, spin: Spin) -> Self {
        Mode {
            path: path.into(),
            spin,
            tag: 0,
        }
    }

    pub fn tagged(path: impl Into<Path>, spin: Spin, tag: u8) -> Self {
        Mode {
            path: path.into(),
            spin,
            tag,
        }
    }

    pub fn up(path: impl Into<Path>) -> Self {
        Mode::new(path, Spin::Up)
    }

    pub fn down(path: impl Into<Path>) -> Self {
        Mode::new(path, Spin::Down)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.path, self.spin)?;
        if self.tag != 0 {
            write!(f, "#{}", self.tag)?;
        }
        Ok(())
    }
}

/// Canonically sorted sequence of creation operators (repeats allowed for bosons).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<Mode>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    /// Canonical monomial for the operator string `modes[0] modes[1] ... |0>`,
    /// together with the reordering sign. `None` if a fermionic mode repeats.
    pub fn from_operators(statistics: Statistics, modes: &[Mode]) -> Option<(Monomial, f64)> {
        let mut mono = Monomial::vacuum();
        let mut sign = 1.0;
        for mode in modes.iter().rev() {
            let (next, s) = mono.create(statistics, mode)?;
            mono = next;
            sign *= s;
        }
        Some((mono, sign))
    }

    /// Left-multiplies by `a†_mode` and re-sorts.
    fn create(&self, statistics: Statistics, mode: &Mode) -> Option<(Monomial, f64)> {
        let pos = self.0.partition_point(|m| m < mode);
        let sign = match statistics {
            Statistics::Boson => 1.0,
            Statistics::Fermion => {
                if self.0.get(pos) == Some(mode) {
                    return None;
                }
                if pos % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        let mut modes = Vec::with_capacity(self.0.len() + 1);
        modes.extend_from_slice(&self.0[..pos]);
        modes.push(mode.clone());
        modes.extend_from_slice(&self.0[pos..]);
        Some((Monomial(modes), sign))
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplicity of each distinct mode.
    pub fn occupations(&self) -> BTreeMap<&Mode, usize> {
        let mut occ = BTreeMap::new();
        for m in &self.0 {
            *occ.entry(m).or_insert(0) += 1;
        }
        occ
    }

    /// Π k! over mode multiplicities, the squared norm of the raw monomial.
    pub fn self_overlap(&self) -> f64 {
        self.occupations()
            .values()
            .map(|&k| (1..=k).map(|i| i as f64).product::<f64>())
            .product()
    }

    pub fn paths(&self) -> BTreeSet<&Path> {
        self.0.iter().map(|m| &m.path).collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        if self.0.is_empty() {
            f.write_str("vac")?;
        }
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("⟩")
    }
}

/// Linear map on single-particle modes, given as a unitary matrix over an
/// explicit mode list. Column `j` is the image of `domain[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleUnitary {
    domain: Vec<Mode>,
    matrix: DMatrix<Complex64>,
}

impl SingleParticleUnitary {
    pub fn new(domain: Vec<Mode>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = domain.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::MalformedUnitary(format!(
                "{}x{} matrix for a domain of {} modes",
                matrix.nrows(),
                matrix.ncols(),
                n
            )));
        }
        let distinct: BTreeSet<&Mode> = domain.iter().collect();
        if distinct.len() != n {
            return Err(Error::MalformedUnitary("domain lists a mode twice".into()));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARY_TOLERANCE {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(SingleParticleUnitary { domain, matrix })
    }

    pub fn domain(&self) -> &[Mode] {
        &self.domain
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `other · self`: apply `self` first, then `other`. Domains must match.
    pub fn then(&self, other: &SingleParticleUnitary) -> Result<SingleParticleUnitary> {
        if self.domain != other.domain {
            return Err(Error::MalformedUnitary("composition over different domains".into()));
        }
        SingleParticleUnitary::new(self.domain.clone(), &other.matrix * &self.matrix)
    }

    fn images(&self) -> BTreeMap<&Mode, Vec<(&Mode, Complex64)>> {
        self.domain
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let col = self
                    .domain
                    .iter()
                    .enumerate()
                    .filter_map(|(i, n)| {
                        let c = self.matrix[(i, j)];
                        (c != Complex64::new(0.0, 0.0)).then_some((n, c))
                    })
                    .collect();
                (m, col)
            })
            .collect()
    }
}

/// max |(U†U − I)_{ij}|
pub fn unitarity_deviation(matrix: &DMatrix<Complex64>) -> f64 {
    if matrix.nrows() != matrix.ncols() {
        return f64::INFINITY;
    }
    let product = matrix.adjoint() * matrix;
    let mut worst: f64 = 0.0;
    for i in 0..product.nrows() {
        for j in 0..product.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - target).norm());
        }
    }
    worst
}

/// Superposition of creation-operator monomials applied to the vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    statistics: Statistics,
    terms: BTreeMap<Monomial, Complex64>,
    prune_threshold: f64,
}

impl FockState {
    pub fn vacuum(statistics: Statistics) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::vacuum(), Complex64::new(1.0, 0.0));
        FockState {
            statistics,
            terms,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
        }
    }

    /// The zero vector (no terms), useful as an accumulator.
    pub fn zero(statistics: Statistics) -> Self {
        FockState {
            statistics,
            terms: BTreeMap::new(),
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
        }
    }

    /// `a†_{modes[0]} a†_{modes[1]} ... |0⟩`.
    pub fn product(statistics: Statistics, modes: &[Mode]) -> Result<Self> {
        let (mono, sign) = Monomial::from_operators(statistics, modes).ok_or_else(|| {
            let mut seen = BTreeSet::new();
            let dup = modes.iter().find(|m| !seen.insert(*m)).map(|m| m.to_string());
            Error::PauliExclusion(dup.unwrap_or_default())
        })?;
        let mut state = FockState::zero(statistics);
        state.terms.insert(mono, Complex64::new(sign, 0.0));
        state.normalized()
    }

    /// Builds a state from raw monomial amplitudes (operator order as given per term).
    pub fn from_terms<I>(statistics: Statistics, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Mode>, Complex64)>,
    {
        let mut state = FockState::zero(statistics);
        for (modes, amp) in terms {
            let (mono, sign) = Monomial::from_operators(statistics, &modes)
                .ok_or_else(|| Error::PauliExclusion(format!("{modes:?}")))?;
            *state.terms.entry(mono).or_insert(Complex64::new(0.0, 0.0)) += amp * sign;
        }
        state.prune();
        Ok(state)
    }

    pub fn with_prune_threshold(mut self, threshold: f64) -> Self {
        self.prune_threshold = threshold;
        self.prune();
        self
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune_threshold
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Raw amplitude of a canonical monomial.
    pub fn amplitude(&self, mono: &Monomial) -> Complex64 {
        self.terms.get(mono).copied().unwrap_or_default()
    }

    /// Amplitude of the operator string `modes` (any order), i.e. the
    /// coefficient `c` in `c · a†_{modes[0]} ... |0⟩` within this state.
    pub fn amplitude_of(&self, modes: &[Mode]) -> Complex64 {
        match Monomial::from_operators(self.statistics, modes) {
            Some((mono, sign)) => self.amplitude(&mono) * sign,
            None => Complex64::default(),
        }
    }

    /// Amplitude on the normalized occupation-number state for `mono`.
    pub fn number_state_amplitude(&self, mono: &Monomial) -> Complex64 {
        self.amplitude(mono) * mono.self_overlap().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(m, c)| c.norm_sqr() * m.self_overlap()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < 1e-9
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    /// Sum of two states with the same statistics.
    pub fn add(&self, other: &FockState) -> Result<Self> {
        self.check_statistics(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            *out.terms.entry(m.clone()).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    /// ⟨self|other⟩ with the k! occupation factors.
    pub fn inner_product(&self, other: &FockState) -> Result<Complex64> {
        self.check_statistics(other)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(m, c)| other.terms.get(m).map(|d| c.conj() * d * m.self_overlap()))
            .sum())
    }

    /// |⟨x|y⟩|² / (⟨x|x⟩⟨y|y⟩); 1 iff the states agree up to a global phase.
    pub fn fidelity(&self, other: &FockState) -> Result<f64> {
        let ov = self.inner_product(other)?;
        let n = self.norm_sqr() * other.norm_sqr();
        if n <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(ov.norm_sqr() / n)
    }

    /// Applies `c · a†_mode` summed over the given combination (left multiplication).
    pub fn create(&self, combination: &[(Mode, Complex64)]) -> Result<Self> {
        let mut out: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (mono, amp) in &self.terms {
            for (mode, c) in combination {
                if let Some((next, sign)) = mono.create(self.statistics, mode) {
                    *out.entry(next).or_default() += amp * c * sign;
                }
            }
        }
        let mut state = self.with_terms(out);
        state.prune();
        if state.terms.is_empty() && !self.terms.is_empty() {
            return Err(Error::PauliExclusion(format!("{combination:?}")));
        }
        Ok(state)
    }

    /// Replaces every `a†_m` (m in the domain) by `Σ_n u[n,m] a†_n` and re-expands.
    pub fn apply_unitary(&self, u: &SingleParticleUnitary) -> Self {
        let mut state = self.clone();
        state.apply_unitary_in_place(u);
        state
    }

    /// In-place [`apply_unitary`](Self::apply_unitary). Only monomials with a
    /// particle in the domain are re-expanded.
    pub fn apply_unitary_in_place(&mut self, u: &SingleParticleUnitary) {
        let images = u.images();
        let touched: Vec<Monomial> = self
            .terms
            .keys()
            .filter(|m| m.modes().iter().any(|x| images.contains_key(x)))
            .cloned()
            .collect();
        let mut produced: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for mono in touched {
            let amp = self.terms.remove(&mono).expect("touched monomial is present");
            let mut partial: BTreeMap<Monomial, Complex64> = BTreeMap::new();
            partial.insert(Monomial::vacuum(), amp);
            for mode in mono.modes().iter().rev() {
                let identity;
                let image: &[(&Mode, Complex64)] = match images.get(mode) {
                    Some(img) => img,
                    None => {
                        identity = [(mode, Complex64::new(1.0, 0.0))];
                        &identity
                    }
                };
                let mut next: BTreeMap<Monomial, Complex64> = BTreeMap::new();
                for (m, a) in &partial {
                    for (target, c) in image {
                        if let Some((created, sign)) = m.create(self.statistics, target) {
                            *next.entry(created).or_default() += a * c * sign;
                        }
                    }
                }
                partial = next;
            }
            for (m, a) in partial {
                *produced.entry(m).or_default() += a;
            }
        }
        // images stay inside the domain, so produced terms never collide with untouched ones
        let t = self.prune_threshold;
        self.terms.extend(produced.into_iter().filter(|(_, c)| c.norm() >= t));
    }

    /// Applies the 2×2 unitary `rotation` (basis ↑, ↓) to the spin of every
    /// particle in `path`, for every tag present there.
    pub fn apply_spin_rotation(&self, path: &Path, rotation: &Matrix2<Complex64>) -> Result<Self> {
        let dynamic = DMatrix::from_iterator(2, 2, rotation.iter().copied());
        let deviation = unitarity_deviation(&dynamic);
        if deviation > UNITARY_TOLERANCE {
            return Err(Error::NonUnitary { deviation });
        }
        let tags: BTreeSet<u8> = self
            .terms
            .keys()
            .flat_map(|m| m.modes().iter())
            .filter(|m| &m.path == path)
            .map(|m| m.tag)
            .collect();
        if tags.is_empty() {
            return Ok(self.clone());
        }
        let mut domain = Vec::with_capacity(2 * tags.len());
        for &t in &tags {
            domain.push(Mode::tagged(path.clone(), Spin::Up, t));
            domain.push(Mode::tagged(path.clone(), Spin::Down, t));
        }
        let n = domain.len();
        let mut matrix = DMatrix::zeros(n, n);
        for k in 0..tags.len() {
            for i in 0..2 {
                for j in 0..2 {
                    matrix[(2 * k + i, 2 * k + j)] = rotation[(i, j)];
                }
            }
        }
        let u = SingleParticleUnitary::new(domain, matrix)?;
        Ok(self.apply_unitary(&u))
    }

    /// Renames paths (e.g. re-routing an output back into an input port),
    /// re-canonicalizing with exchange signs.
    pub fn map_paths<F>(&self, mut rename: F) -> Result<Self>
    where
        F: FnMut(&Path) -> Path,
    {
        let mut out: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (mono, amp) in &self.terms {
            let modes: Vec<Mode> = mono
                .modes()
                .iter()
                .map(|m| Mode {
                    path: rename(&m.path),
                    ..m.clone()
                })
                .collect();
            let (next, sign) = Monomial::from_operators(self.statistics, &modes)
                .ok_or_else(|| Error::PauliExclusion(format!("{mono}")))?;
            *out.entry(next).or_default() += amp * sign;
        }
        let mut state = self.with_terms(out);
        state.prune();
        Ok(state)
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter_terms<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&Monomial) -> bool,
    {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| keep(m))
            .map(|(m, c)| (m.clone(), *c))
            .collect();
        self.with_terms(terms)
    }

    /// Splits the terms into unnormalized components keyed by `key`.
    pub fn partition<K, F>(&self, mut key: F) -> BTreeMap<K, FockState>
    where
        K: Ord,
        F: FnMut(&Monomial) -> K,
    {
        let mut groups: BTreeMap<K, BTreeMap<Monomial, Complex64>> = BTreeMap::new();
        for (m, c) in &self.terms {
            groups.entry(key(m)).or_default().insert(m.clone(), *c);
        }
        groups
            .into_iter()
            .map(|(k, terms)| (k, self.with_terms(terms)))
            .collect()
    }

    /// Particle numbers appearing in the superposition.
    pub fn particle_numbers(&self) -> BTreeSet<usize> {
        self.terms.keys().map(Monomial::len).collect()
    }

    pub fn occupied_paths(&self) -> BTreeSet<&Path> {
        self.terms
            .keys()
            .flat_map(|m| m.modes().iter().map(|md| &md.path))
            .collect()
    }

    pub fn tags(&self) -> BTreeSet<u8> {
        self.terms
            .keys()
            .flat_map(|m| m.modes().iter().map(|md| md.tag))
            .collect()
    }

    /// Largest absolute amplitude difference after aligning global phase on
    /// the largest term of `self`. States are compared as given (no renormalization).
    pub fn distance_up_to_phase(&self, other: &FockState) -> f64 {
        let phase = self
            .terms
            .iter()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(m, c)| {
                let d = other.amplitude(m);
                if d.norm() > 0.0 && c.norm() > 0.0 {
                    (c / d) / (c / d).norm()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .unwrap_or(Complex64::new(1.0, 0.0));
        self.max_difference(&other.scaled(phase))
    }

    /// Largest absolute difference between raw amplitudes.
    pub fn max_difference(&self, other: &FockState) -> f64 {
        let keys: BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|m| (self.amplitude(m) - other.amplitude(m)).norm())
            .fold(0.0, f64::max)
    }

    fn with_terms(&self, terms: BTreeMap<Monomial, Complex64>) -> Self {
        FockState {
            statistics: self.statistics,
            terms,
            prune_threshold: self.prune_threshold,
        }
    }

    fn prune(&mut self) {
        let t = self.prune_threshold;
        self.terms.retain(|_, c| c.norm() >= t);
    }

    fn check_statistics(&self, other: &FockState) -> Result<()> {
        if self.statistics != other.statistics {
            return Err(Error::StatisticsMismatch(self.statistics, other.statistics));
        }
        Ok(())
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", c.re, c.im, m)?;
        }
        Ok(())
    }
}

/// Normalized product state `a†_{modes[0]} a†_{modes[1]} ... |0⟩`.
pub fn make_product_state(statistics: Statistics, modes: &[Mode]) -> Result<FockState> {
    FockState::product(statistics, modes)
}

/// Hadamard-like spin rotation ↑ → (↑+↓)/√2, ↓ → (↑−↓)/√2.
pub fn hadamard() -> Matrix2<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Matrix2::new(
        Complex64::new(h, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fermion_product_in_canonical_order_has_unit_amplitude() {
        let s = make_product_state(Statistics::Fermion, &[Mode::up("A"), Mode::down("B")]).unwrap();
        assert_eq!(s.num_terms(), 1);
        let (mono, amp) = s.terms().next().unwrap();
        assert_eq!(mono.modes(), &[Mode::up("A"), Mode::down("B")]);
        assert_eq!(*amp, c(1.0, 0.0));
    }

    #[test]
    fn fermion_reversed_product_carries_minus_sign() {
        let s = make_product_state(Statistics::Fermion, &[Mode::down("B"), Mode::up("A")]).unwrap();
        let (mono, amp) = s.terms().next().unwrap();
        assert_eq!(mono.modes(), &[Mode::up("A"), Mode::down("B")]);
        assert_eq!(*amp, c(-1.0, 0.0));
    }

    #[test]
    fn boson_product_is_order_independent() {
        let a = make_product_state(Statistics::Boson, &[Mode::down("B"), Mode::up("A")]).unwrap();
        let b = make_product_state(Statistics::Boson, &[Mode::up("A"), Mode::down("B")]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_fermion_mode_is_rejected() {
        let err = make_product_state(Statistics::Fermion, &[Mode::up("A"), Mode::up("A")]).unwrap_err();
        assert!(matches!(err, Error::PauliExclusion(_)));
    }

    #[test]
    fn doubly_occupied_boson_mode_is_normalized_with_factorial() {
        let s = make_product_state(Statistics::Boson, &[Mode::up("C"), Mode::up("C")]).unwrap();
        let (mono, amp) = s.terms().next().unwrap();
        assert!((amp.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.number_state_amplitude(mono).re - 1.0).abs() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_monomials_have_zero_overlap() {
        let x = make_product_state(Statistics::Boson, &[Mode::up("A"), Mode::down("B")]).unwrap();
        let y = make_product_state(Statistics::Boson, &[Mode::down("A"), Mode::up("B")]).unwrap();
        assert_eq!(x.inner_product(&y).unwrap(), c(0.0, 0.0));
        assert!((x.inner_product(&x).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_across_statistics_is_rejected() {
        let x = FockState::vacuum(Statistics::Boson);
        let y = FockState::vacuum(Statistics::Fermion);
        assert!(matches!(x.inner_product(&y), Err(Error::StatisticsMismatch(..))));
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let err = SingleParticleUnitary::new(vec![Mode::up("A"), Mode::up("B")], m).unwrap_err();
        assert!(matches!(err, Error::NonUnitary { .. }));
        let s = FockState::product(Statistics::Boson, &[Mode::up("C")]).unwrap();
        let bad = Matrix2::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            s.apply_spin_rotation(&"C".into(), &bad),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn hadamard_rotation_on_single_spin() {
        let s = FockState::product(Statistics::Fermion, &[Mode::up("C")]).unwrap();
        let r = s.apply_spin_rotation(&"C".into(), &hadamard()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.amplitude_of(&[Mode::up("C")]) - c(h, 0.0)).norm() < 1e-15);
        assert!((r.amplitude_of(&[Mode::down("C")]) - c(h, 0.0)).norm() < 1e-15);
        let back = r.apply_spin_rotation(&"C".into(), &hadamard()).unwrap();
        assert!(back.max_difference(&s) < 1e-15);
        let ident = s.apply_spin_rotation(&"C".into(), &Matrix2::identity()).unwrap();
        assert_eq!(ident, s);
    }

    #[test]
    fn rotation_leaves_other_paths_untouched() {
        let s = FockState::product(Statistics::Fermion, &[Mode::up("C"), Mode::up("D")]).unwrap();
        let r = s.apply_spin_rotation(&"C".into(), &hadamard()).unwrap();
        for (m, _) in r.terms() {
            assert!(m.modes().contains(&Mode::up("D")));
        }
    }

    #[test]
    fn pruning_drops_tiny_amplitudes() {
        let s = FockState::from_terms(
            Statistics::Boson,
            vec![(vec![Mode::up("A")], c(1.0, 0.0)), (vec![Mode::up("B")], c(1e-13, 0.0))],
        )
        .unwrap();
        assert_eq!(s.num_terms(), 1);
        let kept = FockState::from_terms(Statistics::Boson, vec![(vec![Mode::up("B")], c(1e-6, 0.0))])
            .unwrap()
            .with_prune_threshold(1e-3);
        assert_eq!(kept.num_terms(), 0);
    }

    #[test]
    fn relabeling_paths_resorts_with_sign() {
        let s = make_product_state(Statistics::Fermion, &[Mode::up("A"), Mode::down("B")]).unwrap();
        let swapped = s
            .map_paths(|p| if p.as_str() == "A" { "Z".into() } else { p.clone() })
            .unwrap();
        // a†_{Z↑} a†_{B↓} = −a†_{B↓} a†_{Z↑}
        assert_eq!(swapped.amplitude_of(&[Mode::down("B"), Mode::up("Z")]), c(-1.0, 0.0));
    }
}
