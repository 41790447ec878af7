//! Brute-force first-quantized simulator for exactly two particles.
//!
//! States are dense amplitude matrices `ψ[i][j]` over ordered pairs of
//! single-particle labels, symmetric for bosons and antisymmetric for
//! fermions. Evolution is `ψ → U ψ Uᵀ`. Nothing here reuses the Fock
//! engine's evolution code; only the mapping convention is shared:
//!
//! ```text
//! c · a†_p a†_q |0⟩  ↔  (c/√2)(|p⟩|q⟩ ± |q⟩|p⟩)   (p ≠ q)
//! c · a†_p a†_p |0⟩  ↔  c·√2 |p⟩|p⟩                (bosons)
//! ```

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, Mode, Path, SingleParticleUnitary, Spin, Statistics};
use crate::interferometer::{BeamSplitter, ExcitationPattern, Network};
use crate::metrics::TwoQubitDM;

pub const MAX_PATHS: usize = 16;
pub const MAX_TAGS: u8 = 4;

/// Label space: every (path, spin, tag) for the listed paths and `tags` tag values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleBasis {
    paths: Vec<Path>,
    tags: u8,
}

impl OracleBasis {
    pub fn new(paths: Vec<Path>, tags: u8) -> Result<Self> {
        let unique: BTreeSet<&Path> = paths.iter().collect();
        if unique.len() != paths.len() || paths.len() > MAX_PATHS || tags == 0 || tags > MAX_TAGS {
            return Err(Error::InvalidParameter(format!(
                "oracle basis needs ≤{MAX_PATHS} distinct paths and 1..={MAX_TAGS} tags"
            )));
        }
        Ok(OracleBasis { paths, tags })
    }

    /// All paths touched by a network, in first-seen order.
    pub fn for_network(net: &Network, tags: u8) -> Result<Self> {
        let mut paths: Vec<Path> = Vec::new();
        let mut push = |p: &Path| {
            if !paths.contains(p) {
                paths.push(p.clone());
            }
        };
        net.inputs().iter().for_each(&mut push);
        for s in net.splitters() {
            s.paths().into_iter().for_each(&mut push);
        }
        net.monitored().iter().for_each(&mut push);
        OracleBasis::new(paths, tags)
    }

    pub fn dim(&self) -> usize {
        self.paths.len() * 2 * self.tags as usize
    }

    pub fn index(&self, mode: &Mode) -> Result<usize> {
        let p = self
            .paths
            .iter()
            .position(|q| q == &mode.path)
            .ok_or_else(|| Error::OutsideBasis(mode.to_string()))?;
        if mode.tag >= self.tags {
            return Err(Error::OutsideBasis(mode.to_string()));
        }
        Ok((p * 2 + mode.spin.index()) * self.tags as usize + mode.tag as usize)
    }

    pub fn mode(&self, index: usize) -> Mode {
        let t = self.tags as usize;
        let tag = (index % t) as u8;
        let rest = index / t;
        Mode::tagged(self.paths[rest / 2].clone(), Spin::from_index(rest % 2), tag)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstQuantizedState {
    statistics: Statistics,
    basis: OracleBasis,
    amplitudes: DMatrix<Complex64>,
}

impl FirstQuantizedState {
    /// Builds `Σ c · a†_p a†_q |0⟩` through the first-quantized mapping, normalized.
    pub fn from_pairs(statistics: Statistics, basis: OracleBasis, pairs: &[(Complex64, Mode, Mode)]) -> Result<Self> {
        let amplitudes = assemble(statistics, &basis, pairs)?;
        FirstQuantizedState {
            statistics,
            basis,
            amplitudes,
        }
        .normalized()
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn basis(&self) -> &OracleBasis {
        &self.basis
    }

    /// Amplitude on the ordered pair (p, q).
    pub fn amplitude(&self, p: &Mode, q: &Mode) -> Result<Complex64> {
        Ok(self.amplitudes[(self.basis.index(p)?, self.basis.index(q)?)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        self.amplitudes /= Complex64::new(n.sqrt(), 0.0);
        Ok(self)
    }

    /// max |ψ − (±)ψᵀ|
    pub fn symmetry_violation(&self) -> f64 {
        let sign = Complex64::new(self.statistics.exchange_sign(), 0.0);
        (&self.amplitudes - self.amplitudes.transpose() * sign)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn check_symmetry(&self) -> Result<()> {
        let v = self.symmetry_violation();
        if v > 1e-12 {
            return Err(Error::SymmetryViolation(v));
        }
        Ok(())
    }

    /// Largest amplitude difference after aligning the global phase.
    pub fn distance_up_to_phase(&self, other: &FirstQuantizedState) -> f64 {
        let inner: Complex64 = self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| b.conj() * a)
            .sum();
        let phase = if inner.norm() > 0.0 {
            inner / inner.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        (&self.amplitudes - &other.amplitudes * phase)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_difference(&self, other: &FirstQuantizedState) -> f64 {
        (&self.amplitudes - &other.amplitudes)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Dense single-particle matrix over the oracle basis for a mode-level unitary.
fn embed(basis: &OracleBasis, u: &SingleParticleUnitary) -> Result<DMatrix<Complex64>> {
    let n = basis.dim();
    let mut full = DMatrix::identity(n, n);
    let idx: Vec<usize> = u.domain().iter().map(|m| basis.index(m)).collect::<Result<_>>()?;
    for &i in &idx {
        full[(i, i)] = Complex64::default();
    }
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            full[(i, j)] = u.matrix()[(a, b)];
        }
    }
    Ok(full)
}

/// Applies `u ⊗ u`.
pub fn oracle_evolve(state: &FirstQuantizedState, u: &SingleParticleUnitary) -> Result<FirstQuantizedState> {
    state.check_symmetry()?;
    let full = embed(&state.basis, u)?;
    Ok(evolve_dense(state, &full))
}

fn evolve_dense(state: &FirstQuantizedState, u: &DMatrix<Complex64>) -> FirstQuantizedState {
    FirstQuantizedState {
        amplitudes: u * &state.amplitudes * u.transpose(),
        ..state.clone()
    }
}

/// Single-particle matrix of a splitter, written out directly from the port rules.
pub fn splitter_matrix(basis: &OracleBasis, bs: &BeamSplitter) -> Result<DMatrix<Complex64>> {
    let n = basis.dim();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = Complex64::new(h, 0.0);
    let r = Complex64::new(0.0, h);
    let mut u = DMatrix::identity(n, n);
    for spin in [Spin::Up, Spin::Down] {
        for tag in 0..basis.tags {
            let at = |p: &Path| basis.index(&Mode::tagged(p.clone(), spin, tag));
            let (i1, i2, o1, o2) = (at(&bs.in1)?, at(&bs.in2)?, at(&bs.out1)?, at(&bs.out2)?);
            for k in [i1, i2, o1, o2] {
                u[(k, k)] = Complex64::default();
            }
            u[(o1, i1)] = t;
            u[(o2, i1)] = r;
            u[(o2, i2)] = t;
            u[(o1, i2)] = r;
            u[(i1, o1)] = t;
            u[(i2, o1)] = r;
            u[(i1, o2)] = r;
            u[(i2, o2)] = t;
        }
    }
    Ok(u)
}

/// Runs every splitter of `net` in order.
pub fn oracle_run(net: &Network, state: &FirstQuantizedState) -> Result<FirstQuantizedState> {
    state.check_symmetry()?;
    let mut out = state.clone();
    for bs in net.splitters() {
        out = evolve_dense(&out, &splitter_matrix(&state.basis, bs)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBranch {
    pub pattern: ExcitationPattern,
    pub probability: f64,
    pub state: FirstQuantizedState,
}

/// Projective grouping of ordered pairs by which monitored paths they occupy.
pub fn oracle_detect(state: &FirstQuantizedState, monitored: &[Path]) -> Vec<OracleBranch> {
    let monitored: BTreeSet<&Path> = monitored.iter().collect();
    let n = state.basis.dim();
    let mut groups: BTreeMap<ExcitationPattern, Vec<(usize, usize)>> = BTreeMap::new();
    let total = state.norm_sqr();
    for i in 0..n {
        for j in 0..n {
            if state.amplitudes[(i, j)].norm() < 1e-12 {
                continue;
            }
            let (p, q) = (state.basis.mode(i).path, state.basis.mode(j).path);
            let pattern = ExcitationPattern::new([p, q].into_iter().filter(|x| monitored.contains(x)));
            groups.entry(pattern).or_default().push((i, j));
        }
    }
    groups
        .into_iter()
        .map(|(pattern, cells)| {
            let mut amps = DMatrix::zeros(n, n);
            let mut weight = 0.0;
            for (i, j) in cells {
                amps[(i, j)] = state.amplitudes[(i, j)];
                weight += state.amplitudes[(i, j)].norm_sqr();
            }
            amps /= Complex64::new(weight.sqrt(), 0.0);
            OracleBranch {
                pattern,
                probability: weight / total,
                state: FirstQuantizedState {
                    amplitudes: amps,
                    ..state.clone()
                },
            }
        })
        .collect()
}

/// Spin density matrix of a state with one particle in `x` and one in `y`,
/// read off the ordered-pair amplitudes with the `x` particle first and the
/// tag factor traced out.
pub fn oracle_spin_dm(state: &FirstQuantizedState, x: &Path, y: &Path) -> Result<TwoQubitDM> {
    if x == y {
        return Err(Error::Occupancy(format!("paths coincide: {x}")));
    }
    let tags = state.basis.tags;
    let mut rho = Matrix4::<Complex64>::zeros();
    for t1 in 0..tags {
        for t2 in 0..tags {
            let mut v = [Complex64::new(0.0, 0.0); 4];
            for (k, (s1, s2)) in [
                (Spin::Up, Spin::Up),
                (Spin::Up, Spin::Down),
                (Spin::Down, Spin::Up),
                (Spin::Down, Spin::Down),
            ]
            .into_iter()
            .enumerate()
            {
                v[k] = state.amplitude(&Mode::tagged(x.clone(), s1, t1), &Mode::tagged(y.clone(), s2, t2))?;
            }
            for i in 0..4 {
                for j in 0..4 {
                    rho[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
    }
    let trace = (0..4).map(|i| rho[(i, i)].re).sum::<f64>();
    if trace < 1e-12 {
        return Err(Error::Occupancy(format!(
            "no amplitude with one particle in each of {x}, {y}"
        )));
    }
    // off-pair weight means some amplitude has both particles elsewhere
    let total = state.norm_sqr();
    if (2.0 * trace - total).abs() > 1e-9 * total.max(1.0) {
        return Err(Error::Occupancy(format!(
            "state is not confined to one particle in each of {x}, {y}"
        )));
    }
    TwoQubitDM::new(rho / Complex64::new(trace, 0.0), [x.to_string(), y.to_string()])
}

/// Maps a two-particle Fock state into the first-quantized picture over a
/// basis built from its own paths and tags.
pub fn cross_check(fock: &FockState) -> Result<FirstQuantizedState> {
    let paths: Vec<Path> = fock.occupied_paths().into_iter().cloned().collect();
    let tags = fock.tags().into_iter().max().map_or(1, |t| t + 1);
    cross_check_in(fock, &OracleBasis::new(paths, tags)?)
}

/// Same mapping over an explicit basis.
pub fn cross_check_in(fock: &FockState, basis: &OracleBasis) -> Result<FirstQuantizedState> {
    let mut pairs = Vec::with_capacity(fock.num_terms());
    for (mono, amp) in fock.terms() {
        match mono.modes() {
            [p, q] => pairs.push((*amp, p.clone(), q.clone())),
            other => {
                return Err(Error::ParticleNumber {
                    expected: 2,
                    found: other.len(),
                })
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::ParticleNumber { expected: 2, found: 0 });
    }
    let amplitudes = assemble(fock.statistics(), basis, &pairs)?;
    Ok(FirstQuantizedState {
        statistics: fock.statistics(),
        basis: basis.clone(),
        amplitudes,
    })
}

fn assemble(
    statistics: Statistics,
    basis: &OracleBasis,
    pairs: &[(Complex64, Mode, Mode)],
) -> Result<DMatrix<Complex64>> {
    let n = basis.dim();
    let sign = statistics.exchange_sign();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = DMatrix::zeros(n, n);
    for (c, p, q) in pairs {
        let (i, j) = (basis.index(p)?, basis.index(q)?);
        if i == j {
            if statistics == Statistics::Fermion {
                return Err(Error::PauliExclusion(p.to_string()));
            }
            amps[(i, i)] += c * std::f64::consts::SQRT_2;
        } else {
            amps[(i, j)] += c * h;
            amps[(j, i)] += c * h * sign;
        }
    }
    Ok(amps)
}
