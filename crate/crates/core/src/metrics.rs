//! Two-qubit density matrices extracted from post-selected two-particle
//! states, and the quantities computed on them: concurrence, CHSH value,
//! distinguishability and the entanglement/distinguishability balance.
//!
//! Basis order is `{↑↑, ↑↓, ↓↑, ↓↓}` with the lexicographically smaller path
//! as qubit 1. In the dual picture the qubits are the paths of the ↑ and ↓
//! particle, with the smaller path as basis state 0.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, Matrix2, Matrix4, SymmetricEigen, Vector3, Vector4};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{FockState, Mode, Path, Spin, Statistics};
use crate::interferometer::{detect, fig1_network, postselect, run_network, ExcitationPattern};

/// Validation tolerance for density matrices.
pub const DM_TOLERANCE: f64 = 1e-9;

/// Eigenvalues of ρ below this are treated as zero when building the
/// square-root factor used by the concurrence.
const RANK_CUTOFF: f64 = 1e-13;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDM {
    matrix: Matrix4<Complex64>,
    labels: [String; 2],
}

impl TwoQubitDM {
    pub fn new(matrix: Matrix4<Complex64>, labels: [String; 2]) -> Result<Self> {
        let herm = (matrix - matrix.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > DM_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian ({herm:.3e})")));
        }
        let trace = matrix.trace();
        if (trace - cx(1.0, 0.0)).norm() > DM_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let min_eig = SymmetricEigen::new(matrix)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -DM_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(TwoQubitDM { matrix, labels })
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) amplitude vector.
    pub fn from_pure(amplitudes: [Complex64; 4], labels: [String; 2]) -> Result<Self> {
        let v = Vector4::from(amplitudes);
        let n = v.norm_squared();
        if n <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        TwoQubitDM::new(v * v.adjoint() / cx(n, 0.0), labels)
    }

    /// Convex combination; weights are renormalized.
    pub fn mixture(components: &[(f64, TwoQubitDM)]) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if components.is_empty() || total <= 0.0 || components.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::InvalidEnsemble(
                "mixture needs non-negative weights with positive sum".into(),
            ));
        }
        let labels = components[0].1.labels.clone();
        let mut m = Matrix4::zeros();
        for (w, dm) in components {
            m += dm.matrix * cx(w / total, 0.0);
        }
        TwoQubitDM::new(m, labels)
    }

    /// ½(|↑↓⟩⟨↑↓| + |↓↑⟩⟨↓↑|) ± (overlap_sq/2)(|↑↓⟩⟨↓↑| + |↓↑⟩⟨↑↓|), `+` for fermions.
    pub fn partially_distinguishable(overlap_sq: f64, statistics: Statistics, labels: [String; 2]) -> Result<Self> {
        if !(0.0..=1.0).contains(&overlap_sq) {
            return Err(Error::InvalidOverlap(overlap_sq.sqrt()));
        }
        let sign = -statistics.exchange_sign();
        let mut m = Matrix4::zeros();
        m[(1, 1)] = cx(0.5, 0.0);
        m[(2, 2)] = cx(0.5, 0.0);
        m[(1, 2)] = cx(sign * overlap_sq / 2.0, 0.0);
        m[(2, 1)] = cx(sign * overlap_sq / 2.0, 0.0);
        TwoQubitDM::new(m, labels)
    }

    pub fn maximally_mixed(labels: [String; 2]) -> Self {
        TwoQubitDM {
            matrix: Matrix4::identity() * cx(0.25, 0.0),
            labels,
        }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[String; 2] {
        &self.labels
    }

    /// Element in basis order ↑↑, ↑↓, ↓↑, ↓↓.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// Probabilities of the four z-basis outcomes.
    pub fn populations(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.matrix[(i, i)].re)
    }

    /// ⟨ψ|ρ|ψ⟩ for a normalized pure state.
    pub fn fidelity_with(&self, amplitudes: &[Complex64; 4]) -> f64 {
        let v = Vector4::from(*amplitudes);
        (v.adjoint() * self.matrix * v)[(0, 0)].re / v.norm_squared()
    }

    /// Tr[ρ (n₁·σ ⊗ n₂·σ)].
    pub fn correlation(&self, first: &Vector3<f64>, second: &Vector3<f64>) -> f64 {
        let op = bloch_operator(first).kronecker(&bloch_operator(second));
        (self.matrix * op).trace().re
    }

    /// U₁⊗U₂ ρ (U₁⊗U₂)†
    pub fn locally_rotated(&self, u1: &Matrix2<Complex64>, u2: &Matrix2<Complex64>) -> Result<Self> {
        let u = u1.kronecker(u2);
        TwoQubitDM::new(u * self.matrix * u.adjoint(), self.labels.clone())
    }

    /// Max absolute element difference.
    pub fn max_difference(&self, other: &TwoQubitDM) -> f64 {
        (self.matrix - other.matrix)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

impl Serialize for TwoQubitDM {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                let c = self.matrix[(i, j)];
                rows.push([c.re, c.im]);
            }
        }
        let mut st = serializer.serialize_struct("TwoQubitDM", 2)?;
        st.serialize_field("labels", &self.labels)?;
        st.serialize_field("matrix", &rows)?;
        st.end()
    }
}

fn bloch_operator(n: &Vector3<f64>) -> Matrix2<Complex64> {
    Matrix2::new(cx(n.z, 0.0), cx(n.x, -n.y), cx(n.x, n.y), cx(-n.z, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BellState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiPlus,
        BellState::PsiMinus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = cx(0.0, 0.0);
        match self {
            BellState::PsiPlus => [z, cx(h, 0.0), cx(h, 0.0), z],
            BellState::PsiMinus => [z, cx(h, 0.0), cx(-h, 0.0), z],
            BellState::PhiPlus => [cx(h, 0.0), z, z, cx(h, 0.0)],
            BellState::PhiMinus => [cx(h, 0.0), z, z, cx(-h, 0.0)],
        }
    }

    /// The Bell state with fidelity 1 (within `tol`), if any.
    pub fn identify(dm: &TwoQubitDM, tol: f64) -> Option<BellState> {
        BellState::ALL
            .into_iter()
            .find(|b| dm.fidelity_with(&b.amplitudes()) > 1.0 - tol)
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
        })
    }
}

/// Spin amplitude vectors keyed by the (tag in x, tag in y) pair.
fn spin_components(state: &FockState, x: &Path, y: &Path) -> Result<BTreeMap<(u8, u8), [Complex64; 4]>> {
    if x == y {
        return Err(Error::InvalidParameter(format!(
            "reduction needs two distinct paths, got {x} twice"
        )));
    }
    let (first, second) = if x < y { (x, y) } else { (y, x) };
    let mut out: BTreeMap<(u8, u8), [Complex64; 4]> = BTreeMap::new();
    for (mono, amp) in state.terms() {
        // canonical order already puts the smaller path first
        let ok = matches!(mono.modes(), [m1, m2] if &m1.path == first && &m2.path == second);
        if !ok {
            return Err(Error::Occupancy(mono.to_string()));
        }
        let (m1, m2) = (&mono.modes()[0], &mono.modes()[1]);
        let idx = 2 * m1.spin.index() + m2.spin.index();
        out.entry((m1.tag, m2.tag)).or_insert([Complex64::default(); 4])[idx] += amp;
    }
    if out.is_empty() {
        return Err(Error::ZeroNorm);
    }
    Ok(out)
}

/// Amplitudes of a state that is pure in spin (a single tag pair present).
pub fn spin_amplitudes(state: &FockState, x: &Path, y: &Path) -> Result<[Complex64; 4]> {
    let comps = spin_components(state, x, y)?;
    if comps.len() != 1 {
        return Err(Error::InvalidParameter(
            "spin state is entangled with internal tags".into(),
        ));
    }
    Ok(comps.into_values().next().expect("one component"))
}

fn sorted_labels(x: &Path, y: &Path) -> [String; 2] {
    if x < y {
        [x.to_string(), y.to_string()]
    } else {
        [y.to_string(), x.to_string()]
    }
}

/// Spin density matrix of a state with exactly one particle in each of two
/// paths, using the paths as particle labels and tracing out internal tags.
pub fn reduce_to_spin_dm(state: &FockState, x: &Path, y: &Path) -> Result<TwoQubitDM> {
    let comps = spin_components(state, x, y)?;
    let mut m = Matrix4::zeros();
    for v in comps.values() {
        let v = Vector4::from(*v);
        m += v * v.adjoint();
    }
    let trace = m.trace().re;
    if trace <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    TwoQubitDM::new(m / cx(trace, 0.0), sorted_labels(x, y))
}

/// Path density matrix with the spins as particle labels: qubit 1 is the
/// path of the ↑ particle, qubit 2 the path of the ↓ particle.
pub fn dual_relabel(state: &FockState, x: &Path, y: &Path) -> Result<TwoQubitDM> {
    let first = if x < y { x } else { y };
    let second = if x < y { y } else { x };
    if first == second {
        return Err(Error::InvalidParameter(format!(
            "dual picture needs two distinct paths, got {x} twice"
        )));
    }
    let path_index = |p: &Path| -> Option<usize> {
        if p == first {
            Some(0)
        } else if p == second {
            Some(1)
        } else {
            None
        }
    };
    let sign = state.statistics().exchange_sign();
    let mut v = [Complex64::default(); 4];
    for (mono, amp) in state.terms() {
        let [m1, m2] = mono.modes() else {
            return Err(Error::Occupancy(mono.to_string()));
        };
        if m1.tag != 0 || m2.tag != 0 || m1.spin == m2.spin {
            return Err(Error::Occupancy(mono.to_string()));
        }
        let (up, down, s) = if m1.spin == Spin::Up {
            (m1, m2, 1.0)
        } else {
            (m2, m1, sign)
        };
        let (Some(iu), Some(id)) = (path_index(&up.path), path_index(&down.path)) else {
            return Err(Error::Occupancy(mono.to_string()));
        };
        // bosonic |X↑;X↓⟩ is a distinct-mode product, so no occupation factor
        v[2 * iu + id] += amp * s;
    }
    TwoQubitDM::from_pure(v, [format!("{}", Spin::Up), format!("{}", Spin::Down)])
}

/// Wootters concurrence.
///
/// With ρ = W W† (W built from the eigenvectors scaled by √p), the λᵢ are
/// the singular values of τ = Wᵀ (σy⊗σy) W, which equal the square roots of
/// the eigenvalues of ρ (σy⊗σy) ρ* (σy⊗σy).
pub fn concurrence(dm: &TwoQubitDM) -> f64 {
    let eig = SymmetricEigen::new(dm.matrix);
    let kept: Vec<usize> = (0..4).filter(|&i| eig.eigenvalues[i] > RANK_CUTOFF).collect();
    if kept.is_empty() {
        return 0.0;
    }
    let mut w = DMatrix::<Complex64>::zeros(4, kept.len());
    for (col, &i) in kept.iter().enumerate() {
        let scale = eig.eigenvalues[i].sqrt();
        for r in 0..4 {
            w[(r, col)] = eig.eigenvectors[(r, i)] * scale;
        }
    }
    let yy = spin_flip();
    let tau = w.transpose() * yy * &w;
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas.resize(4, 0.0);
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// σy⊗σy, which is real.
fn spin_flip() -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 3)] = cx(-1.0, 0.0);
    m[(1, 2)] = cx(1.0, 0.0);
    m[(2, 1)] = cx(1.0, 0.0);
    m[(3, 0)] = cx(-1.0, 0.0);
    m
}

/// Four unit Bloch vectors: â, â′ on qubit 1 and b̂, b̂′ on qubit 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSettings {
    a: Vector3<f64>,
    a_prime: Vector3<f64>,
    b: Vector3<f64>,
    b_prime: Vector3<f64>,
}

impl ChshSettings {
    pub fn new(a: Vector3<f64>, a_prime: Vector3<f64>, b: Vector3<f64>, b_prime: Vector3<f64>) -> Result<Self> {
        for v in [&a, &a_prime, &b, &b_prime] {
            if (v.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidObservable(v.norm()));
            }
        }
        Ok(ChshSettings { a, a_prime, b, b_prime })
    }

    pub fn vectors(&self) -> [&Vector3<f64>; 4] {
        [&self.a, &self.a_prime, &self.b, &self.b_prime]
    }
}

impl Default for ChshSettings {
    /// â = σx, â′ = σy, b̂ = (σx+σy)/√2, b̂′ = (σx−σy)/√2.
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ChshSettings {
            a: Vector3::x(),
            a_prime: Vector3::y(),
            b: Vector3::new(h, h, 0.0),
            b_prime: Vector3::new(h, -h, 0.0),
        }
    }
}

/// ⟨âb̂ + âb̂′ + â′b̂ − â′b̂′⟩
pub fn chsh_expectation(dm: &TwoQubitDM, settings: &ChshSettings) -> f64 {
    let s = settings;
    dm.correlation(&s.a, &s.b) + dm.correlation(&s.a, &s.b_prime) + dm.correlation(&s.a_prime, &s.b)
        - dm.correlation(&s.a_prime, &s.b_prime)
}

/// Default-setting CHSH value divided by +2√2 (fermions) or −2√2 (bosons).
///
/// Only meaningful for the exchange-symmetric family built by
/// [`TwoQubitDM::partially_distinguishable`] and its images under the
/// single-splitter coincidence; membership is not checked.
pub fn infer_concurrence_from_chsh(dm: &TwoQubitDM, statistics: Statistics) -> f64 {
    let bound = 2.0 * std::f64::consts::SQRT_2;
    let divisor = match statistics {
        Statistics::Fermion => bound,
        Statistics::Boson => -bound,
    };
    chsh_expectation(dm, &ChshSettings::default()) / divisor
}

/// Overlap a = ⟨S₁|S₂⟩ of the particles' internal states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapParam(Complex64);

impl OverlapParam {
    pub fn new(a: Complex64) -> Result<Self> {
        if !a.norm().is_finite() || a.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidOverlap(a.norm()));
        }
        Ok(OverlapParam(a))
    }

    pub fn real(a: f64) -> Result<Self> {
        OverlapParam::new(cx(a, 0.0))
    }

    /// Real non-negative overlap with |a|² = `overlap_sq`.
    pub fn from_squared(overlap_sq: f64) -> Result<Self> {
        if !(0.0..=1.0 + 1e-12).contains(&overlap_sq) {
            return Err(Error::InvalidOverlap(overlap_sq.abs().sqrt()));
        }
        OverlapParam::real(overlap_sq.min(1.0).sqrt())
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn squared_magnitude(self) -> f64 {
        self.0.norm_sqr().min(1.0)
    }
}

/// Optimal discrimination probability for the two internal states, 1 − |a|².
pub fn distinguishability(a: OverlapParam) -> f64 {
    1.0 - a.squared_magnitude()
}

/// `a†_{A↑,S₁} a†_{B↓,S₂}|0⟩` with S₁ = tag 0 and S₂ = a·tag0 + √(1−|a|²)·tag1.
pub fn distinguishable_pair(statistics: Statistics, a: OverlapParam) -> Result<FockState> {
    let orth = (1.0 - a.squared_magnitude()).max(0.0).sqrt();
    FockState::from_terms(
        statistics,
        vec![
            (vec![Mode::up("A"), Mode::tagged("B", Spin::Down, 0)], a.value()),
            (vec![Mode::up("A"), Mode::tagged("B", Spin::Down, 1)], cx(orth, 0.0)),
        ],
    )?
    .normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complementarity {
    pub entanglement: f64,
    pub distinguishability: f64,
    pub sum: f64,
    /// Concurrence inferred from the CHSH value.
    pub entanglement_chsh: f64,
}

/// Coincidence spin state of the single splitter for a partially
/// distinguishable opposite-spin pair.
pub fn coincidence_spin_dm(a: OverlapParam, statistics: Statistics) -> Result<TwoQubitDM> {
    let net = fig1_network();
    let out = run_network(&net, &distinguishable_pair(statistics, a)?)?;
    let (_, cond) = postselect(&detect(&out, net.monitored()), ExcitationPattern::is_coincidence)?;
    let branch = &cond.branches[0];
    let (x, y) = branch.pattern.pair().expect("coincidence pattern");
    reduce_to_spin_dm(&branch.state, x, y)
}

/// Runs the partially distinguishable pair through the single splitter and
/// compares coincidence concurrence with distinguishability.
pub fn complementarity_check(a: OverlapParam, statistics: Statistics) -> Result<Complementarity> {
    let dm = coincidence_spin_dm(a, statistics)?;
    let e = concurrence(&dm);
    let d = distinguishability(a);
    Ok(Complementarity {
        entanglement: e,
        distinguishability: d,
        sum: e + d,
        entanglement_chsh: infer_concurrence_from_chsh(&dm, statistics),
    })
}

/// Overlap of two Gaussian packets of width σ and speed v delayed by dt,
/// defined by |a|² = exp(−v²dt²/2σ²).
pub fn gaussian_overlap(v: f64, dt: f64, sigma: f64) -> Result<OverlapParam> {
    if sigma.is_nan() || sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidWidth(sigma));
    }
    let a = (-(v * dt).powi(2) / (4.0 * sigma * sigma)).exp();
    OverlapParam::real(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::make_product_state;

    fn labels() -> [String; 2] {
        ["C".to_string(), "D".to_string()]
    }

    fn bell(b: BellState) -> TwoQubitDM {
        TwoQubitDM::from_pure(b.amplitudes(), labels()).unwrap()
    }

    #[test]
    fn bell_states_are_maximally_entangled() {
        for b in BellState::ALL {
            assert!((concurrence(&bell(b)) - 1.0).abs() < 1e-12, "{b}");
        }
    }

    #[test]
    fn product_state_has_zero_concurrence() {
        let s = make_product_state(Statistics::Fermion, &[Mode::up("C"), Mode::down("D")]).unwrap();
        let dm = reduce_to_spin_dm(&s, &"C".into(), &"D".into()).unwrap();
        assert!(concurrence(&dm) < 1e-12);
        assert!((dm.populations()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn werner_concurrence_matches_closed_form() {
        // ρ = p|ψ−⟩⟨ψ−| + (1−p)I/4 has C = max(0, (3p−1)/2)
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let dm = TwoQubitDM::mixture(&[
                (p, bell(BellState::PsiMinus)),
                (1.0 - p, TwoQubitDM::maximally_mixed(labels())),
            ])
            .unwrap();
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((concurrence(&dm) - expected).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn partially_distinguishable_family() {
        let dm = TwoQubitDM::partially_distinguishable(0.25, Statistics::Boson, labels()).unwrap();
        assert!((concurrence(&dm) - 0.25).abs() < 1e-12);
        assert!(TwoQubitDM::partially_distinguishable(1.5, Statistics::Boson, labels()).is_err());
    }

    #[test]
    fn invalid_matrices_are_rejected() {
        let mut m = Matrix4::identity() * cx(0.25, 0.0);
        m[(0, 1)] = cx(0.1, 0.0);
        assert!(TwoQubitDM::new(m, labels()).is_err());
        let m = Matrix4::identity() * cx(0.5, 0.0);
        assert!(TwoQubitDM::new(m, labels()).is_err());
        let mut m = Matrix4::zeros();
        m[(0, 0)] = cx(1.5, 0.0);
        m[(1, 1)] = cx(-0.5, 0.0);
        assert!(TwoQubitDM::new(m, labels()).is_err());
    }

    #[test]
    fn chsh_values() {
        let s = ChshSettings::default();
        let bound = 2.0 * std::f64::consts::SQRT_2;
        assert!((chsh_expectation(&bell(BellState::PsiMinus), &s) + bound).abs() < 1e-12);
        assert!((chsh_expectation(&bell(BellState::PsiPlus), &s) - bound).abs() < 1e-12);
        assert!(chsh_expectation(&TwoQubitDM::maximally_mixed(labels()), &s).abs() < 1e-12);
        assert!(ChshSettings::new(Vector3::x() * 2.0, Vector3::x(), Vector3::x(), Vector3::x()).is_err());
    }

    #[test]
    fn chsh_inference_on_family() {
        for (stats, a2) in [
            (Statistics::Boson, 1.0),
            (Statistics::Fermion, 0.5),
            (Statistics::Boson, 0.0),
        ] {
            let dm = TwoQubitDM::partially_distinguishable(a2, stats, labels()).unwrap();
            assert!((infer_concurrence_from_chsh(&dm, stats) - a2).abs() < 1e-12);
        }
    }

    #[test]
    fn distinguishability_values() {
        assert_eq!(distinguishability(OverlapParam::real(0.0).unwrap()), 1.0);
        assert_eq!(distinguishability(OverlapParam::real(1.0).unwrap()), 0.0);
        assert!((distinguishability(OverlapParam::from_squared(0.3).unwrap()) - 0.7).abs() < 1e-15);
        assert!(matches!(OverlapParam::real(1.2), Err(Error::InvalidOverlap(_))));
    }

    #[test]
    fn complementarity_endpoints() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let one = complementarity_check(OverlapParam::real(1.0).unwrap(), stats).unwrap();
            assert!((one.entanglement - 1.0).abs() < 1e-12 && one.distinguishability == 0.0);
            let zero = complementarity_check(OverlapParam::real(0.0).unwrap(), stats).unwrap();
            assert!(zero.entanglement.abs() < 1e-12 && zero.distinguishability == 1.0);
            let mid = complementarity_check(OverlapParam::from_squared(0.6).unwrap(), stats).unwrap();
            assert!((mid.entanglement - 0.6).abs() < 1e-9);
            assert!((mid.sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn complex_overlap_uses_magnitude_only() {
        let a = OverlapParam::new(Complex64::from_polar(0.8, 1.1)).unwrap();
        let r = complementarity_check(a, Statistics::Fermion).unwrap();
        assert!((r.entanglement - 0.64).abs() < 1e-9);
    }

    #[test]
    fn gaussian_overlap_values() {
        assert_eq!(gaussian_overlap(3.0, 0.0, 1.0).unwrap().squared_magnitude(), 1.0);
        let sigma = 0.7;
        let dt = sigma * 2f64.sqrt() / 2.0;
        let a = gaussian_overlap(2.0, dt, sigma).unwrap();
        assert!((a.squared_magnitude() - (-1f64).exp()).abs() < 1e-12);
        let mut last = 0.0;
        for s in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let v = gaussian_overlap(1.0, 1.0, s).unwrap().squared_magnitude();
            assert!(v > last);
            last = v;
        }
        assert!(matches!(gaussian_overlap(1.0, 1.0, 0.0), Err(Error::InvalidWidth(_))));
        assert!(matches!(gaussian_overlap(1.0, 1.0, -2.0), Err(Error::InvalidWidth(_))));
    }

    #[test]
    fn reduction_rejects_wrong_occupancy() {
        let s = make_product_state(Statistics::Boson, &[Mode::up("C"), Mode::down("C")]).unwrap();
        let err = reduce_to_spin_dm(&s, &"C".into(), &"D".into()).unwrap_err();
        assert!(matches!(err, Error::Occupancy(ref m) if m.contains("C↑")));
    }

    #[test]
    fn dual_picture_of_product_and_rejection() {
        let s = make_product_state(Statistics::Fermion, &[Mode::up("C"), Mode::down("D")]).unwrap();
        let dm = dual_relabel(&s, &"C".into(), &"D".into()).unwrap();
        assert!(concurrence(&dm) < 1e-12);
        let same = make_product_state(Statistics::Fermion, &[Mode::up("C"), Mode::up("D")]).unwrap();
        assert!(matches!(
            dual_relabel(&same, &"C".into(), &"D".into()),
            Err(Error::Occupancy(_))
        ));
        let tagged =
            make_product_state(Statistics::Fermion, &[Mode::up("C"), Mode::tagged("D", Spin::Down, 1)]).unwrap();
        assert!(matches!(
            dual_relabel(&tagged, &"C".into(), &"D".into()),
            Err(Error::Occupancy(_))
        ));
    }
}
