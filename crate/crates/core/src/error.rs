use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Pauli exclusion: fermionic mode {0} is occupied more than once")]
    PauliExclusion(String),

    #[error("matrix is not unitary (max deviation from identity {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("malformed single-particle unitary: {0}")]
    MalformedUnitary(String),

    #[error("statistics mismatch: {0:?} vs {1:?}")]
    StatisticsMismatch(crate::fock::Statistics, crate::fock::Statistics),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("input occupies path {0} which is not a network input")]
    UnsupportedInput(String),

    #[error("impossible post-selection: no branch satisfies the predicate")]
    ImpossiblePostSelection,

    #[error("tree depth {0} out of range 1..=12")]
    InvalidDepth(usize),

    #[error("expected exactly {expected} particles, found {found}")]
    ParticleNumber { expected: usize, found: usize },

    #[error("pattern {0} is not a two-detector coincidence of this network")]
    NotCoincidence(String),

    #[error("monomial {0} violates the occupancy precondition")]
    Occupancy(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("overlap magnitude {0} exceeds 1")]
    InvalidOverlap(f64),

    #[error("packet width must be positive, got {0}")]
    InvalidWidth(f64),

    #[error("Bloch vector has norm {0}, expected 1")]
    InvalidObservable(f64),

    #[error("first-quantized state violates exchange symmetry (deviation {0:.3e})")]
    SymmetryViolation(f64),

    #[error("mode {0} is outside the oracle basis")]
    OutsideBasis(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
