use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Contract violations and numeric failures surfaced by the simulator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("cutoff dimension must be at least 2, got {0}")]
    InvalidCutoff(usize),
    #[error("mode count must be at least 1")]
    NoModes,
    #[error("operator is not Hermitian: max deviation {0:.3e}")]
    NotHermitian(f64),
    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("duplicate target mode {0}")]
    DuplicateTarget(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operators built with different hbar conventions: {0} vs {1}")]
    HbarMismatch(f64, f64),
    #[error("mode count mismatch: {0} vs {1}")]
    ModeCountMismatch(usize, usize),
    #[error("gate expects {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("non-finite gate parameter")]
    NonFiniteParam,
    #[error("parameter vector has length {got}, circuit needs {expected}")]
    ParamVectorLength { expected: usize, got: usize },
    #[error("parameter slot {slot} out of range for {q} slots")]
    SlotOutOfRange { slot: usize, q: usize },
    #[error("parameter slot {0} is never referenced by any gate")]
    UnreferencedSlot(usize),
    #[error("state norm drifted to {0} after gate application")]
    NormDrift(f64),
    #[error("expectation value has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),
    #[error("probability threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),
    #[error("mixer and problem Hamiltonians commute: counterdiabatic pool is degenerate")]
    DegeneratePool,
    #[error("no pool family is realizable with the whitelisted gates")]
    NoRealizableAnsatz,
    #[error("cost function is not quadratic in photon numbers: {0}")]
    NotQuadratic(String),
    #[error("invalid problem data: {0}")]
    InvalidProblem(String),
    #[error("brute-force search space has {points} points, limit is {limit}")]
    SearchSpaceTooLarge { points: u128, limit: u128 },
    #[error("energy became non-finite at iteration {0}")]
    NonFiniteEnergy(usize),
    #[error("invalid optimizer configuration: {0}")]
    InvalidOptimizerConfig(String),
}
