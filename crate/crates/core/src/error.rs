use thiserror::Error;

/// Failures surfaced by the workbench.
///
/// Mathematical negative answers (a pair of lattices that is not isogenous, a
/// subset that is not strong) are ordinary return values, not errors. The
/// variants below are reserved for inputs that are malformed and for
/// questions the certified arithmetic could not decide.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("undecided up to search bound {bound}")]
    UnknownUpToBound { bound: u32 },
    #[error("argument is a lattice point (pole)")]
    PoleAtLatticePoint,
    #[error("cannot decide whether the argument lies on the lattice")]
    UndecidablePoleProximity,
    #[error("points cannot be separated at working precision: {0}")]
    IndistinguishableBranch(String),
    #[error("no anchor places the shifted argument in the safe region")]
    NoSafeAnchor,
    #[error("ground set of {size} coordinates exceeds the exhaustive cap of {cap}")]
    GroundSetTooLarge { size: usize, cap: usize },
    #[error("base set is not strong: violated by {0}")]
    BaseNotStrong(String),
    #[error("lower set is not strong in the upper set: violated by {0}")]
    NotStrong(String),
    #[error("configuration is not intersection-compatible: {0}")]
    IncompatibleConfiguration(String),
    #[error("singular specialization: {0}")]
    SingularSpecialization(String),
    #[error("rank not certified: {0}")]
    RankNotCertified(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("file error: {0}")]
    File(String),
}

pub type Result<T> = std::result::Result<T, Error>;
