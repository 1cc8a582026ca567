use thiserror::Error;

/// Errors raised by the Skyrme toolkit. Every variant maps to its own CLI exit
/// code, so the messages are kept single-line and stable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("partial bracket: ad undefined")]
    PartialBracket,

    #[error("non-integral Killing trace {0}")]
    NonIntegralTrace(f64),

    #[error("log out of range (deviation {0:.3e})")]
    LogOutOfRange(f64),

    #[error("field too rough for this lattice")]
    FieldTooRough,

    #[error("axis does not close")]
    AxisDoesNotClose,

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no lift table for group {0}")]
    NoLiftTable(String),

    #[error("lattice too coarse to resolve sector (max residual {0:.3})")]
    UnresolvedSector(f64),

    #[error("not in the same holonomy stratum")]
    HolonomyStratum,

    #[error("connection not flat on cube (residual {0:.3e})")]
    NotFlat(f64),

    #[error("overlap constancy violated (score {0:.3e})")]
    OverlapConstancy(f64),

    #[error("holonomies differ (mismatch {0:.3e})")]
    HolonomiesDiffer(f64),

    #[error("atlas inconsistent (mismatch {0:.3e})")]
    AtlasInconsistent(f64),

    #[error("sector drift at iteration {0}")]
    SectorDrift(usize),

    #[error("stalled at iteration {0}")]
    Stalled(usize),

    #[error("no seed field for sector")]
    NoSeed,

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
