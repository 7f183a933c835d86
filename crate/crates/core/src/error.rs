use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),
    #[error("polyomino cells must be two-dimensional, got dimension {0}")]
    NotPlanar(usize),
    #[error("degenerate scaling: factor must be non-zero")]
    DegenerateScaling,
    #[error(
        "non-generic window position: internal coordinate {coord} lies on a cell boundary; \
         perturb window_shift"
    )]
    NonGenericWindow { coord: f64 },
    #[error("invalid radius {0}: must be non-negative and finite")]
    InvalidRadius(f64),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("lag {lag} is not smaller than window length {len}")]
    LagTooLarge { lag: i64, len: usize },
    #[error("window of length {len} too short for block length {block} (need at least {needed})")]
    WindowTooShort { len: usize, block: usize, needed: usize },
    #[error("block length {0} outside 1..=20")]
    InvalidBlockLength(usize),
    #[error("comb is not binary: weight {weight} at index {index}")]
    NotBinary { index: i64, weight: f64 },
    #[error("empty factor list")]
    EmptyFactors,
    #[error("rank {k} out of range 0..={d}")]
    RankOutOfRange { k: usize, d: usize },
    #[error("materialisation of {0} weights exceeds the cap of 2^24")]
    TooLarge(u128),
    #[error("no additivity witness found on the search grid")]
    NoAdditivityWitness,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
