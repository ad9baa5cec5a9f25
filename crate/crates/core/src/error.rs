use thiserror::Error;

/// Errors raised when constructing or combining grids, maps and systems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("grids are not compatible: {0}")]
    Mismatch(String),

    #[error("level {level} exceeds the quantization limit {levels}")]
    LevelOutOfRange { level: u32, levels: u16 },

    #[error("threshold {0} is not on the quantization lattice")]
    OffLattice(f64),

    #[error("fuzzy set is not normal (no cell reaches the top level)")]
    NotNormal,

    #[error("empty cell set")]
    EmptySet,

    #[error("cell index {index} outside grid of {len} cells")]
    CellOutOfRange { index: usize, len: usize },

    #[error("cut stack is not nested: level {level} is not contained in level {below}")]
    NotNested { level: usize, below: usize },

    #[error("invalid grey level map: {0}")]
    InvalidGreyMap(String),

    #[error("grey system is not admissible: {0}")]
    NotAdmissible(String),

    #[error("map {index}: Lipschitz bound {lambda} >= 1")]
    NotContractive { index: usize, lambda: f64 },

    #[error("map {index}: {reason}")]
    InvalidMap { index: usize, reason: String },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("epsilon {epsilon} is too small for this grid; minimum is {minimum}")]
    EpsilonTooSmall { epsilon: f64, minimum: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
