//! Computational laboratory for random Cayley graphs of Heisenberg groups.
//!
//! `H_{p,d}` is the group of `d x d` upper triangular matrices with unit
//! diagonal and entries mod a prime `p`; its order is `p^(d(d-1)/2)` and its
//! Abelianisation (read off the super-diagonal) is `Z_p^(d-1)`. The crate
//! provides four layers:
//!
//! - [`group`]: exact element arithmetic, ranking, Abelianisation, word
//!   products and word statistics;
//! - [`entropic`]: Poisson entropy, entropic times, the `Q` statistic and its
//!   concentration;
//! - [`walk`]: generator sampling, exact distribution evolution, total
//!   variation and collision diagnostics, typicality sets;
//! - [`geometry`]: lattice-ball volumes, BFS distance histograms, typical
//!   distance and the counting bound.
//!
//! Everything is deterministic given a seed; experiments expose the seed they
//! consumed so runs can be replayed bit for bit.

pub mod entropic;
pub mod geometry;
pub mod group;
pub mod rng;
pub mod walk;

pub use group::{GroupElement, GroupParams, Word, WordStats};
pub use walk::{DistVector, GeneratorSet};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported range (must be < 2^31)")]
    ModulusTooLarge(u64),
    #[error("matrix dimension must be at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("operands belong to different group parameters")]
    ParamMismatch,
    #[error("entry {value} is out of range for modulus {p}")]
    EntryOutOfRange { value: u64, p: u64 },
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("word letter {letter} is outside 1..={k}")]
    LetterOutOfRange { letter: u32, k: usize },
    #[error("rank is outside [0, n)")]
    RankOutOfRange,
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("group order {order} exceeds the dense cap {cap}")]
    CapExceeded { order: String, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible target: {0}")]
    Infeasible(String),
    #[error("requested mass {requested} not reachable: {unreachable} elements unreachable")]
    NotEnoughMass { requested: f64, unreachable: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
