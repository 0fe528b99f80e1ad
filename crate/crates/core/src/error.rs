use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational literal: {0:?}")]
    InvalidRational(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("group signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("{0} is not supported: {1}")]
    Unsupported(&'static str, String),

    #[error("the region is not a k-tiling (profile has {0} distinct multiplicities)")]
    NotAKTiling(usize),

    #[error("arity mismatch: expected {expected} points, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("point is not in the generation-{0} dyadic lattice")]
    NotInDyadicLattice(u32),

    #[error("tuple search exhausted after {tries} tries (worst min squared singular value {worst:.3e})")]
    TupleSearchExhausted { tries: u32, worst: f64 },

    #[error("duplicate shifts after reduction modulo the lattice")]
    DuplicateShifts,

    #[error("base character outside the kernel annihilator")]
    CharacterNotInAnnihilator,

    #[error("kernel order {order} does not divide the factor order {factor}")]
    KernelOrderMismatch { order: u64, factor: u64 },

    #[error("degenerate approximation: {0}")]
    DegenerateApproximation(String),

    #[error("truncation window too small: {rows} sample rows for {cols} basis functions")]
    WindowTooSmall { rows: usize, cols: usize },
}
