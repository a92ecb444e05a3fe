//! Error types shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Two series mention a variable with the same name but different kinds.
    #[error("incompatible variable lists: {0}")]
    IncompatibleVars(String),

    /// A window propagation rule produced an empty window for `var`.
    #[error("window underflow in variable {var}")]
    WindowUnderflow { var: String },

    /// Inversion was requested for a series whose leading term is not a unit
    /// monomial (for example, a series divisible by a power-kind variable).
    #[error("not a unit: {0}")]
    NotAUnit(String),

    /// A coordinate must satisfy f(0) = 0 and f'(0) = 1.
    #[error("not a coordinate: {0}")]
    NotACoordinate(String),

    /// Theta-structure arities are restricted to 1..=4.
    #[error("arity out of range: {0}")]
    ArityOutOfRange(usize),

    /// The torsion point (l, k) = (0, 0) is the identity, not a translate.
    #[error("degenerate torsion point (0, 0)")]
    DegenerateTorsionPoint,

    /// A precondition on exp/log arguments failed.
    #[error("exp/log precondition violated: {0}")]
    ExpLogPrecondition(String),

    /// Cyclotomic elements of different conductors cannot be mixed.
    #[error("mismatched cyclotomic conductors {0} and {1}")]
    CyclotomicMismatch(u32, u32),

    /// Generic parameter-bound violation (ranks, levels, dimensions).
    #[error("parameter out of bounds: {0}")]
    Bounds(String),

    /// Malformed input data (manifold spec files, serialized series).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
