use thiserror::Error;

use crate::fock::LocalOp;
use crate::poly::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("cannot substitute a non-monomial for {0}, which occurs with a negative exponent")]
    NegativeExponentSubstitution(Var),
    #[error("{0} is bound to 0 but occurs with a negative exponent")]
    DivisionByZero(Var),
    #[error("value bound to {0} is not invertible in the coefficient ring")]
    NotInvertible(Var),
    #[error("division leaves a nonzero remainder")]
    InexactDivision,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("{op:?} on |{m}> exceeds cutoff {cutoff}")]
    CutoffOverflow { op: LocalOp, m: u32, cutoff: u32 },
    #[error("occupancy {m} is above cutoff {cutoff}")]
    OccupancyOutOfRange { m: u32, cutoff: u32 },
    #[error("{0:?} has no q -> 0 limit")]
    NoLimit(LocalOp),
    #[error("{0:?} is not a q-oscillator operator")]
    NotQFamily(LocalOp),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("tensor kind {0} needs a spectral variable")]
    MissingVariable(&'static str),
    #[error("cutoff {0} is too small, need at least 3")]
    CutoffTooSmall(u32),
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("no candidate wiring reproduces the anchor values")]
    NoConventionFound,
    #[error("{0} candidate wirings reproduce the anchor values")]
    AmbiguousConvention(usize),
    #[error("n must be at least {min}, got {n}")]
    SizeTooSmall { n: u32, min: u32 },
    #[error("label {label} at position {pos} exceeds n = {n}")]
    InvalidLabel { label: u32, pos: usize, n: u32 },
    #[error("invalid layer product: {0}")]
    InvalidSpec(String),
    #[error("no variable bound to site ({0}, {1})")]
    UnboundSite(u32, u32),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("not a partition: {0:?}")]
    NotAPartition(Vec<i64>),
    #[error("{vars} variables cannot carry a partition of length {len}")]
    TooFewVariables { len: usize, vars: usize },
    #[error("block part values must weakly decrease")]
    BlocksNotDecreasing,
    #[error("sum did not reduce to a polynomial")]
    NonPolynomialResult,
    #[error("specialization is not integral")]
    NonIntegral,
    #[error(transparent)]
    Poly(#[from] PolyError),
}
