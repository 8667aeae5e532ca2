use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no root of the cyclotomic polynomial of order {m} modulo {p}")]
    NoRoot { m: u32, p: u64 },
    #[error("unsupported cyclotomic order {0} (expected 1, 3 or 4)")]
    UnsupportedOrder(u32),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} is below the supported range (p >= 7)")]
    PrimeTooSmall(u64),
    #[error("valuation not certified below precision {cap}")]
    PrecisionExhausted { cap: u32 },
    #[error("scalars from different cyclotomic fields were combined")]
    FieldMismatch,
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("module is not admissible: fil1 = span({witness}) is phi-stable")]
    NotAdmissible { witness: String },
    #[error("no cyclic vector found in fil1")]
    NoCyclicVector,
    #[error("no scalar power of phi up to exponent {0}")]
    NoCentralPower(usize),
    #[error("identity matrix missing from the Lie closure")]
    ScalarsMissing,
    #[error("Lie algebra of dimension {0} is outside the classified list")]
    UnclassifiedDimension(usize),
    #[error("point is not semistable")]
    NotSemistable,
    #[error("valuation region {0} carries no adapted lattice")]
    RegionWithoutLattice(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
