use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not alternating")]
    NotAlternating,
    #[error("odd dimension {0} for an alternating form")]
    OddDimension(usize),
    #[error("form is degenerate")]
    Degenerate,
    #[error("entry {0} is not integral")]
    NotIntegral(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("order is imaginary quadratic")]
    ImaginaryOrder,
    #[error("invalid quadratic order: {0}")]
    InvalidOrder(String),
    #[error("form times rho(t) is not skew; t is not compatible with the form")]
    NotSymmetricCompatible,
    #[error("action does not satisfy its minimal polynomial")]
    BadAction,
    #[error("form is not principal (|Pf| = {0})")]
    NotPrincipal(String),
    #[error("period columns are not in symplectic order: {0}")]
    NotSymplecticOrder(String),
    #[error("singular period block")]
    SingularPeriods,
    #[error("torsion generator has infinite order")]
    InfiniteOrder,
    #[error("action is not integral (residual {0})")]
    NonIntegralAction(String),
    #[error("degenerate lattice")]
    DegenerateLattice,
    #[error("theta truncation radius {0} exceeds the cap")]
    PrecisionUnreachable(usize),
    #[error("{0} theta nulls below the vanishing threshold")]
    AmbiguousVanishing(usize),
    #[error("curve is singular (zero discriminant)")]
    SingularCurve,
    #[error("I10 vanishes")]
    ZeroI10,
    #[error("bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("field of size {0} exceeds the point-counting cap")]
    FieldTooLarge(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("point counts give a non-integral e2")]
    NonIntegral,
    #[error("{0} has no square root modulo {1}")]
    Inert(i64, u64),
    #[error("no candidate matches")]
    NoMatch,
    #[error("both candidates match")]
    BothMatch,
}

pub type Result<T> = std::result::Result<T, Error>;
