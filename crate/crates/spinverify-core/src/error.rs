use alloc::string::String;

/// Errors raised by the kernels. Every variant carries enough context to
/// reproduce the failing input.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("discriminant {0} is not a nonzero square-free integer")]
    BadDiscriminant(i64),
    #[error("series orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("expected a single monomial, got {0} terms")]
    NotMonomial(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("not a symplectic similitude: entry ({row},{col}) of g J tg is {value}")]
    NotSymplectic { row: usize, col: usize, value: String },
    #[error("determinant {0} is not rational")]
    IrrationalDeterminant(String),
    #[error("element is outside the expected subgroup: {0}")]
    WrongShape(String),
    #[error("shifted congruence needs D = 1 mod 4, got {0}")]
    ShiftedNeedsOneMod4(i64),
    #[error("bad reduction: p = {p} divides 2D with D = {d}")]
    BadReduction { p: u64, d: i64 },
    #[error("half-integral power of p in {0}")]
    HalfPower(String),
    #[error("resolution unstable: {coarse} at M vs {fine} at M+1")]
    ResolutionUnstable { coarse: String, fine: String },
    #[error("torus element does not reduce to a normal-form Levi coset: {0}")]
    ReductionFailure(String),
    #[error("pole of Gamma at {0}")]
    GammaPole(f64),
    #[error("quadrature did not converge: estimated error {0:e}")]
    Quadrature(f64),
    #[error("tail bound {bound:e} at radius {radius} exceeds the tolerance; try radius {suggested}")]
    RadiusTooSmall { radius: f64, bound: f64, suggested: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
