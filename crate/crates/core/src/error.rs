use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field size q = {q} exceeds the budget {budget}")]
    FieldTooLarge { q: u64, budget: u64 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete logarithm of zero")]
    DlogOfZero,
    #[error("{code} is not an element of F_{q}")]
    NotAnElement { code: u64, q: u64 },
    #[error("{0} does not generate the multiplicative group")]
    NotAGenerator(u64),
    #[error("exponent difference matrix is singular (collinear exponent vectors)")]
    SingularB,
    #[error("matrix does not have full rank")]
    RankDeficient,
    #[error("negative exponent {0}: full point counts need polynomial exponents")]
    NegativeExponent(i64),
    #[error("full table for q = {q} exceeds the table budget {budget}")]
    TableTooLarge { q: u64, budget: u64 },
    #[error("invalid element orders: {0}")]
    InvalidOrders(String),
    #[error("invalid delta case: {0}")]
    InvalidCase(String),
    #[error("genus expression is odd: {0}/2")]
    NonIntegralGenus(i64),
    #[error("genus expression is negative: {0}/2")]
    NegativeGenus(i64),
    #[error("exponents are not in the normalized shape a12 = a21 = 0, a11 >= a22: {0}")]
    UnnormalizedExponents(String),
    #[error("local analysis does not match the expected case split: {0}")]
    CaseMismatch(String),
    #[error("family does not have the required shape: {0}")]
    ShapeMismatch(String),
    #[error("no solution of u^2 + 27 v^2 = 4p for p = {0}")]
    NoSolution(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
