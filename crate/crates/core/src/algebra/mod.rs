//! Exact arithmetic kernels: rationals, sparse polynomials, rational
//! functions, truncated Laurent series and exact linear algebra.

mod laurent;
mod linalg;
mod poly;
mod ratfunc;
mod scalar;

pub use laurent::{SeriesCoeff, TruncatedLaurent};
pub use linalg::{determinant, exact_rank, exact_rank_bareiss, Matrix};
pub use poly::{Monomial, SparsePoly};
pub use ratfunc::RatFunc;
pub use scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),
    #[error("series is zero up to eps^{abs_precision}; raise the precision")]
    PrecisionExhausted { abs_precision: i64 },
    #[error("leading series coefficient is not invertible")]
    NonInvertibleCoefficient,
    #[error("quotient is not a polynomial")]
    NotDivisible,
    #[error("matrix is singular")]
    Singular,
}
