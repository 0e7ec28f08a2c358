//! Exact arithmetic: rationals, sparse polynomials, rational functions and
//! linear algebra over both fields.

pub mod linalg;
pub mod poly;
pub mod ratfunc;
pub mod rational;

pub use linalg::{Echelon, Entry, FunctionMatrix, Matrix, PolyMatrix, RationalMatrix};
pub use poly::{gcd, Monomial, Polynomial};
pub use ratfunc::RationalFunction;
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0}")]
    Parse(String),
}
