//! Exact arithmetic: rationals, factorials, Bernoulli numbers.

mod bernoulli;
mod rational;

pub use bernoulli::{bernoulli, BernoulliTable};
pub use rational::{binomial, factorial, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational `{0}`")]
    Parse(String),
}
