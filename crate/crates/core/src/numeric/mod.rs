//! Numerical Magnus terms for small matrix generators `A(t) = −iH(t)`
//! (`ħ = 1`, so the `1/(iħ)^n` prefactors of the textbook formulas are
//! absorbed into `A`) and checks of the closed-form bounds against them.

mod config;
mod generator;
mod linalg;
mod magnus;
mod quadrature;
mod validation;

pub use config::{run_simulation, Family, SimulationConfig, Span};
pub use generator::{random_generator, Envelope, GeneratorFunction};
pub use linalg::{
    anti_hermitian_defect, commutator, eigenvalues, expm, identity, matrix_csv,
    matrix_log_principal, op_norm, pauli_x, pauli_y, pauli_z, unitarity_defect, CMatrix,
    BRANCH_MARGIN,
};
pub use magnus::{
    exponent_sum, magnus_term_direct, magnus_term_tree, magnus_terms_tree, reference_propagator,
    truncated_propagator, Propagator, TermEstimate, MAX_TREE_ORDER,
};
pub use quadrature::{cumulative, gauss_legendre, gauss_legendre_on, QuadratureConfig, Scheme};
pub use validation::{
    validate_bounds, Status, TermRow, TruncationRow, ValidationReport, BRANCH_DISTANCE,
    SLACK_FACTOR,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::bounds::BoundError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("term matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is singular")]
    Singular,
    #[error("eigenvalue {eigenvalue} is on or near the branch cut of the principal logarithm")]
    BranchCut { eigenvalue: Complex64 },
    #[error("{what} did not converge: reached {achieved:e}, tolerance {tolerance:e}")]
    NonConvergence {
        what: String,
        achieved: f64,
        tolerance: f64,
    },
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("order {n} outside 1..={max}")]
    InvalidOrder { n: usize, max: usize },
    #[error("{}", match line { Some(l) => format!("config line {l}: {message}"), None => format!("config: {message}") })]
    Config {
        line: Option<usize>,
        message: String,
    },
    #[error(transparent)]
    Bound(#[from] BoundError),
}
