//! Generating-function analysis of the tree coefficients: exact power
//! series, the cotangent ODE and its integral, and the Lambert-W
//! coefficient formula with its scaling constants.

mod generating;
mod power_series;
mod scaling;

pub use generating::{
    bernoulli_weight_series, cot_half_series, lhs_integral_series, ode_rhs_series, verify_ode,
    LogSeries, OdeReport, PRINTED_ORDER_FOUR,
};
pub use power_series::PowerSeries;
pub use scaling::{
    beta_sweep, delta_from_beta, emit_phi_curve, estimate_beta, estimate_beta_for, ln_nu_hat,
    nu_hat, phi, phi_argmax, phi_curve_csv, phi_peak_bound, sweep_csv, ScalingError, ScalingReport,
    BETA_BRACKET, DEFAULT_K_CUT,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("coefficient x^{index} is beyond the series order {order}")]
    BeyondOrder { index: usize, order: usize },
    #[error("division by a series with zero leading coefficient")]
    ZeroDivision,
    #[error("composition requires an inner series with zero constant term")]
    NonzeroConstant,
    #[error("order {required} requested but only {available} is known")]
    OrderMismatch { required: usize, available: usize },
    #[error("coefficient x^{index} must vanish")]
    NonzeroLowOrder { index: usize },
    #[error("order must be at least {min}, got {got}")]
    InvalidOrder { min: usize, got: usize },
}
