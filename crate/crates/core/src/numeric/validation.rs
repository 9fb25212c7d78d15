use serde::Serialize;

use super::generator::GeneratorFunction;
use super::linalg::{eigenvalues, expm, matrix_log_principal, op_norm, CMatrix};
use super::magnus::{exponent_sum, magnus_terms_tree, reference_propagator, TermEstimate};
use super::quadrature::QuadratureConfig;
use super::NumericError;
use crate::bounds::{magnus_term_bound, truncation_bound, BoundValue, DELTA_XI};

/// Multiplier on quadrature error estimates in the pass criterion.
pub const SLACK_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRow {
    pub n: usize,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    /// `bound − measured`.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationRow {
    pub order: usize,
    /// `‖log U_ref − 𝓜^(N)‖`.
    pub measured: f64,
    /// `‖U_ref − exp 𝓜^(N)‖`, reported without a bound.
    pub propagator_difference: f64,
    pub bound: BoundValue,
    pub slack: f64,
    /// The bound's hypothesis `x < 1` holds.
    pub applicable: bool,
    pub margin: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The principal logarithm of the reference propagator is unusable.
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub dimension: usize,
    pub t: f64,
    pub h_max: f64,
    pub x: f64,
    pub n_max: usize,
    pub per_term: Vec<TermRow>,
    pub truncation: Vec<TruncationRow>,
    pub propagator_error_estimate: f64,
    pub rejection: Option<String>,
    pub status: Status,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn term_rows(terms: &[TermEstimate], h_max: f64, t: f64) -> Result<Vec<TermRow>, NumericError> {
    terms
        .iter()
        .map(|e| {
            let bound = magnus_term_bound(e.n, h_max, t)?;
            let slack = SLACK_FACTOR * e.error_estimate;
            Ok(TermRow {
                n: e.n,
                measured: e.norm,
                bound,
                slack,
                margin: bound - e.norm,
                pass: e.norm <= bound + slack,
            })
        })
        .collect()
}

/// Eigenvalues of `U_ref† exp(𝓜)` closer than this to `−1` reject the
/// instance.
pub const BRANCH_DISTANCE: f64 = 1e-3;

fn branch_check(u_ref: &CMatrix, exponent: &CMatrix) -> Result<(), String> {
    let spectrum_limit = std::f64::consts::PI - BRANCH_DISTANCE;
    for lambda in eigenvalues(exponent) {
        if lambda.im.abs() >= spectrum_limit {
            return Err(format!(
                "exponent eigenvalue {lambda} lies outside the principal strip"
            ));
        }
    }
    let w = u_ref.adjoint() * expm(exponent);
    for lambda in eigenvalues(&w) {
        if (lambda + 1.0).norm() < BRANCH_DISTANCE {
            return Err(format!("U_ref^† exp(M) has eigenvalue {lambda} near -1"));
        }
    }
    Ok(())
}

/// Measures `‖M_n‖` against the per-term bound and `‖log U_ref − 𝓜^(N)‖`
/// against the truncation bound for `n, N ≤ n_max`.
pub fn validate_bounds(
    gen: &GeneratorFunction,
    t: f64,
    n_max: usize,
    quad: &QuadratureConfig,
) -> Result<ValidationReport, NumericError> {
    let h_max = gen.h_max(t);
    let x = DELTA_XI * h_max * t;
    let terms = magnus_terms_tree(n_max, gen, t, quad)?;
    let per_term = term_rows(&terms, h_max, t)?;
    let propagator = reference_propagator(gen, t, quad.tolerance.min(1e-10))?;
    let full = exponent_sum(&terms, n_max);

    let mut report = ValidationReport {
        dimension: gen.dimension(),
        t,
        h_max,
        x,
        n_max,
        per_term,
        truncation: Vec::new(),
        propagator_error_estimate: propagator.error_estimate,
        rejection: None,
        status: Status::Pass,
    };

    let log_u = match branch_check(&propagator.matrix, &full)
        .and_then(|()| matrix_log_principal(&propagator.matrix).map_err(|e| e.to_string()))
    {
        Ok(l) => l,
        Err(reason) => {
            report.rejection = Some(reason);
            report.status = Status::Rejected;
            return Ok(report);
        }
    };

    let mut quad_error = 0.0;
    for n in 1..=n_max {
        quad_error += terms[n - 1].error_estimate;
        let partial = exponent_sum(&terms, n);
        let measured = op_norm(&(&log_u - &partial));
        let propagator_difference = op_norm(&(&propagator.matrix - expm(&partial)));
        let bound = truncation_bound(n, h_max, t)?;
        let slack = SLACK_FACTOR * (quad_error + propagator.error_estimate);
        let (margin, pass) = match bound {
            BoundValue::Finite(b) => (Some(b - measured), Some(measured <= b + slack)),
            BoundValue::Diverged => (None, None),
        };
        report.truncation.push(TruncationRow {
            order: n,
            measured,
            propagator_difference,
            bound,
            slack,
            applicable: bound.is_finite(),
            margin,
            pass,
        });
    }

    let all_pass = report.per_term.iter().all(|r| r.pass)
        && report.truncation.iter().all(|r| r.pass != Some(false));
    report.status = if all_pass { Status::Pass } else { Status::Fail };
    Ok(report)
}
