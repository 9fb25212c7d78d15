//! Closed-form bounds on Magnus terms and on the truncation error.
//!
//! With `x = δ_ξ·h_max·t` the per-term bound is `4 x^n / n²`, the truncation
//! bound is `4/(N+1)² · x^{N+1}/(1 − x)` for `x < 1`, and the tighter tail
//! bound is `4 Σ_{m>N} x^m/m²` for `x ≤ 1`. All returned values are rounded
//! one ulp upward.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Convergence radius `ξ` in units of `h_max·t`.
pub const XI: f64 = 1.086869;
/// `δ_ξ = 1/ξ` as a six-digit literal.
pub const DELTA_XI: f64 = 0.920075;
/// Prefactor of the per-term bound.
pub const DEFAULT_PREFACTOR: f64 = 4.0;
/// Constant of the coefficient envelope `m(n)`.
pub const ENVELOPE_CONSTANT: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("{name} must be finite and non-negative, got {value}")]
    InvalidInput { name: &'static str, value: f64 },
    #[error("relative tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

fn up(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.next_up()
    }
}

fn check_nonneg(name: &'static str, value: f64) -> Result<(), BoundError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(BoundError::InvalidInput { name, value })
    }
}

/// `c·δ_ξ^n·n^{−2}·2^{−n}`.
pub fn envelope_with_constant(c: f64, n: usize) -> Result<f64, BoundError> {
    if n == 0 {
        return Err(BoundError::InvalidOrder(n));
    }
    let nf = n as f64;
    Ok(up(c * (DELTA_XI / 2.0).powi(n as i32) / (nf * nf)))
}

/// `m(n) = 8·δ_ξ^n·n^{−2}·2^{−n}`, an upper bound on `ν_n` for `n ≤ 24`.
pub fn coefficient_envelope(n: usize) -> Result<f64, BoundError> {
    envelope_with_constant(ENVELOPE_CONSTANT, n)
}

/// `x = δ_ξ·h_max·t`.
pub fn scaled_argument(h_max: f64, t: f64) -> Result<f64, BoundError> {
    check_nonneg("h_max", h_max)?;
    check_nonneg("t", t)?;
    Ok(DELTA_XI * h_max * t)
}

fn term_in_x(prefactor: f64, n: usize, x: f64) -> f64 {
    let nf = n as f64;
    prefactor * x.powi(n as i32) / (nf * nf)
}

/// `4(δ_ξ h_max t)^n / n²`.
pub fn magnus_term_bound(n: usize, h_max: f64, t: f64) -> Result<f64, BoundError> {
    magnus_term_bound_with(DEFAULT_PREFACTOR, n, h_max, t)
}

pub fn magnus_term_bound_with(
    prefactor: f64,
    n: usize,
    h_max: f64,
    t: f64,
) -> Result<f64, BoundError> {
    if n == 0 {
        return Err(BoundError::InvalidOrder(n));
    }
    check_nonneg("prefactor", prefactor)?;
    let x = scaled_argument(h_max, t)?;
    Ok(up(term_in_x(prefactor, n, x)))
}

/// A bound that is either a finite number or outside its hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundValue {
    Finite(f64),
    Diverged,
}

impl BoundValue {
    pub fn value(self) -> Option<f64> {
        match self {
            BoundValue::Finite(v) => Some(v),
            BoundValue::Diverged => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, BoundValue::Finite(_))
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Finite(v) => write!(f, "{v:.8e}"),
            BoundValue::Diverged => f.write_str("diverged"),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BoundValue::Finite(v) => s.serialize_f64(*v),
            BoundValue::Diverged => s.serialize_str("diverged"),
        }
    }
}

/// `4/(N+1)² · x^{N+1}/(1 − x)`; diverged unless `x < 1`.
pub fn truncation_bound(order: usize, h_max: f64, t: f64) -> Result<BoundValue, BoundError> {
    truncation_bound_with(DEFAULT_PREFACTOR, order, h_max, t)
}

pub fn truncation_bound_with(
    prefactor: f64,
    order: usize,
    h_max: f64,
    t: f64,
) -> Result<BoundValue, BoundError> {
    if order == 0 {
        return Err(BoundError::InvalidOrder(order));
    }
    let x = scaled_argument(h_max, t)?;
    Ok(simple_in_x(prefactor, order, x))
}

fn simple_in_x(prefactor: f64, order: usize, x: f64) -> BoundValue {
    if x >= 1.0 {
        return BoundValue::Diverged;
    }
    BoundValue::Finite(up(term_in_x(prefactor, order + 1, x) / (1.0 - x)))
}

/// `4 Σ_{m ≥ N+1} x^m / m²`, summed until the geometric bound on the
/// remainder drops below `rel_tol` times the partial sum; diverged for
/// `x > 1`. At `x = 1` the tail of `Σ 1/m²` is taken from `π²/6`.
pub fn truncation_bound_tight(
    order: usize,
    h_max: f64,
    t: f64,
    rel_tol: f64,
) -> Result<BoundValue, BoundError> {
    truncation_bound_tight_with(DEFAULT_PREFACTOR, order, h_max, t, rel_tol)
}

pub fn truncation_bound_tight_with(
    prefactor: f64,
    order: usize,
    h_max: f64,
    t: f64,
    rel_tol: f64,
) -> Result<BoundValue, BoundError> {
    if order == 0 {
        return Err(BoundError::InvalidOrder(order));
    }
    if rel_tol.is_nan() || rel_tol <= 0.0 {
        return Err(BoundError::InvalidTolerance(rel_tol));
    }
    let x = scaled_argument(h_max, t)?;
    Ok(tight_in_x(prefactor, order, x, rel_tol))
}

fn tight_in_x(prefactor: f64, order: usize, x: f64, rel_tol: f64) -> BoundValue {
    if x > 1.0 {
        return BoundValue::Diverged;
    }
    if x == 0.0 {
        return BoundValue::Finite(0.0);
    }
    if x == 1.0 {
        let head: f64 = (1..=order).rev().map(|m| 1.0 / (m as f64 * m as f64)).sum();
        let tail = std::f64::consts::PI.powi(2) / 6.0 - head;
        return BoundValue::Finite(up(prefactor * tail));
    }
    let mut sum = 0.0;
    let mut m = order + 1;
    let mut power = x.powi(m as i32);
    loop {
        let mf = m as f64;
        sum += power / (mf * mf);
        power *= x;
        let next = (m + 1) as f64;
        let remainder = power / (next * next) / (1.0 - x);
        if remainder < rel_tol * sum || power == 0.0 {
            // the remainder is added so the result stays an upper bound
            return BoundValue::Finite(up(prefactor * (sum + remainder)));
        }
        m += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub bound_new: f64,
    pub bound_prior: f64,
    /// `bound_new / bound_prior = 4/(π n²)`, independent of `x`.
    pub ratio: f64,
}

/// Per-term bound `4x^n/n²` beside the earlier `π x^n`, for `n = 1..=order`.
pub fn comparison_table(
    order: usize,
    h_max: f64,
    t: f64,
) -> Result<Vec<ComparisonRow>, BoundError> {
    if order == 0 {
        return Err(BoundError::InvalidOrder(order));
    }
    let x = scaled_argument(h_max, t)?;
    Ok((1..=order)
        .map(|n| {
            let nf = n as f64;
            ComparisonRow {
                n,
                bound_new: up(term_in_x(DEFAULT_PREFACTOR, n, x)),
                bound_prior: up(std::f64::consts::PI * x.powi(n as i32)),
                ratio: DEFAULT_PREFACTOR / (std::f64::consts::PI * nf * nf),
            }
        })
        .collect())
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("n,bound_new,bound_prior,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.8e},{:.8e},{:.8e}\n",
            r.n, r.bound_new, r.bound_prior, r.ratio
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundInput {
    pub h_max: f64,
    pub t: f64,
    pub order: usize,
}

impl BoundInput {
    pub fn new(h_max: f64, t: f64, order: usize) -> Result<Self, BoundError> {
        check_nonneg("h_max", h_max)?;
        check_nonneg("t", t)?;
        if order == 0 {
            return Err(BoundError::InvalidOrder(order));
        }
        Ok(Self { h_max, t, order })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerTerm {
    pub n: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub input: BoundInput,
    pub prefactor: f64,
    pub x: f64,
    pub per_term: Vec<PerTerm>,
    pub truncation_simple: BoundValue,
    /// Absent when the caller drops it with [`BoundReport::without_tight`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_tight: Option<BoundValue>,
    /// `x < 1`, the hypothesis of the simple truncation bound.
    pub converged: bool,
}

pub const DEFAULT_REL_TOL: f64 = 1e-12;

impl BoundReport {
    pub fn evaluate(input: BoundInput) -> Self {
        Self::evaluate_with(input, DEFAULT_PREFACTOR, DEFAULT_REL_TOL)
    }

    pub fn evaluate_with(input: BoundInput, prefactor: f64, rel_tol: f64) -> Self {
        let x = DELTA_XI * input.h_max * input.t;
        let per_term = (1..=input.order)
            .map(|n| PerTerm {
                n,
                bound: up(term_in_x(prefactor, n, x)),
            })
            .collect();
        Self {
            prefactor,
            x,
            per_term,
            truncation_simple: simple_in_x(prefactor, input.order, x),
            truncation_tight: Some(tight_in_x(prefactor, input.order, x, rel_tol)),
            converged: x < 1.0,
            input,
        }
    }

    pub fn without_tight(mut self) -> Self {
        self.truncation_tight = None;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Key/value rows; the per-term bounds follow as `term_n` keys.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        out.push_str(&format!("h_max,{:.8e}\n", self.input.h_max));
        out.push_str(&format!("t,{:.8e}\n", self.input.t));
        out.push_str(&format!("order,{}\n", self.input.order));
        out.push_str(&format!("x,{:.8e}\n", self.x));
        for p in &self.per_term {
            out.push_str(&format!("term_{},{:.8e}\n", p.n, p.bound));
        }
        out.push_str(&format!("truncation_simple,{}\n", self.truncation_simple));
        if let Some(tight) = self.truncation_tight {
            out.push_str(&format!("truncation_tight,{tight}\n"));
        }
        out.push_str(&format!("converged,{}\n", self.converged));
        out
    }
}
