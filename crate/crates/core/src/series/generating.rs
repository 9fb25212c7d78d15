//! The generating function `f(x) = Σ ν_n x^n` and its ODE
//! `f' = f/2 − (f/2) cot(f/2) + 1`.

use serde::Serialize;

use super::{PowerSeries, SeriesError};
use crate::coefficients::NuTable;
use crate::exact::{bernoulli, factorial, Rational};

/// `(f/2) cot(f/2) = Σ_{k≥0} (−1)^k B_{2k} f^{2k} / (2k)!` through `f^order`.
pub fn cot_half_series(order: usize) -> Result<PowerSeries, SeriesError> {
    if order < 2 {
        return Err(SeriesError::InvalidOrder { min: 2, got: order });
    }
    let coefficients = (0..=order)
        .map(|k| {
            if k % 2 == 1 {
                return Rational::zero();
            }
            let v = bernoulli(k) / Rational::from(factorial(k as u64));
            if (k / 2) % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    Ok(PowerSeries::with_order(coefficients, order))
}

/// Right-hand side of the ODE as a series in `f`:
/// `f/2 − (f/2) cot(f/2) + 1`.
pub fn ode_rhs_series(order: usize) -> Result<PowerSeries, SeriesError> {
    let half_f = PowerSeries::x(order).scale(&Rational::unit_fraction(2));
    Ok(half_f
        .sub(&cot_half_series(order)?)
        .add(&PowerSeries::one(order)))
}

/// `Σ_{r=1}^{order} |B_r| / r! · f^r`, the weight series of the recursion.
pub fn bernoulli_weight_series(order: usize) -> PowerSeries {
    let coefficients = (0..=order)
        .map(|r| {
            if r == 0 {
                Rational::zero()
            } else {
                bernoulli(r).abs() / Rational::from(factorial(r as u64))
            }
        })
        .collect();
    PowerSeries::with_order(coefficients, order)
}

/// Antiderivative `c·log(f) + Σ_{k≥1} s_k f^k`; the logarithm is carried as
/// its coefficient and never expanded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogSeries {
    pub log_coefficient: Rational,
    /// Power-series part, zero constant term.
    pub series: PowerSeries,
}

impl LogSeries {
    /// `(c/f + s'(f)) · g(f)` as a power series.
    pub fn derivative_times(&self, g: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        let log_part = g.shift_down(1)?.scale(&self.log_coefficient);
        let series_part = self.series.differentiate()?.mul(g);
        Ok(log_part.add(&series_part))
    }
}

/// Series expansion of `∫ df / (f/2 − (f/2) cot(f/2) + 1)` around `f = 0`,
/// through `f^order`.
///
/// The order-4 coefficient is `11/12960`.
pub fn lhs_integral_series(order: usize) -> Result<LogSeries, SeriesError> {
    if order < 5 {
        return Err(SeriesError::InvalidOrder { min: 5, got: order });
    }
    // g(f) = f h(f), 1/g = (1/f) Σ q_k f^k
    let g = ode_rhs_series(order + 1)?;
    let h = g.shift_down(1)?;
    let q = h.reciprocal()?;
    let log_coefficient = q.coeff(0)?.clone();
    let mut coefficients = vec![Rational::zero()];
    for k in 1..=order {
        coefficients.push(q.coeff(k)? * &Rational::unit_fraction(k as u64));
    }
    Ok(LogSeries {
        log_coefficient,
        series: PowerSeries::with_order(coefficients, order),
    })
}

/// The order-4 coefficient as printed in the source material (`11/12969`);
/// the exact value is `11/12960`.
pub const PRINTED_ORDER_FOUR: &str = "11/12969";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OdeReport {
    pub n_max: usize,
    /// Lowest power of `x` compared.
    pub checked_from: usize,
    /// Highest power of `x` compared.
    pub checked_through: usize,
    pub passed: bool,
    pub first_failure: Option<usize>,
}

/// Checks coefficient-wise that `d/dx Σ ν_n x^n` equals
/// `f/2 − (f/2)cot(f/2) + 1` composed with `f`, for `x^1` through
/// `x^{n_max − 1}`.
///
/// The right-hand side vanishes at `f = 0`, so the relation cannot hold at
/// `x^0`, where the left side is `ν_1 = 1`. That coefficient is the initial
/// condition and is excluded.
pub fn verify_ode(table: &NuTable) -> Result<OdeReport, SeriesError> {
    let n_max = table.n_max();
    if n_max < 2 {
        return Err(SeriesError::InvalidOrder { min: 2, got: n_max });
    }
    let f = PowerSeries::with_order(
        (0..=n_max)
            .map(|n| table.get(n).expect("in range").clone())
            .collect(),
        n_max,
    );
    let lhs = f.differentiate()?;
    let rhs = ode_rhs_series(n_max.max(2))?.compose(&f)?;
    let checked_through = n_max - 1;
    let first_failure = (1..=checked_through).find(|&k| lhs.coeff(k).ok() != rhs.coeff(k).ok());
    Ok(OdeReport {
        n_max,
        checked_from: 1,
        checked_through,
        passed: first_failure.is_none(),
        first_failure,
    })
}
