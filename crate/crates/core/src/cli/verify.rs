use clap::ValueEnum;
use serde::Serialize;

use crate::bounds::{coefficient_envelope, envelope_with_constant};
use crate::coefficients::{
    nu_enumeration, nu_recursive, nu_recursive_streamed, NuTable, TABLE_ONE,
};
use crate::exact::Rational;
use crate::series::{
    beta_sweep, estimate_beta_for, lhs_integral_series, verify_ode, ScalingReport, DEFAULT_K_CUT,
    PRINTED_ORDER_FOUR,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Coefficients,
    Envelope,
    Ode,
    Beta,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    /// Measured values, or the first counterexample on failure.
    pub detail: String,
}

fn check(suite: &'static str, name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name: name.into(),
        passed,
        detail,
    }
}

pub fn run(suite: Suite) -> Vec<Check> {
    let table = nu_recursive(24).expect("n_max >= 1");
    match suite {
        Suite::Coefficients => coefficients(&table),
        Suite::Envelope => envelope(&table),
        Suite::Ode => ode(&table),
        Suite::Beta => beta(&table),
        Suite::All => [
            coefficients(&table),
            envelope(&table),
            ode(&table),
            beta(&table),
        ]
        .concat(),
    }
}

fn coefficients(table: &NuTable) -> Vec<Check> {
    let mut out = Vec::new();
    let mismatch = (1..=10).find_map(|n| {
        let e = nu_enumeration(n).expect("below cap");
        let r = table.get(n).expect("in table");
        (e != *r).then(|| format!("n={n}: enumeration {e} vs recursion {r}"))
    });
    out.push(check(
        "coefficients",
        "enumeration equals recursion for n <= 10",
        mismatch.is_none(),
        mismatch.unwrap_or_else(|| "10 of 10 equal".into()),
    ));
    let streamed = nu_recursive_streamed(14).expect("n_max >= 1");
    let mismatch = (1..=14).find(|&n| streamed.get(n) != table.get(n));
    out.push(check(
        "coefficients",
        "streamed compositions equal recursion for n <= 14",
        mismatch.is_none(),
        mismatch.map_or_else(
            || "14 of 14 equal".into(),
            |n| format!("first mismatch at n={n}"),
        ),
    ));
    let mismatch = TABLE_ONE.iter().enumerate().find_map(|(i, s)| {
        let got = table.get(i + 1).expect("in table").to_string();
        (got != *s).then(|| format!("n={}: got {got}, expected {s}", i + 1))
    });
    out.push(check(
        "coefficients",
        "table of nu_1..nu_10",
        mismatch.is_none(),
        mismatch.unwrap_or_else(|| "exact string match".into()),
    ));
    out
}

fn envelope(table: &NuTable) -> Vec<Check> {
    let violation = (1..=24).find_map(|n| {
        let nu = table.get(n).expect("in table").to_f64();
        let m = coefficient_envelope(n).expect("n >= 1");
        (nu > m).then(|| format!("n={n}: nu={nu:.8e} > m={m:.8e}"))
    });
    let tightest = (1..=24)
        .map(|n| {
            (
                n,
                table.get(n).expect("in table").to_f64() / coefficient_envelope(n).expect("n >= 1"),
            )
        })
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let six = (1..=24).find(|&n| {
        table.get(n).expect("in table").to_f64() > envelope_with_constant(6.0, n).expect("n >= 1")
    });
    vec![
        check(
            "envelope",
            "nu_n <= 8 delta^n n^-2 2^-n for n <= 24",
            violation.is_none(),
            violation.unwrap_or_else(|| {
                format!("largest ratio nu/m = {:.6} at n={}", tightest.1, tightest.0)
            }),
        ),
        check(
            "envelope",
            "constant 6 fails for some n <= 24",
            six.is_some(),
            six.map_or_else(
                || "6 dominates every nu_n".into(),
                |n| format!("first failure at n={n}"),
            ),
        ),
    ]
}

fn ode(table: &NuTable) -> Vec<Check> {
    let mut out = Vec::new();
    for n_max in [16, 24] {
        let sub = NuTable::from_values(
            (1..=n_max)
                .map(|n| table.get(n).expect("in table").clone())
                .collect(),
            table.method(),
        );
        let r = verify_ode(&sub).expect("n_max >= 2");
        out.push(check(
            "ode",
            format!("generating-function ODE through x^{}", r.checked_through),
            r.passed,
            r.first_failure.map_or_else(
                || format!("orders {}..={} exact", r.checked_from, r.checked_through),
                |k| format!("first failing order {k}"),
            ),
        ));
    }
    let series = lhs_integral_series(5).expect("order >= 5");
    let expected = ["-1/3", "1/36", "-2/405", "11/12960", "-29/170100"];
    let mismatch = expected.iter().enumerate().find_map(|(i, s)| {
        let got = series.series.coeff(i + 1).expect("within order");
        (got.to_string() != *s).then(|| format!("f^{}: got {got}, expected {s}", i + 1))
    });
    let printed: Rational = PRINTED_ORDER_FOUR.parse().expect("valid literal");
    out.push(check(
        "ode",
        "integral series coefficients f^1..f^5",
        mismatch.is_none() && series.log_coefficient == Rational::from(2),
        mismatch.unwrap_or_else(|| {
            format!(
                "f^4 coefficient is 11/12960; printed {} differs by {}",
                PRINTED_ORDER_FOUR,
                series.series.coeff(4).expect("within order") - &printed
            )
        }),
    ));
    out
}

/// Published range of the fitted β over n = 10..24, and the resulting δ.
pub const BETA_RANGE_LOW: f64 = 8.233432;
pub const BETA_RANGE_HIGH: f64 = 8.32685;
pub const DELTA_PUBLISHED: f64 = 0.902362;

fn beta(table: &NuTable) -> Vec<Check> {
    let sweep: Vec<ScalingReport> = match beta_sweep(table, 10..=24, DEFAULT_K_CUT) {
        Ok(s) => s,
        Err(e) => return vec![check("beta", "beta sweep n = 10..24", false, e.to_string())],
    };
    let min = sweep
        .iter()
        .min_by(|a, b| a.beta.total_cmp(&b.beta))
        .expect("non-empty");
    let max = sweep
        .iter()
        .max_by(|a, b| a.beta.total_cmp(&b.beta))
        .expect("non-empty");
    let worst_delta = sweep
        .iter()
        .max_by(|a, b| a.delta.total_cmp(&b.delta))
        .expect("non-empty");
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let b10 = estimate_beta_for(table, 10, DEFAULT_K_CUT).map_or(f64::NAN, |b| b);
    let b24 = estimate_beta_for(table, 24, DEFAULT_K_CUT).map_or(f64::NAN, |b| b);
    vec![
        check(
            "beta",
            "minimum of fitted beta over n = 10..24",
            rel(min.beta, BETA_RANGE_LOW) < 1e-3,
            format!("beta={:.9} at n={} (beta(10)={b10:.9})", min.beta, min.n),
        ),
        check(
            "beta",
            "maximum of fitted beta over n = 10..24",
            rel(max.beta, BETA_RANGE_HIGH) < 1e-3,
            format!("beta={:.9} at n={} (beta(24)={b24:.9})", max.beta, max.n),
        ),
        check(
            "beta",
            "largest delta over the sweep",
            (worst_delta.delta - DELTA_PUBLISHED).abs() < 5e-4 && worst_delta.delta < 1.0,
            format!("delta={:.8} at n={}", worst_delta.delta, worst_delta.n),
        ),
    ]
}
