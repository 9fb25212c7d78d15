//! Lambert-W coefficient formula
//! `ν̂_n(β) = 6/(2^n n!) Σ_{k=1}^{K} k^{k+n−1}/k! · β^{−k}`
//! and the constants derived from a fitted `β`.

use std::f64::consts::{E, PI};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coefficients::NuTable;

pub const DEFAULT_K_CUT: usize = 60;
pub const BETA_BRACKET: (f64, f64) = (E + 0.1, 100.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("beta = {beta} must exceed {bound}")]
    Domain { beta: f64, bound: f64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("nu_hat({n}) overflows f64 (log value {log_value})")]
    Range { n: usize, log_value: f64 },
    #[error("no sign change on [{lo}, {hi}] for n = {n}")]
    Bracket { n: usize, lo: f64, hi: f64 },
    #[error("nu_{n} is not available in the table")]
    MissingCoefficient { n: usize },
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}

/// Natural log of `ν̂_n(β)` with the `k`-sum cut at `k_cut`.
pub fn ln_nu_hat(n: usize, beta: f64, k_cut: usize) -> Result<f64, ScalingError> {
    if n == 0 || k_cut == 0 {
        return Err(ScalingError::Argument(format!("n = {n}, k_cut = {k_cut}")));
    }
    if beta.is_nan() || beta <= 1.0 {
        return Err(ScalingError::Domain { beta, bound: 1.0 });
    }
    let ln_beta = beta.ln();
    let mut ln_kfact = 0.0;
    let terms: Vec<f64> = (1..=k_cut)
        .map(|k| {
            let kf = k as f64;
            ln_kfact += kf.ln();
            (kf + n as f64 - 1.0) * kf.ln() - ln_kfact - kf * ln_beta
        })
        .collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    let prefactor = 6f64.ln() - n as f64 * 2f64.ln() - ln_factorial(n);
    Ok(prefactor + peak + sum.ln())
}

/// `ν̂_n(β)` accumulated in the log domain.
pub fn nu_hat(n: usize, beta: f64, k_cut: usize) -> Result<f64, ScalingError> {
    let log_value = ln_nu_hat(n, beta, k_cut)?;
    let value = log_value.exp();
    if !value.is_finite() {
        return Err(ScalingError::Range { n, log_value });
    }
    Ok(value)
}

/// Solves `ν̂_n(β) = target` for `β` by bisection on [`BETA_BRACKET`],
/// continued until the bracket cannot shrink further in `f64`.
pub fn estimate_beta(n: usize, target: f64, k_cut: usize) -> Result<f64, ScalingError> {
    if target.is_nan() || target <= 0.0 {
        return Err(ScalingError::Argument(format!(
            "target {target} must be positive"
        )));
    }
    let ln_target = target.ln();
    let residual = |beta: f64| ln_nu_hat(n, beta, k_cut).map(|v| v - ln_target);
    let (mut lo, mut hi) = BETA_BRACKET;
    let (r_lo, r_hi) = (residual(lo)?, residual(hi)?);
    if r_lo.signum() == r_hi.signum() {
        return Err(ScalingError::Bracket { n, lo, hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // ν̂ decreases in β
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`estimate_beta`] with the target `ν_n` taken from `table`.
pub fn estimate_beta_for(table: &NuTable, n: usize, k_cut: usize) -> Result<f64, ScalingError> {
    let nu = table.get(n).ok_or(ScalingError::MissingCoefficient { n })?;
    estimate_beta(n, nu.to_f64(), k_cut)
}

/// `ϑ = ln β − 1` and `δ = e^{1+1/ϑ} / (β^{1/ϑ} ϑ)`.
pub fn delta_from_beta(beta: f64) -> Result<(f64, f64), ScalingError> {
    if beta.is_nan() || beta <= E {
        return Err(ScalingError::Domain { beta, bound: E });
    }
    let theta = beta.ln() - 1.0;
    let delta = ((1.0 + 1.0 / theta) - beta.ln() / theta).exp() / theta;
    Ok((theta, delta))
}

fn check_phi_args(n: usize, k: f64, beta: f64) -> Result<(), ScalingError> {
    if n < 2 {
        return Err(ScalingError::Argument(format!(
            "n = {n} must be at least 2"
        )));
    }
    if k.is_nan() || k < 1.0 {
        return Err(ScalingError::Argument(format!(
            "k = {k} must be at least 1"
        )));
    }
    if beta.is_nan() || beta <= E {
        return Err(ScalingError::Domain { beta, bound: E });
    }
    Ok(())
}

/// `φ(n,k) = (6/2π)(e/2)^n n^{−(n+1/2)} k^{n−3/2} (e/β)^k`, an upper bound on
/// the `k`-th term of `ν̂_n`.
pub fn phi(n: usize, k: f64, beta: f64) -> Result<f64, ScalingError> {
    check_phi_args(n, k, beta)?;
    let nf = n as f64;
    let ln = (6.0 / (2.0 * PI)).ln() + nf * (1.0 - 2f64.ln()) - (nf + 0.5) * nf.ln()
        + (nf - 1.5) * k.ln()
        + k * (1.0 - beta.ln());
    Ok(ln.exp())
}

/// `k_max = (n − 3/2)/ϑ`.
pub fn phi_argmax(n: usize, beta: f64) -> Result<f64, ScalingError> {
    check_phi_args(n, 1.0, beta)?;
    let (theta, _) = delta_from_beta(beta)?;
    Ok((n as f64 - 1.5) / theta)
}

/// `(β/e)^{3/(2ϑ)} ϑ^{3/2} δ^n n^{−2} 2^{−n}`, which dominates `φ(n, k_max)`.
pub fn phi_peak_bound(n: usize, beta: f64) -> Result<f64, ScalingError> {
    check_phi_args(n, 1.0, beta)?;
    let (theta, delta) = delta_from_beta(beta)?;
    let nf = n as f64;
    let ln = 1.5 / theta * (beta.ln() - 1.0) + 1.5 * theta.ln() + nf * delta.ln()
        - 2.0 * nf.ln()
        - nf * 2f64.ln();
    Ok(ln.exp())
}

/// `(k, φ(n,k))` for every integer `k` in `k_range`.
pub fn emit_phi_curve(
    n: usize,
    beta: f64,
    k_range: RangeInclusive<usize>,
) -> Result<Vec<(usize, f64)>, ScalingError> {
    if k_range.is_empty() || *k_range.start() == 0 {
        return Err(ScalingError::Argument(format!(
            "k range {}..={} must be non-empty and start at 1 or above",
            k_range.start(),
            k_range.end()
        )));
    }
    k_range.map(|k| Ok((k, phi(n, k as f64, beta)?))).collect()
}

pub fn phi_curve_csv(curve: &[(usize, f64)]) -> String {
    let mut out = String::from("k,phi\n");
    for (k, v) in curve {
        out.push_str(&format!("{k},{v:.8e}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub n: usize,
    pub k_cut: usize,
    pub beta: f64,
    pub theta: f64,
    pub delta: f64,
    pub k_max: f64,
}

impl ScalingReport {
    pub fn from_beta(n: usize, k_cut: usize, beta: f64) -> Result<Self, ScalingError> {
        let (theta, delta) = delta_from_beta(beta)?;
        Ok(Self {
            n,
            k_cut,
            beta,
            theta,
            delta,
            k_max: (n as f64 - 1.5) / theta,
        })
    }
}

/// Fits `β` independently for each `n` in `range`.
pub fn beta_sweep(
    table: &NuTable,
    range: RangeInclusive<usize>,
    k_cut: usize,
) -> Result<Vec<ScalingReport>, ScalingError> {
    let ns: Vec<usize> = range.collect();
    ns.into_par_iter()
        .map(|n| ScalingReport::from_beta(n, k_cut, estimate_beta_for(table, n, k_cut)?))
        .collect()
}

pub fn sweep_csv(reports: &[ScalingReport]) -> String {
    let mut out = String::from("n,beta,theta,delta,k_max\n");
    for r in reports {
        out.push_str(&format!(
            "{},{:.8e},{:.8e},{:.8e},{:.8e}\n",
            r.n, r.beta, r.theta, r.delta, r.k_max
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::nu_recursive;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Direct summation in f64 for small n and k where nothing overflows.
    fn nu_hat_direct(n: usize, beta: f64, k_cut: usize) -> f64 {
        let mut fact_n = 1.0;
        for j in 1..=n {
            fact_n *= j as f64;
        }
        let mut sum = 0.0;
        let mut fact_k = 1.0;
        for k in 1..=k_cut {
            fact_k *= k as f64;
            let kf = k as f64;
            sum += kf.powi((k + n - 1) as i32) / fact_k * beta.powi(-(k as i32));
        }
        6.0 / (2f64.powi(n as i32) * fact_n) * sum
    }

    #[test]
    fn log_domain_matches_direct_sum() {
        for n in 1..=8 {
            for beta in [3.0, 8.0, 20.0] {
                let a = nu_hat(n, beta, 20).unwrap();
                let b = nu_hat_direct(n, beta, 20);
                assert!(rel(a, b) < 1e-12, "n={n} beta={beta}");
            }
        }
    }

    #[test]
    fn nu_hat_vanishes_for_large_beta() {
        assert!(nu_hat(1, 1e300, 60).unwrap() < 1e-290);
    }

    #[test]
    fn nu_hat_decreases_in_beta() {
        for n in [1, 5, 12, 24] {
            let mut prev = f64::INFINITY;
            for i in 0..200 {
                let v = nu_hat(n, 3.0 + 0.25 * i as f64, 60).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn nu_hat_errors() {
        assert!(matches!(
            nu_hat(3, 1.0, 60),
            Err(ScalingError::Domain { .. })
        ));
        assert!(nu_hat(3, 8.0, 0).is_err());
        assert!(matches!(
            nu_hat(400, 1.0001, 2000),
            Err(ScalingError::Range { .. })
        ));
    }

    #[test]
    fn solved_beta_reproduces_nu() {
        let table = nu_recursive(24).unwrap();
        for n in [3, 10, 17, 24] {
            let beta = estimate_beta_for(&table, n, 60).unwrap();
            let target = table.get(n).unwrap().to_f64();
            assert!(rel(nu_hat(n, beta, 60).unwrap(), target) < 1e-12);
        }
    }

    #[test]
    fn bracket_failure() {
        assert!(matches!(
            estimate_beta(10, 1e12, 60),
            Err(ScalingError::Bracket { .. })
        ));
        assert!(matches!(
            estimate_beta(10, 1e-300, 60),
            Err(ScalingError::Bracket { .. })
        ));
    }

    #[test]
    fn delta_simplifies_to_inverse_theta() {
        let (theta, delta) = delta_from_beta(E * E).unwrap();
        assert!((theta - 1.0).abs() < 1e-15);
        assert!((delta - 1.0).abs() < 1e-14);
        for beta in [3.0, 8.2, 8.3, 50.0] {
            let (theta, delta) = delta_from_beta(beta).unwrap();
            assert!(rel(delta, 1.0 / theta) < 1e-13);
        }
        assert!(delta_from_beta(E).is_err());
        assert!(delta_from_beta(2.0).is_err());
    }

    #[test]
    fn terms_below_phi() {
        for n in 2..=24 {
            let beta: f64 = 8.3;
            let mut ln_kfact = 0.0;
            for k in 1..=60usize {
                let kf = k as f64;
                ln_kfact += kf.ln();
                let ln_term = 6f64.ln() - n as f64 * 2f64.ln() - ln_factorial(n)
                    + (kf + n as f64 - 1.0) * kf.ln()
                    - ln_kfact
                    - kf * beta.ln();
                assert!(ln_term.exp() <= phi(n, kf, beta).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn phi_peak_dominated() {
        for n in 2..=24 {
            for beta in [5.0, 8.23, 8.33] {
                let km = phi_argmax(n, beta).unwrap().max(1.0);
                assert!(phi(n, km, beta).unwrap() <= phi_peak_bound(n, beta).unwrap());
            }
        }
    }

    #[test]
    fn phi_curve_has_single_interior_max() {
        let beta = 8.233;
        let curve = emit_phi_curve(24, beta, 1..=200).unwrap();
        let (arg, _) = curve
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(arg > 1 && arg < 200);
        assert!((arg as f64 - phi_argmax(24, beta).unwrap()).abs() <= 1.0);
        let rising = curve.windows(2).take_while(|w| w[1].1 > w[0].1).count();
        let falling = curve[rising..].windows(2).all(|w| w[1].1 < w[0].1);
        assert!(falling);
        assert_eq!(emit_phi_curve(24, beta, 1..=1).unwrap().len(), 1);
        assert!(emit_phi_curve(24, beta, 0..=3).is_err());
        assert!(phi_curve_csv(&curve).starts_with("k,phi\n1,"));
    }

    #[test]
    fn sweep_columns() {
        let table = nu_recursive(12).unwrap();
        let sweep = beta_sweep(&table, 10..=12, 60).unwrap();
        assert_eq!(sweep.len(), 3);
        assert!(sweep
            .iter()
            .all(|r| r.beta > E && r.delta < 1.0 && r.delta > 0.0));
        let csv = sweep_csv(&sweep);
        assert!(csv.starts_with("n,beta,theta,delta,k_max\n10,"));
        assert!(matches!(
            beta_sweep(&table, 12..=13, 60),
            Err(ScalingError::MissingCoefficient { n: 13 })
        ));
    }
}
