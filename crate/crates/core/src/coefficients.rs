//! Exact tree coefficients: `α_τ`, the integral coefficient `μ(τ)`, and
//! `ν_n = Σ_{τ ∈ T_n} |α_τ| μ(τ)` by enumeration and by recursion.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{bernoulli, factorial, Rational};
use crate::trees::{self, Tree};

/// Default cap for [`nu_enumeration`]; Catalan growth makes larger `n` slow.
pub const ENUMERATION_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoefficientError {
    #[error("n must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("enumeration is capped at n <= {cap}, requested n = {n}")]
    EnumerationCap { n: usize, cap: usize },
}

/// Ordered `r`-tuples of positive integers summing to `n`, in lexicographic
/// order. Streams one composition at a time.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<usize>>,
    n: usize,
}

/// All `(n, r)`-compositions; empty when `r > n` or `r == 0`.
pub fn compositions(n: usize, r: usize) -> Compositions {
    let current = if r == 0 || r > n {
        None
    } else {
        let mut first = vec![1; r];
        first[r - 1] = n - r + 1;
        Some(first)
    };
    Compositions { current, n }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let r = out.len();
        // successor: bump the rightmost position whose suffix still has slack
        let mut suffix = 0;
        let mut next = None;
        for i in (0..r.saturating_sub(1)).rev() {
            suffix += out[i + 1];
            if suffix > r - 1 - i {
                let mut a = out[..=i].to_vec();
                a[i] += 1;
                let used: usize = a.iter().sum();
                a.extend(std::iter::repeat_n(1, r - 2 - i));
                a.push(self.n - used - (r - 2 - i));
                next = Some(a);
                break;
            }
        }
        self.current = next;
        Some(out)
    }
}

/// `α_Leaf = 1`, `α_(τ_1..τ_r) = B_r^+ / r! · Π α_{τ_i}`.
pub fn alpha(t: &Tree) -> Rational {
    if t.is_leaf() {
        return Rational::one();
    }
    let r = t.arity();
    let head = bernoulli(r) / Rational::from(factorial(r as u64));
    if head.is_zero() {
        return head;
    }
    t.grafts().iter().fold(head, |acc, g| acc * alpha(g))
}

/// `μ(Leaf) = 1`, `μ(τ) = (1/n) Π μ(τ_i)` with `n = leaves(τ)`.
pub fn mu(t: &Tree) -> Rational {
    let n = t.leaves() as u64;
    t.grafts()
        .iter()
        .fold(Rational::unit_fraction(n), |acc, g| acc * mu(g))
}

/// `μ` by literal evaluation of the unfolded nested integral.
///
/// Every leaf of the quasi-binary tree is an integration variable whose upper
/// limit is the variable of the node it is grafted on (the root's limit is
/// `t`). Variables are integrated innermost first: each carries a polynomial
/// in itself, integration maps `κ^j ↦ κ^{j+1}/(j+1)`, and the result is
/// multiplied into the parent's polynomial. The coefficient of `t^n` is `μ`.
pub fn mu_oracle(t: &Tree) -> Rational {
    // (parent index) per variable, in creation (pre-)order
    let mut parents: Vec<Option<usize>> = Vec::new();
    fn unfold(t: &Tree, parent: Option<usize>, parents: &mut Vec<Option<usize>>) {
        let me = parents.len();
        parents.push(parent);
        for g in t.grafts() {
            unfold(g, Some(me), parents);
        }
    }
    unfold(t, None, &mut parents);

    let mut polys: Vec<Vec<Rational>> = vec![vec![Rational::one()]; parents.len()];
    let mut result = Vec::new();
    for v in (0..parents.len()).rev() {
        let integrated = integrate_poly(&polys[v]);
        match parents[v] {
            Some(p) => polys[p] = mul_poly(&polys[p], &integrated),
            None => result = integrated,
        }
    }
    let n = t.leaves();
    for (j, c) in result.iter().enumerate() {
        debug_assert!(j == n || c.is_zero(), "nested integral is a pure monomial");
    }
    result.get(n).cloned().unwrap_or_else(Rational::zero)
}

fn integrate_poly(p: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    for (j, c) in p.iter().enumerate() {
        out.push(c * Rational::unit_fraction(j as u64 + 1));
    }
    out
}

fn mul_poly(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Per-tree coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientRecord {
    pub tree: Tree,
    pub alpha: Rational,
    pub mu: Rational,
    /// `|α| · μ`
    pub product: Rational,
}

impl CoefficientRecord {
    pub fn new(tree: Tree) -> Self {
        let alpha = alpha(&tree);
        let mu = mu(&tree);
        let product = alpha.abs() * &mu;
        Self {
            tree,
            alpha,
            mu,
            product,
        }
    }
}

/// Records for every tree with `n` leaves, in canonical order.
pub fn coefficient_records(n: usize) -> Result<Vec<CoefficientRecord>, CoefficientError> {
    let set = trees::enumerate(n).map_err(|_| CoefficientError::InvalidOrder(n))?;
    Ok(set
        .members
        .into_par_iter()
        .map(CoefficientRecord::new)
        .collect())
}

/// JSON object keyed by serialized tree.
pub fn records_to_json(records: &[CoefficientRecord]) -> String {
    #[derive(Serialize)]
    struct Entry<'a> {
        alpha: &'a Rational,
        mu: &'a Rational,
        product: &'a Rational,
    }
    let map: BTreeMap<String, Entry<'_>> = records
        .iter()
        .map(|r| {
            (
                r.tree.serialize(),
                Entry {
                    alpha: &r.alpha,
                    mu: &r.mu,
                    product: &r.product,
                },
            )
        })
        .collect();
    serde_json::to_string_pretty(&map).expect("records serialize")
}

/// `ν_n` by summing `|α_τ| μ(τ)` over all trees, capped at [`ENUMERATION_CAP`].
pub fn nu_enumeration(n: usize) -> Result<Rational, CoefficientError> {
    nu_enumeration_with_cap(n, ENUMERATION_CAP)
}

pub fn nu_enumeration_with_cap(n: usize, cap: usize) -> Result<Rational, CoefficientError> {
    if n == 0 {
        return Err(CoefficientError::InvalidOrder(0));
    }
    if n > cap {
        return Err(CoefficientError::EnumerationCap { n, cap });
    }
    let set = trees::enumerate(n).expect("n >= 1");
    Ok(set
        .members
        .par_iter()
        .map(|t| alpha(t).abs() * mu(t))
        .reduce(Rational::zero, |a, b| a + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NuMethod {
    Enumeration,
    Recursion,
    Simplified,
}

impl fmt::Display for NuMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NuMethod::Enumeration => "enumeration",
            NuMethod::Recursion => "recursion",
            NuMethod::Simplified => "simplified",
        })
    }
}

/// `ν_1..ν_{n_max}` with the method that produced them. `ν_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuTable {
    values: Vec<Rational>,
    method: NuMethod,
}

impl NuTable {
    /// Builds a table from `ν_1, ν_2, ...`.
    pub fn from_values(values: Vec<Rational>, method: NuMethod) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(Rational::zero());
        v.extend(values);
        Self { values: v, method }
    }

    pub fn method(&self) -> NuMethod {
        self.method
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `ν_n`; `ν_0 = 0`.
    pub fn get(&self, n: usize) -> Option<&Rational> {
        self.values.get(n)
    }

    /// `(n, ν_n)` for `n >= 1`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.values.iter().enumerate().skip(1)
    }

    /// Replaces `ν_n` (fault injection in verification tests).
    pub fn with_value(mut self, n: usize, value: Rational) -> Self {
        self.values[n] = value;
        self
    }

    /// Columns `n,exact,decimal,method`; decimals in Table-1 style.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,exact,decimal,method\n");
        for (n, v) in self.iter() {
            out.push_str(&format!("{n},{v},{},{}\n", v.to_scientific(8), self.method));
        }
        out
    }
}

/// `ν_1..ν_{n_max}` from
/// `(n+1) ν_{n+1} = Σ_r |B_r|/r! Σ_{(n,r)-compositions} Π ν_{j_i}`.
///
/// The inner composition sums are accumulated by first part,
/// `S(k, r) = Σ_j ν_j S(k − j, r − 1)`, which visits every composition
/// implicitly in polynomial time.
pub fn nu_recursive(n_max: usize) -> Result<NuTable, CoefficientError> {
    if n_max == 0 {
        return Err(CoefficientError::InvalidOrder(0));
    }
    let weights = bernoulli_weights(n_max);
    let mut nu = vec![Rational::zero(), Rational::one()];
    for n in 1..n_max {
        // s[r][k]: sum over (k, r)-compositions of Π ν
        let mut prev = vec![Rational::zero(); n + 1];
        prev[0] = Rational::one();
        let mut total = Rational::zero();
        for (r, weight) in weights.iter().enumerate().take(n + 1).skip(1) {
            let mut cur = vec![Rational::zero(); n + 1];
            for k in r..=n {
                let mut acc = Rational::zero();
                for j in 1..=k + 1 - r {
                    if !prev[k - j].is_zero() {
                        acc += &nu[j] * &prev[k - j];
                    }
                }
                cur[k] = acc;
            }
            if !weight.is_zero() {
                total += weight * &cur[n];
            }
            prev = cur;
        }
        nu.push(total * Rational::unit_fraction(n as u64 + 1));
    }
    nu.truncate(n_max + 1);
    nu.remove(0);
    Ok(NuTable::from_values(nu, NuMethod::Recursion))
}

/// Same recursion, iterating the compositions explicitly (streamed,
/// parallel within a level). Exponential in `n`; a cross-check for
/// [`nu_recursive`].
pub fn nu_recursive_streamed(n_max: usize) -> Result<NuTable, CoefficientError> {
    if n_max == 0 {
        return Err(CoefficientError::InvalidOrder(0));
    }
    let weights = bernoulli_weights(n_max);
    let mut nu = vec![Rational::zero(), Rational::one()];
    for n in 1..n_max {
        let total: Rational = (1..=n)
            .into_par_iter()
            .filter(|&r| !weights[r].is_zero())
            .map(|r| {
                let inner: Rational = compositions(n, r)
                    .par_bridge()
                    .map(|c| c.iter().map(|&j| &nu[j]).product::<Rational>())
                    .reduce(Rational::zero, |a, b| a + b);
                &weights[r] * inner
            })
            .reduce(Rational::zero, |a, b| a + b);
        nu.push(total * Rational::unit_fraction(n as u64 + 1));
    }
    nu.truncate(n_max + 1);
    nu.remove(0);
    Ok(NuTable::from_values(nu, NuMethod::Recursion))
}

/// `|B_r| / r!` for `r = 0..=r_max`.
fn bernoulli_weights(r_max: usize) -> Vec<Rational> {
    (0..=r_max)
        .map(|r| bernoulli(r).abs() / Rational::from(factorial(r as u64)))
        .collect()
}

/// Two-term truncation `(n+1) ν_{n+1} = ½ ν_n + (1/12) Σ_{j=1}^{n−1} ν_j ν_{n−j}`.
pub fn nu_simplified(n_max: usize) -> Result<NuTable, CoefficientError> {
    if n_max == 0 {
        return Err(CoefficientError::InvalidOrder(0));
    }
    let half = Rational::unit_fraction(2);
    let twelfth = Rational::unit_fraction(12);
    let mut nu = vec![Rational::zero(), Rational::one()];
    for n in 1..n_max {
        let conv: Rational = (1..n).map(|j| &nu[j] * &nu[n - j]).sum();
        let next = (&half * &nu[n] + &twelfth * conv) * Rational::unit_fraction(n as u64 + 1);
        nu.push(next);
    }
    nu.truncate(n_max + 1);
    nu.remove(0);
    Ok(NuTable::from_values(nu, NuMethod::Simplified))
}

/// Table of `ν_1..ν_{n_max}` by the chosen method.
pub fn nu_table(method: NuMethod, n_max: usize) -> Result<NuTable, CoefficientError> {
    match method {
        NuMethod::Recursion => nu_recursive(n_max),
        NuMethod::Simplified => nu_simplified(n_max),
        NuMethod::Enumeration => {
            if n_max > ENUMERATION_CAP {
                return Err(CoefficientError::EnumerationCap {
                    n: n_max,
                    cap: ENUMERATION_CAP,
                });
            }
            let values = (1..=n_max)
                .map(nu_enumeration)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(NuTable::from_values(values, NuMethod::Enumeration))
        }
    }
}

/// Exact tree coefficients `ν_1..ν_10`.
pub const TABLE_ONE: [&str; 10] = [
    "1",
    "1/4",
    "5/72",
    "11/576",
    "479/86400",
    "1769/1036800",
    "34091/60963840",
    "943633/4877107200",
    "92107357/1316818944000",
    "688988827/26336378880000",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::binomial;
    use num_bigint::BigUint;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    #[test]
    fn compositions_small() {
        assert_eq!(compositions(2, 2).collect::<Vec<_>>(), vec![vec![1, 1]]);
        assert_eq!(
            compositions(3, 2).collect::<Vec<_>>(),
            vec![vec![1, 2], vec![2, 1]]
        );
        assert_eq!(compositions(3, 4).count(), 0);
        assert_eq!(compositions(3, 0).count(), 0);
        assert_eq!(compositions(5, 1).collect::<Vec<_>>(), vec![vec![5]]);
        assert_eq!(
            compositions(4, 4).collect::<Vec<_>>(),
            vec![vec![1, 1, 1, 1]]
        );
    }

    #[test]
    fn compositions_are_lexicographic_and_counted_by_binomials() {
        for n in 1..=12usize {
            for r in 1..=n {
                let all: Vec<Vec<usize>> = compositions(n, r).collect();
                assert_eq!(
                    BigUint::from(all.len()),
                    binomial(n as u64 - 1, r as u64 - 1),
                    "({n},{r})"
                );
                assert!(all.windows(2).all(|w| w[0] < w[1]));
                assert!(all
                    .iter()
                    .all(|c| c.len() == r && c.iter().sum::<usize>() == n));
                assert!(all.iter().all(|c| c.iter().all(|&x| x >= 1)));
            }
        }
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(&Tree::leaf()), Rational::one());
        assert_eq!(alpha(&t("(L)")), q("1/2"));
        assert_eq!(alpha(&t("((L))")), q("1/4"));
        assert_eq!(alpha(&t("(L L)")), q("1/12"));
        assert_eq!(alpha(&t("(L L L)")), Rational::zero());
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&Tree::leaf()), Rational::one());
        assert_eq!(mu(&t("(L)")), q("1/2"));
        assert_eq!(mu(&crate::trees::seven_leaf_example()), q("1/112"));
        assert_eq!(mu_oracle(&t("(L)")), q("1/2"));
        assert_eq!(mu_oracle(&crate::trees::seven_leaf_example()), q("1/112"));
    }

    #[test]
    fn alpha_vanishes_exactly_on_odd_grafts() {
        for n in 1..=8 {
            for tree in crate::trees::enumerate(n).unwrap().iter() {
                let mut has_odd = false;
                tree.for_each_node(&mut |node| {
                    let r = node.arity();
                    if r >= 3 && r % 2 == 1 {
                        has_odd = true;
                    }
                });
                assert_eq!(alpha(tree).is_zero(), has_odd, "{tree}");
            }
        }
    }

    #[test]
    fn record_invariants() {
        for rec in coefficient_records(6).unwrap() {
            assert!(rec.mu.is_positive());
            assert!(!rec.product.is_negative());
            assert_eq!(rec.product.is_zero(), rec.alpha.is_zero());
        }
    }

    #[test]
    fn enumeration_cap() {
        assert_eq!(
            nu_enumeration(13),
            Err(CoefficientError::EnumerationCap { n: 13, cap: 12 })
        );
        assert_eq!(nu_enumeration(0), Err(CoefficientError::InvalidOrder(0)));
        assert!(nu_table(NuMethod::Enumeration, 13).is_err());
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu_enumeration(1).unwrap(), Rational::one());
        assert_eq!(nu_enumeration(3).unwrap(), q("5/72"));
        let table = nu_recursive(10).unwrap();
        assert_eq!(table.get(5).unwrap(), &q("479/86400"));
        assert_eq!(table.get(8).unwrap(), &q("943633/4877107200"));
        assert_eq!(table.get(0).unwrap(), &Rational::zero());
        for (n, expected) in TABLE_ONE.iter().enumerate() {
            assert_eq!(table.get(n + 1).unwrap(), &q(expected));
        }
    }

    #[test]
    fn simplified_recursion() {
        let s = nu_simplified(6).unwrap();
        let full = nu_recursive(6).unwrap();
        assert_eq!(s.get(1).unwrap(), &Rational::one());
        assert_eq!(s.get(4).unwrap(), &q("11/576"));
        assert_eq!(s.get(5).unwrap(), &q("91/17280"));
        for n in 1..=4 {
            assert_eq!(s.get(n), full.get(n));
        }
        assert!(s.get(5).unwrap() < full.get(5).unwrap());
    }

    #[test]
    fn streamed_matches_first_part_accumulation() {
        let a = nu_recursive(14).unwrap();
        let b = nu_recursive_streamed(14).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_rendering() {
        let csv = nu_recursive(3).unwrap().to_csv();
        assert_eq!(
            csv,
            "n,exact,decimal,method\n\
             1,1,1.00000000×10⁰,recursion\n\
             2,1/4,2.50000000×10⁻¹,recursion\n\
             3,5/72,6.94444444×10⁻²,recursion\n"
        );
    }

    #[test]
    fn records_json_is_keyed_by_tree() {
        let json = records_to_json(&coefficient_records(3).unwrap());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["((L))"]["alpha"], "1/4");
        assert_eq!(v["(L L)"]["alpha"], "1/12");
        assert_eq!(v["(L L)"]["mu"], "1/3");
        assert_eq!(v["((L))"]["mu"], "1/6");
    }
}
