//! Bernoulli numbers in the `B_1 = +1/2` convention.

use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::One;

use super::Rational;

/// Memoized Bernoulli numbers `B_r^+`.
///
/// Values are produced by the defining recurrence
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0` (which yields `B_1 = -1/2`), with the
/// sign of `B_1` flipped on the way out.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    // minus convention internally; the recurrence is stated for it
    minus: Vec<Rational>,
}

impl Default for BernoulliTable {
    fn default() -> Self {
        Self::new()
    }
}

impl BernoulliTable {
    pub fn new() -> Self {
        Self {
            minus: vec![Rational::one()],
        }
    }

    /// Table pre-filled through index `r_max`.
    pub fn with_capacity(r_max: usize) -> Self {
        let mut t = Self::new();
        t.extend_to(r_max);
        t
    }

    /// Largest index currently stored.
    pub fn max_index(&self) -> usize {
        self.minus.len() - 1
    }

    pub fn extend_to(&mut self, r_max: usize) {
        while self.minus.len() <= r_max {
            let m = self.minus.len();
            if m >= 3 && m % 2 == 1 {
                self.minus.push(Rational::zero());
                continue;
            }
            // binomial row C(m+1, j), j = 0..m
            let mut c = BigInt::one();
            let mut acc = Rational::zero();
            for (j, b) in self.minus.iter().enumerate() {
                if !b.is_zero() {
                    acc += Rational::from_integer(c.clone()) * b;
                }
                c = c * (m + 1 - j) / (j + 1);
            }
            let b_m = -(acc / Rational::from_integer(m as i64 + 1));
            self.minus.push(b_m);
        }
    }

    /// `B_r^+`, extending the table as needed.
    pub fn get(&mut self, r: usize) -> Rational {
        self.extend_to(r);
        self.value(r).expect("extended above")
    }

    /// `B_r^+` if already computed.
    pub fn value(&self, r: usize) -> Option<Rational> {
        let b = self.minus.get(r)?;
        Some(if r == 1 { -b } else { b.clone() })
    }
}

static TABLE: LazyLock<RwLock<BernoulliTable>> =
    LazyLock::new(|| RwLock::new(BernoulliTable::with_capacity(64)));

/// `B_r^+` from the shared process-wide table.
pub fn bernoulli(r: usize) -> Rational {
    if let Some(v) = TABLE.read().expect("bernoulli table poisoned").value(r) {
        return v;
    }
    TABLE.write().expect("bernoulli table poisoned").get(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::binomial;

    /// Akiyama–Tanigawa: an independent route that lands on `B_1 = +1/2`.
    fn akiyama_tanigawa(n: usize) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut a: Vec<Rational> = Vec::new();
        for m in 0..=n {
            a.push(Rational::unit_fraction(m as u64 + 1));
            for j in (1..=m).rev() {
                a[j - 1] = Rational::from_integer(j as i64) * (&a[j - 1] - &a[j]);
            }
            out.push(a[0].clone());
        }
        out
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(bernoulli(0), Rational::one());
        assert_eq!(bernoulli(1), q("1/2"));
        assert_eq!(bernoulli(2), q("1/6"));
        assert_eq!(bernoulli(3), Rational::zero());
        assert_eq!(bernoulli(4), q("-1/30"));
        assert_eq!(bernoulli(12), q("-691/2730"));
    }

    #[test]
    fn matches_akiyama_tanigawa() {
        let oracle = akiyama_tanigawa(40);
        for (r, expected) in oracle.iter().enumerate() {
            assert_eq!(&bernoulli(r), expected, "B_{r}");
        }
    }

    #[test]
    fn odd_indices_vanish() {
        for r in (3..=61).step_by(2) {
            assert!(bernoulli(r).is_zero());
        }
    }

    #[test]
    fn defining_recurrence_holds() {
        for m in 1..=40u64 {
            let mut s = Rational::zero();
            for j in 0..=m {
                let mut b = bernoulli(j as usize);
                if j == 1 {
                    b = -b;
                }
                s += Rational::from(binomial(m + 1, j)) * &b;
            }
            assert!(s.is_zero(), "recurrence fails at m={m}");
        }
    }

    #[test]
    fn fresh_table_extends_past_the_shared_one() {
        let mut t = BernoulliTable::new();
        assert_eq!(t.max_index(), 0);
        assert_eq!(t.get(70), bernoulli(70));
        assert_eq!(t.max_index(), 70);
    }
}
