//! Truncated formal power series with exact rational coefficients.

use std::fmt;

use serde::Serialize;

use super::SeriesError;
use crate::exact::Rational;

/// `c_0 + c_1 x + ... + c_order x^order + O(x^{order+1})`.
///
/// Coefficients past `order` are unknown, not zero: reading them is an error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerSeries {
    coefficients: Vec<Rational>,
}

impl PowerSeries {
    /// Series known through `x^order`; `coefficients` is zero-padded or truncated.
    pub fn with_order(mut coefficients: Vec<Rational>, order: usize) -> Self {
        coefficients.resize(order + 1, Rational::zero());
        Self { coefficients }
    }

    /// Order is `coefficients.len() - 1`. Panics on an empty vector.
    pub fn from_coefficients(coefficients: Vec<Rational>) -> Self {
        assert!(
            !coefficients.is_empty(),
            "a series needs at least one coefficient"
        );
        Self { coefficients }
    }

    pub fn zero(order: usize) -> Self {
        Self::with_order(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        Self::with_order(vec![c], order)
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        Self::with_order(vec![Rational::zero(), Rational::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Result<&Rational, SeriesError> {
        self.coefficients.get(k).ok_or(SeriesError::BeyondOrder {
            index: k,
            order: self.order(),
        })
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// Index of the first nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<usize> {
        self.coefficients.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise the order of a series");
        Self::with_order(self.coefficients.clone(), order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let c = (0..=order)
            .map(|k| &self.coefficients[k] + &other.coefficients[k])
            .collect();
        Self { coefficients: c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let c = (0..=order)
            .map(|k| &self.coefficients[k] - &other.coefficients[k])
            .collect();
        Self { coefficients: c }
    }

    pub fn neg(&self) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut c = vec![Rational::zero(); order + 1];
        for (i, a) in self.coefficients.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        Self { coefficients: c }
    }

    /// `1 / self`; needs a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coefficients[0];
        if c0.is_zero() {
            return Err(SeriesError::ZeroDivision);
        }
        let inv0 = c0.recip().expect("nonzero");
        let mut out: Vec<Rational> = vec![inv0.clone()];
        for k in 1..=self.order() {
            let mut acc = Rational::zero();
            for j in 1..=k {
                let a = &self.coefficients[j];
                if !a.is_zero() {
                    acc += a * &out[k - j];
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(Self { coefficients: out })
    }

    /// `self / divisor`. A divisor with valuation `v > 0` is accepted when
    /// the numerator also vanishes through `x^{v-1}`; the common `x^v` is
    /// cancelled and the result loses `v` orders.
    pub fn divide(&self, divisor: &Self) -> Result<Self, SeriesError> {
        let v = divisor.valuation().ok_or(SeriesError::ZeroDivision)?;
        if v == 0 {
            return Ok(self.mul(&divisor.reciprocal()?));
        }
        let num = self.shift_down(v).map_err(|_| SeriesError::ZeroDivision)?;
        let den = divisor.shift_down(v)?;
        Ok(num.mul(&den.reciprocal()?))
    }

    /// Divides by `x^k`; the first `k` coefficients must be zero.
    pub fn shift_down(&self, k: usize) -> Result<Self, SeriesError> {
        if k > self.order() {
            return Err(SeriesError::BeyondOrder {
                index: k,
                order: self.order(),
            });
        }
        if let Some(i) = self.coefficients[..k].iter().position(|c| !c.is_zero()) {
            return Err(SeriesError::NonzeroLowOrder { index: i });
        }
        Ok(Self {
            coefficients: self.coefficients[k..].to_vec(),
        })
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut c = vec![Rational::zero(); k];
        c.extend(self.coefficients.iter().cloned());
        Self { coefficients: c }
    }

    /// `self(inner(x))`; `inner` must have a zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coefficients[0].is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let val = inner.valuation().unwrap_or(inner.order() + 1).max(1);
        let order = inner.order().min((self.order() + 1) * val - 1);
        let inner = inner.truncate(order);
        // Horner: (((c_n) g + c_{n-1}) g + ...) g + c_0
        let mut acc = Self::zero(order);
        for c in self.coefficients.iter().rev() {
            acc = acc.mul(&inner);
            acc.coefficients[0] += c;
        }
        Ok(acc)
    }

    /// Antiderivative with zero constant term; gains one order.
    pub fn integrate(&self) -> Self {
        let mut c = vec![Rational::zero()];
        for (k, a) in self.coefficients.iter().enumerate() {
            c.push(a * Rational::unit_fraction(k as u64 + 1));
        }
        Self { coefficients: c }
    }

    /// Loses one order; an order-0 series has no known derivative.
    pub fn differentiate(&self) -> Result<Self, SeriesError> {
        if self.order() == 0 {
            return Err(SeriesError::OrderMismatch {
                required: 1,
                available: 0,
            });
        }
        let c = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a * Rational::from(k as i64))
            .collect();
        Ok(Self { coefficients: c })
    }

    /// Coefficient-wise equality through `x^order`.
    pub fn agrees_through(&self, other: &Self, order: usize) -> Result<bool, SeriesError> {
        let available = self.order().min(other.order());
        if order > available {
            return Err(SeriesError::OrderMismatch {
                required: order,
                available,
            });
        }
        Ok(self.coefficients[..=order] == other.coefficients[..=order])
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", c.abs())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        f.write_str("x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn series(cs: &[&str]) -> PowerSeries {
        PowerSeries::from_coefficients(cs.iter().map(|s| q(s)).collect())
    }

    #[test]
    fn product_of_conjugates() {
        let a = series(&["1", "1", "0", "0"]);
        let b = series(&["1", "-1", "0", "0"]);
        assert_eq!(a.mul(&b), series(&["1", "0", "-1", "0"]));
    }

    #[test]
    fn integrate_and_differentiate() {
        let p = series(&["1", "1"]);
        assert_eq!(p.integrate(), series(&["0", "1", "1/2"]));
        assert_eq!(p.integrate().differentiate().unwrap(), p);
        assert!(PowerSeries::one(0).differentiate().is_err());
    }

    #[test]
    fn compose_geometric_with_square() {
        // x/(1-x) = x + x^2 + ..., composed with x^2
        let order = 10;
        let geo = PowerSeries::with_order(
            (0..=order)
                .map(|k| {
                    if k == 0 {
                        Rational::zero()
                    } else {
                        Rational::one()
                    }
                })
                .collect(),
            order,
        );
        let sq = PowerSeries::with_order(
            vec![Rational::zero(), Rational::zero(), Rational::one()],
            order,
        );
        let c = geo.compose(&sq).unwrap();
        for k in 0..=order {
            let expected = if k >= 2 && k % 2 == 0 {
                Rational::one()
            } else {
                Rational::zero()
            };
            assert_eq!(c.coeff(k).unwrap(), &expected, "x^{k}");
        }
    }

    #[test]
    fn errors_are_distinct() {
        let p = series(&["1", "2"]);
        assert_eq!(
            p.coeff(2),
            Err(SeriesError::BeyondOrder { index: 2, order: 1 })
        );
        assert_eq!(
            series(&["0", "1"]).reciprocal(),
            Err(SeriesError::ZeroDivision)
        );
        assert_eq!(
            p.compose(&series(&["1", "1"])),
            Err(SeriesError::NonzeroConstant)
        );
        assert_eq!(
            p.divide(&PowerSeries::zero(1)),
            Err(SeriesError::ZeroDivision)
        );
        assert_eq!(
            series(&["1", "1", "0"]).divide(&series(&["0", "1", "0"])),
            Err(SeriesError::ZeroDivision)
        );
        assert!(matches!(
            p.agrees_through(&p, 5),
            Err(SeriesError::OrderMismatch { .. })
        ));
    }

    #[test]
    fn division_cancels_common_powers() {
        // (x + x^2) / x = 1 + x
        let num = series(&["0", "1", "1", "0"]);
        let den = series(&["0", "1", "0", "0"]);
        assert_eq!(num.divide(&den).unwrap(), series(&["1", "1", "0"]));
        // 1 / (1 - x) = 1 + x + x^2
        let geo = series(&["1", "1", "1"]);
        assert_eq!(
            PowerSeries::one(2)
                .divide(&series(&["1", "-1", "0"]))
                .unwrap(),
            geo
        );
    }

    #[test]
    fn mixed_orders_truncate_to_the_smaller() {
        let a = series(&["1", "1", "1"]);
        let b = series(&["1", "1"]);
        assert_eq!(a.add(&b).order(), 1);
        assert_eq!(a.mul(&b).order(), 1);
    }

    #[test]
    fn display() {
        assert_eq!(series(&["1", "0", "-1"]).to_string(), "1 - x^2 + O(x^3)");
        assert_eq!(
            series(&["0", "-1/3", "1/36"]).to_string(),
            "-1/3*x + 1/36*x^2 + O(x^3)"
        );
        assert_eq!(PowerSeries::zero(1).to_string(), "0 + O(x^2)");
    }
}
