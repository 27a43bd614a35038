//! Truncated Laurent series with exact rational coefficients.
//!
//! A `LaurentSeries` stores `sum_{m >= min_degree} c_m z^m + O(z^order)`.
//! Coefficients at degrees `>= order` are unknown; asking for one is an
//! error rather than an implicit zero.

use std::fmt;

use num_traits::{One, Zero};

use super::rational::{self, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    min_degree: i64,
    coeffs: Vec<Rational>,
}

impl LaurentSeries {
    /// Series whose coefficient of `z^(min_degree + i)` is `coeffs[i]`,
    /// known exactly below `min_degree + coeffs.len()`.
    pub fn new(min_degree: i64, coeffs: Vec<Rational>) -> Self {
        Self { min_degree, coeffs }
    }

    /// Power series `sum c_i z^i` known below `coeffs.len()`.
    pub fn power(coeffs: Vec<Rational>) -> Self {
        Self::new(0, coeffs)
    }

    /// A polynomial viewed as a series known exactly below `order`.
    pub fn polynomial(coeffs: &[Rational], order: i64) -> Self {
        let n = order.max(0) as usize;
        let coeffs = (0..n)
            .map(|i| coeffs.get(i).cloned().unwrap_or_else(Rational::zero))
            .collect();
        Self::new(0, coeffs)
    }

    pub fn from_fn(min_degree: i64, order: i64, mut f: impl FnMut(i64) -> Rational) -> Self {
        Self::new(min_degree, (min_degree..order).map(&mut f).collect())
    }

    pub fn one(order: i64) -> Self {
        Self::from_fn(0, order, |m| if m == 0 { Rational::one() } else { Rational::zero() })
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn order(&self) -> i64 {
        self.min_degree + self.coeffs.len() as i64
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `z^degree`. Degrees below `min_degree` are zero.
    pub fn coeff(&self, degree: i64) -> Result<Rational> {
        if degree < self.min_degree {
            return Ok(Rational::zero());
        }
        if degree >= self.order() {
            return Err(Error::Truncated {
                degree,
                order: self.order(),
            });
        }
        Ok(self.coeffs[(degree - self.min_degree) as usize].clone())
    }

    fn coeff_ref(&self, degree: i64) -> Option<&Rational> {
        if degree < self.min_degree || degree >= self.order() {
            None
        } else {
            Some(&self.coeffs[(degree - self.min_degree) as usize])
        }
    }

    /// Lowest degree with a nonzero coefficient inside the known range.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.min_degree + i as i64)
    }

    /// Drops everything at or above `order`. Asking for more than is known
    /// is an error.
    pub fn truncate(&self, order: i64) -> Result<Self> {
        if order > self.order() {
            return Err(Error::Truncated {
                degree: order - 1,
                order: self.order(),
            });
        }
        if order <= self.min_degree {
            return Ok(Self::new(order, Vec::new()));
        }
        Ok(Self::new(
            self.min_degree,
            self.coeffs[..(order - self.min_degree) as usize].to_vec(),
        ))
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.order().min(other.order());
        Self::from_fn(lo, hi.max(lo), |m| {
            let a = self.coeff(m).unwrap_or_else(|_| Rational::zero());
            let b = other.coeff(m).unwrap_or_else(|_| Rational::zero());
            a + b
        })
    }

    pub fn neg(&self) -> Self {
        Self::new(self.min_degree, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.min_degree, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.min_degree + k, self.coeffs.clone())
    }

    /// Cauchy product. The result is known below
    /// `min(a.order + b.min_degree, b.order + a.min_degree)`.
    pub fn multiply(&self, other: &Self) -> Self {
        let lo = self.min_degree + other.min_degree;
        let hi = (self.order() + other.min_degree).min(other.order() + self.min_degree);
        let n = (hi - lo).max(0) as usize;
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::new(lo, out)
    }

    /// `t` with `s * t = 1`, known below `order`.
    ///
    /// If `s` has valuation `d`, `t` starts at degree `-d` and can be known
    /// at most below `s.order() - 2d`; requesting more fails.
    pub fn reciprocal(&self, order: i64) -> Result<Self> {
        let d = self.valuation().ok_or(Error::SingularSeries {
            order: self.order(),
        })?;
        let available = self.order() - 2 * d;
        if order > available {
            return Err(Error::Truncated {
                degree: order - 1,
                order: available,
            });
        }
        let lo = -d;
        let n = (order - lo).max(0) as usize;
        let lead_inv = self.coeff_ref(d).expect("valuation in range").recip();
        let mut u: Vec<Rational> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                u.push(lead_inv.clone());
                continue;
            }
            let mut acc = Rational::zero();
            for j in 1..=k {
                if let Some(c) = self.coeff_ref(d + j as i64) {
                    if !c.is_zero() {
                        acc += c * &u[k - j];
                    }
                }
            }
            u.push(-acc * &lead_inv);
        }
        Ok(Self::new(lo, u))
    }

    /// Substitutes `z -> c z`.
    pub fn rescale_variable(&self, c: &Rational) -> Self {
        Self::new(
            self.min_degree,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, x)| x * rational::powi(c, self.min_degree + i as i64))
                .collect(),
        )
    }

    /// Substitutes `z -> -z`.
    pub fn negate_variable(&self) -> Self {
        self.rescale_variable(&rational::int(-1))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!("({})z^{}", rational::format(c), self.min_degree + i as i64));
            }
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        write!(f, "{} + O(z^{})", terms.join(" + "), self.order())
    }
}

/// `sum_{m<order} z^m / m!`.
pub fn exp_series(order: i64) -> LaurentSeries {
    let mut c = Rational::one();
    LaurentSeries::from_fn(0, order, |m| {
        if m > 0 {
            c = &c / rational::int(m);
        }
        c.clone()
    })
}

/// Taylor series of `sin` and `cos`, known below `order`.
pub fn sin_cos_series(order: i64) -> (LaurentSeries, LaurentSeries) {
    let e = exp_series(order);
    let sin = LaurentSeries::from_fn(0, order, |m| {
        let c = e.coeff(m).unwrap();
        match m % 4 {
            1 => c,
            3 => -c,
            _ => Rational::zero(),
        }
    });
    let cos = LaurentSeries::from_fn(0, order, |m| {
        let c = e.coeff(m).unwrap();
        match m % 4 {
            0 => c,
            2 => -c,
            _ => Rational::zero(),
        }
    });
    (sin, cos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn geometric_reciprocal() {
        let s = LaurentSeries::polynomial(&ints(&[1, -1]), 10);
        let t = s.reciprocal(5).unwrap();
        assert_eq!(t, LaurentSeries::power(ints(&[1, 1, 1, 1, 1])));
    }

    #[test]
    fn reciprocal_of_inverse_square() {
        let s = LaurentSeries::power(ints(&[1, 2, 3, 4]));
        let t = s.reciprocal(4).unwrap();
        assert_eq!(t, LaurentSeries::power(ints(&[1, -2, 1, 0])));
    }

    #[test]
    fn reciprocal_with_pole() {
        // 2z - z^2 known exactly to high order
        let s = LaurentSeries::polynomial(&ints(&[0, 2, -1]), 12);
        let t = s.reciprocal(3).unwrap();
        assert_eq!(t.min_degree(), -1);
        assert_eq!(
            t.coefficients(),
            &[rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 16)]
        );
        let prod = s.multiply(&t);
        assert_eq!(prod.coeff(0).unwrap(), int(1));
        for m in 1..prod.order() {
            assert_eq!(prod.coeff(m).unwrap(), int(0));
        }
    }

    #[test]
    fn reciprocal_errors() {
        let z = LaurentSeries::power(vec![int(0); 5]);
        assert!(matches!(z.reciprocal(2), Err(Error::SingularSeries { .. })));
        let s = LaurentSeries::power(ints(&[0, 1, 1]));
        // valuation 1, order 3: reciprocal known below 1
        assert!(s.reciprocal(1).is_ok());
        assert!(matches!(s.reciprocal(2), Err(Error::Truncated { .. })));
    }

    #[test]
    fn multiply_basic() {
        let a = LaurentSeries::polynomial(&ints(&[1, 1]), 5);
        let b = LaurentSeries::polynomial(&ints(&[1, -1]), 5);
        assert_eq!(
            a.multiply(&b),
            LaurentSeries::power(ints(&[1, 0, -1, 0, 0]))
        );
    }

    #[test]
    fn exponential_identity() {
        let e = exp_series(6);
        let p = e.multiply(&e.negate_variable());
        assert_eq!(p.order(), 6);
        assert_eq!(p, LaurentSeries::one(6));
    }

    #[test]
    fn truncated_coefficients_are_errors() {
        let a = LaurentSeries::power(ints(&[1, 2]));
        assert!(a.coeff(1).is_ok());
        assert!(matches!(a.coeff(2), Err(Error::Truncated { .. })));
        assert_eq!(a.coeff(-3).unwrap(), int(0));
        assert!(a.truncate(3).is_err());
    }

    #[test]
    fn order_propagation() {
        let a = LaurentSeries::power(ints(&[1, 2, 3])); // order 3
        let b = LaurentSeries::new(-1, ints(&[1, 1, 1, 1, 1])); // order 4
        let p = a.multiply(&b);
        assert_eq!(p.min_degree(), -1);
        assert_eq!(p.order(), 2);
        let s = a.add(&b);
        assert_eq!(s.order(), 3);
    }
}
