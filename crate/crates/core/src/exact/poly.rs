//! Dense univariate polynomials over the rationals.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::rational::{self, int, Rational};
use crate::error::{Error, Result};

/// Coefficients lowest degree first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial(Vec<Rational>);

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn zero() -> Self {
        Self(vec![])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        Self::new((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        Self::new((0..len).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.0.iter().map(|v| v * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::Parameter("division by the zero polynomial".into()))?;
        let lead = divisor.0[dd].clone();
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = &rem[rem.len() - 1] / &lead;
            for (i, d) in divisor.0.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(|v| v.is_zero()) {
                rem.pop();
            }
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The polynomial of degree at most `d` taking `values[x]` at `x = 0..=d`.
    pub fn interpolate_naturals(values: &[Rational]) -> Self {
        let d = values.len().saturating_sub(1);
        let mut diffs = values.to_vec();
        // forward differences in place: diffs[j] becomes Δ^j v(0)
        for level in 1..=d {
            for j in (level..=d).rev() {
                let prev = diffs[j - 1].clone();
                diffs[j] -= prev;
            }
        }
        // sum_j Δ^j v(0) x(x-1)..(x-j+1) / j!
        let mut out = Self::zero();
        let mut falling = Self::constant(Rational::one());
        for (j, dj) in diffs.iter().enumerate() {
            let scale = dj / Rational::from(rational::factorial(j as u64));
            out = out.add(&falling.scale(&scale));
            falling = falling.mul(&Self::new(vec![int(-(j as i64)), int(1)]));
        }
        out
    }

    /// Yun's algorithm: monic `a_1, a_2, ..` with `self = c * prod a_i^i`,
    /// each squarefree and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.degree().is_none_or(|d| d == 0) {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).expect("gcd is nonzero").0;
        let c = df.div_rem(&a0).expect("gcd is nonzero").0;
        let mut d = c.sub(&b.derivative());
        while b.degree().is_some_and(|deg| deg > 0) {
            let a = b.gcd(&d);
            b = b.div_rem(&a).expect("gcd is nonzero").0;
            let c = d.div_rem(&a).expect("gcd is nonzero").0;
            d = c.sub(&b.derivative());
            out.push(a);
        }
        out
    }

    /// Number of distinct real roots, by Sturm's theorem.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().is_none_or(|d| d == 0) {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let k = seq.len();
            let (_, r) = seq[k - 2].div_rem(&seq[k - 1]).expect("nonzero");
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&int(-1)));
        }
        let changes = |signs: Vec<i8>| {
            signs
                .iter()
                .filter(|&&s| s != 0)
                .collect::<Vec<_>>()
                .windows(2)
                .filter(|w| w[0] != w[1])
                .count()
        };
        let sign = |r: &Rational| if r.is_positive() { 1 } else { -1 };
        let at_pos: Vec<i8> = seq.iter().map(|p| sign(p.leading().expect("nonzero"))).collect();
        let at_neg: Vec<i8> = seq
            .iter()
            .map(|p| {
                let s = sign(p.leading().expect("nonzero"));
                if p.degree().unwrap_or(0) % 2 == 1 { -s } else { s }
            })
            .collect();
        changes(at_neg) - changes(at_pos)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => rational::format(c),
                1 => format!("{}*x", rational::format(c)),
                _ => format!("{}*x^{i}", rational::format(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
