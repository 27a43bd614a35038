//! The connectivity set of a uniform random permutation.
//!
//! `C(σ)` is the set of `i` with `σ({1..i}) = {1..i}`. Together with the
//! fixed points `0` and `n` it is the trajectory of a Markov chain on
//! `{0..n}`, and a determinantal process that is not one-dependent.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::exact::rational::{self, big, Rational};
use crate::exact::{LaurentSeries, RationalMatrix};

/// Indecomposable permutation counts `f(1..=n)` from
/// `sum f(m) x^m = 1 - 1 / sum m! x^m`.
pub fn indecomposable_counts(n: usize) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let order = n as i64 + 1;
    let fact = LaurentSeries::from_fn(0, order, |m| big(rational::factorial(m as u64)));
    let gf = LaurentSeries::one(order).sub(&fact.reciprocal(order)?);
    (1..=n as i64).map(|m| gf.coeff(m)).collect()
}

fn counts_int(n: usize) -> Result<Vec<BigInt>> {
    let mut out = vec![BigInt::zero()];
    for v in indecomposable_counts(n)? {
        out.push(v.to_integer());
    }
    Ok(out)
}

/// `P(i, j) = (n-j)! f(j-i) / (n-i)!` on `{0..n}` (strictly upper triangular).
pub fn transition_matrix(n: usize) -> Result<RationalMatrix> {
    let f = counts_int(n)?;
    Ok(RationalMatrix::from_fn(n + 1, n + 1, |i, j| {
        if j <= i {
            return Rational::zero();
        }
        let num = rational::factorial((n - j) as u64) * &f[j - i];
        Rational::new(num, rational::factorial((n - i) as u64))
    }))
}

/// `Q = P + P^2 + .. + P^n`, a finite sum since `P` is nilpotent.
pub fn q_from_series(n: usize) -> Result<RationalMatrix> {
    let p = transition_matrix(n)?;
    let mut power = p.clone();
    let mut q = p.clone();
    for _ in 1..n {
        power = power.mul(&p)?;
        q = q.add(&power)?;
    }
    Ok(q)
}

/// `Q(i, j) = 1 / C(n-i, n-j)` for `i < j`, else 0.
pub fn q_closed_form(n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(n + 1, n + 1, |i, j| {
        if i < j {
            big(rational::binomial((n - i) as i64, (n - j) as i64)).recip()
        } else {
            Rational::zero()
        }
    })
}

/// `K(x, y) = delta_{0,x} + Q(0, x) - Q(y, x)` on `{0..n}`; row/column `i`
/// is state `i`.
pub fn kernel_from_q(q: &RationalMatrix) -> RationalMatrix {
    let size = q.rows();
    RationalMatrix::from_fn(size, size, |x, y| {
        let d = if x == 0 { Rational::one() } else { Rational::zero() };
        d + &q[(0, x)] - &q[(y, x)]
    })
}

/// Closed-form kernel on `{0..n}`.
pub fn connectivity_kernel(n: usize) -> Result<RationalMatrix> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let inv_binom = |a: usize, b: usize| big(rational::binomial(a as i64, b as i64)).recip();
    Ok(RationalMatrix::from_fn(n + 1, n + 1, |x, y| {
        if x == 0 {
            Rational::one()
        } else if x == n {
            if y == n {
                Rational::one()
            } else {
                Rational::zero()
            }
        } else if x <= y {
            inv_binom(n, x)
        } else {
            inv_binom(n, x) - inv_binom(n - y, n - x)
        }
    }))
}

/// `#{σ in S_n : S ⊆ C(σ)} = s_1! (s_2-s_1)! .. (n-s_k)!`.
pub fn containing_count(n: usize, set: &[usize]) -> Result<BigInt> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&x| x == 0 || x >= n) {
        return Err(Error::Dimension(format!("{bad} outside 1..{}", n.saturating_sub(1))));
    }
    let mut prev = 0;
    let mut acc = BigInt::one();
    for &x in s.iter().chain(std::iter::once(&n)) {
        acc *= rational::factorial((x - prev) as u64);
        prev = x;
    }
    Ok(acc)
}

/// `P(S ⊆ C(σ))`.
pub fn containing_probability(n: usize, set: &[usize]) -> Result<Rational> {
    Ok(Rational::new(containing_count(n, set)?, rational::factorial(n as u64)))
}

/// `C(σ)` for a permutation of `0..n` in one-line notation.
pub fn connectivity_set(perm: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut max = 0;
    for (i, &v) in perm.iter().enumerate().take(perm.len().saturating_sub(1)) {
        max = max.max(v);
        if max == i {
            out.push(i + 1);
        }
    }
    out
}

/// Uniform integer in `[0, bound)` by rejection on random bits.
pub(crate) fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top = (bits % 32) as u32;
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        if top != 0 {
            if let Some(last) = digits.last_mut() {
                *last &= (1u32 << top) - 1;
            }
        }
        let v = BigUint::new(digits);
        if &v < bound {
            return v;
        }
    }
}

/// One trajectory `0 = l_0 < l_1 < .. = n` of the chain, each step drawn by
/// exact inverse CDF over integer weights `(n-j)! f(j-i)`.
pub fn simulate_connectivity<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<usize>> {
    let f = counts_int(n)?;
    let mut path = vec![0];
    let mut i = 0;
    while i < n {
        let total = rational::factorial((n - i) as u64);
        let total_u = total.to_biguint().expect("factorial is positive");
        let u = BigInt::from(uniform_below(rng, &total_u));
        let mut acc = BigInt::zero();
        let mut next = n;
        for j in i + 1..=n {
            acc += rational::factorial((n - j) as u64) * &f[j - i];
            if u < acc {
                next = j;
                break;
            }
        }
        path.push(next);
        i = next;
    }
    Ok(path)
}
