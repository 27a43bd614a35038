//! Specialised symmetric functions: elementary and complete homogeneous
//! values of a probability vector, ribbon shapes of pattern positions, and
//! Jacobi-Trudi skew-Schur determinants with `e_r` replaced by given values.
//!
//! Symmetric functions are never built as polynomials; only their values
//! under a specialisation `e_r -> c_r` are computed.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::rational::Rational;
use crate::exact::RationalMatrix;

/// Weakly decreasing nonnegative parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parameter(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// `mu ⊆ self` as Young diagrams.
    pub fn contains(&self, mu: &Partition) -> bool {
        (0..self.len().max(mu.len())).all(|i| mu.part(i) <= self.part(i))
    }
}

/// Ribbon shape `lambda / mu` of a position set `S = {s_1 < .. < s_k}` on
/// horizon `n`:
/// `lambda_i = n - s_{i-1} - k + i - 1`, `mu_i = n - s_i - k + i - 1`
/// for `i = 1..k+1`, with `s_0 = 0` and `s_{k+1} = n`.
pub fn ribbon_shape(n: usize, set: &[usize]) -> Result<(Partition, Partition)> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&x| x == 0 || x >= n) {
        return Err(Error::Parameter(format!("position {bad} outside 1..{}", n.saturating_sub(1))));
    }
    let k = s.len();
    let mut ext = vec![0];
    ext.extend(&s);
    ext.push(n);
    let n = n as i64;
    let k = k as i64;
    let part = |v: i64| -> Result<usize> {
        usize::try_from(v).map_err(|_| Error::Parameter(format!("negative part {v}")))
    };
    let mut lambda = Vec::new();
    let mut mu = Vec::new();
    for i in 1..=k + 1 {
        lambda.push(part(n - ext[(i - 1) as usize] as i64 - k + i - 1)?);
        mu.push(part(n - ext[i as usize] as i64 - k + i - 1)?);
    }
    Ok((Partition::new(lambda)?, Partition::new(mu)?))
}

/// `det(e_{lambda_i - mu_j - i + j})` with `e_r = evalues[r]`, `e_0 = 1`,
/// `e_r = 0` for `r < 0`.
pub fn skew_schur_specialized(
    lambda: &Partition,
    mu: &Partition,
    evalues: &[Rational],
) -> Result<Rational> {
    if !lambda.contains(mu) {
        return Err(Error::Parameter("mu is not contained in lambda".into()));
    }
    let len = lambda.len().max(mu.len());
    let mut m = RationalMatrix::zeros(len, len);
    for i in 0..len {
        for j in 0..len {
            let r = lambda.part(i) as i64 - mu.part(j) as i64 - i as i64 + j as i64;
            m[(i, j)] = match r {
                r if r < 0 => Rational::zero(),
                0 => Rational::one(),
                r => evalues.get(r as usize).cloned().ok_or_else(|| {
                    Error::Parameter(format!("no specialised value for e_{r}"))
                })?,
            };
        }
    }
    m.det()
}

/// Elementary `e_0..e_max` and complete homogeneous `h_0..h_max` symmetric
/// polynomials evaluated at `p`.
pub fn symmetric_polys(p: &[Rational], max_deg: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut e = vec![Rational::zero(); max_deg + 1];
    let mut h = vec![Rational::zero(); max_deg + 1];
    e[0] = Rational::one();
    h[0] = Rational::one();
    for x in p {
        // adding one variable: e_k += x e_{k-1} (descending), h_k += x h_{k-1} (ascending)
        for k in (1..=max_deg).rev() {
            let t = x * &e[k - 1];
            e[k] += t;
        }
        for k in 1..=max_deg {
            let t = x * &h[k - 1];
            h[k] += t;
        }
    }
    (e, h)
}
