//! Correlation kernels of one-dependent processes.
//!
//! Every one-dependent process on a segment of the integers is determinantal
//! with a kernel vanishing below the first subdiagonal. Three constructions
//! live here:
//!
//! * stationary kernels `K(x, y) = k(y - x)` as Laurent coefficients of
//!   `1 / (1 - 1/e(z))` (the canonical form used throughout the crate), or of
//!   `1 / (1 - R(z))` with `R(z) = sum_{i>=0} a_i z^i` (the run form);
//! * the normal form built from interval correlations by an alternating sum
//!   over chains of intervals;
//! * `K = I + (E^{-1})_{x, y+1}` from an upper triangular e-table.
//!
//! The canonical and run forms differ by the diagonal conjugation
//! `k(m) -> c^m k(m)`, which leaves every minor unchanged.

use num_traits::{One, Zero};

use super::spec::{ETable, IntervalTable, OneDepSpec, SpecKind};
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::{LaurentSeries, RationalMatrix};

/// `k(m)` for `m < order`, with `k(m) = 0` for `m <= -2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryKernel {
    series: LaurentSeries,
}

impl StationaryKernel {
    pub fn from_series(series: LaurentSeries) -> Result<Self> {
        if series.min_degree() < -1 {
            for m in series.min_degree()..-1 {
                if !series.coeff(m)?.is_zero() {
                    return Err(Error::InvalidSpec(format!(
                        "stationary kernel has nonzero k({m})"
                    )));
                }
            }
        }
        Ok(Self { series })
    }

    pub fn k(&self, m: i64) -> Result<Rational> {
        if m <= -2 {
            return Ok(Rational::zero());
        }
        self.series.coeff(m)
    }

    /// Largest `m` with known `k(m)`.
    pub fn max_m(&self) -> i64 {
        self.series.order() - 1
    }

    pub fn series(&self) -> &LaurentSeries {
        &self.series
    }

    /// `(k(y - x))_{x, y = 1..size}`.
    pub fn matrix(&self, size: usize) -> Result<RationalMatrix> {
        if size >= 1 && (size as i64 - 1) > self.max_m() {
            return Err(Error::Truncated {
                degree: size as i64 - 1,
                order: self.series.order(),
            });
        }
        let mut m = RationalMatrix::zeros(size, size);
        for x in 0..size {
            for y in 0..size {
                m[(x, y)] = self.k(y as i64 - x as i64)?;
            }
        }
        Ok(m)
    }

    /// `k(m) -> c^m k(m)`: conjugation by `diag(c^x)`, invisible to minors.
    pub fn conjugated(&self, c: &Rational) -> Self {
        Self {
            series: self.series.rescale_variable(c),
        }
    }

    /// Whole-line particle-hole involution `k(m) -> delta_{0,m} - (-1)^m k(m)`.
    pub fn particle_hole(&self) -> Self {
        let flipped = self.series.negate_variable().neg();
        let one = LaurentSeries::one(self.series.order());
        Self {
            series: flipped.add(&one),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    Stationary(StationaryKernel),
    /// Dense kernel; row/column `i` is site `i + 1`.
    Dense(RationalMatrix),
}

impl Kernel {
    /// The kernel restricted to sites `1..=size`.
    pub fn matrix(&self, size: usize) -> Result<RationalMatrix> {
        match self {
            Kernel::Stationary(k) => k.matrix(size),
            Kernel::Dense(m) => {
                if size > m.rows() {
                    return Err(Error::Dimension(format!(
                        "kernel has {} sites, asked for {size}",
                        m.rows()
                    )));
                }
                let idx: Vec<usize> = (0..size).collect();
                Ok(m.principal(&idx))
            }
        }
    }

    /// `K(x, y)` for 1-based sites.
    pub fn entry(&self, x: usize, y: usize) -> Result<Rational> {
        match self {
            Kernel::Stationary(k) => k.k(y as i64 - x as i64),
            Kernel::Dense(m) => {
                if x == 0 || y == 0 || x > m.rows() || y > m.cols() {
                    return Err(Error::Dimension(format!("site ({x},{y}) outside kernel")));
                }
                Ok(m[(x - 1, y - 1)].clone())
            }
        }
    }

    /// `det[K(a_i, a_j)]` over a set of 1-based sites.
    pub fn minor(&self, sites: &[usize]) -> Result<Rational> {
        let n = sites.len();
        let mut m = RationalMatrix::zeros(n, n);
        for (i, &x) in sites.iter().enumerate() {
            for (j, &y) in sites.iter().enumerate() {
                m[(i, j)] = self.entry(x, y)?;
            }
        }
        m.det()
    }
}

fn e_series_for(spec: &OneDepSpec, order: usize) -> Result<LaurentSeries> {
    match spec.kind() {
        SpecKind::StationaryE(e) => e.series(order),
        SpecKind::StationaryA(_) => {
            let e = spec.normalized_e_sequence(order)?;
            e.series(order)
        }
        _ => Err(Error::Unsupported("stationary kernel of a non-stationary spec".into())),
    }
}

/// Canonical stationary kernel `sum k(m) z^m = 1 / (1 - 1/e(z))`, known for
/// `m <= max_m`. A-form specs use the e-series normalised to `e(1) = 1`;
/// e-form specs use their own e-series, so `k(-1) = 1/e(1)`.
pub fn kernel_stationary(spec: &OneDepSpec, max_m: i64) -> Result<StationaryKernel> {
    let order = (max_m + 3).max(2) as usize;
    let e = e_series_for(spec, order)?;
    let inv = e.reciprocal(order as i64)?;
    let denom = LaurentSeries::one(order as i64).sub(&inv);
    let k = denom.reciprocal(max_m + 1)?;
    StationaryKernel::from_series(k)
}

/// Run-form stationary kernel `sum k(m) z^m = 1 / (1 - R(z))` with
/// `R(z) = 1 + z + sum_{k>=1} rho_k z^{k+1} = sum_{i>=0} a_i z^i`.
pub fn kernel_run_form(spec: &OneDepSpec, max_m: i64) -> Result<StationaryKernel> {
    let order = (max_m + 3).max(2) as usize;
    let a = spec.a_sequence(order)?;
    let r = a.series(order)?;
    let denom = LaurentSeries::one(order as i64).sub(&r);
    let k = denom.reciprocal(max_m + 1)?;
    StationaryKernel::from_series(k)
}

/// `K(x, y) = delta_{x,y} + (E^{-1})_{x, y+1}` on sites `1..n-1`, together
/// with the normaliser `h(n) = 1 / det E`.
pub fn kernel_from_e(table: &ETable) -> Result<(RationalMatrix, Rational)> {
    let n = table.horizon();
    // E[i-1][j-1] = e(i-1, j) for j >= i
    let e = RationalMatrix::from_fn(n, n, |r, c| {
        if c >= r {
            table.e(r, c + 1)
        } else {
            Rational::zero()
        }
    });
    let det = (0..n).fold(Rational::one(), |acc, i| acc * table.e(i, i + 1));
    if det.is_zero() {
        return Err(Error::SingularMatrix("zero superdiagonal entry in e-table".into()));
    }
    let inv = e.inverse()?;
    let sites = n - 1;
    let k = RationalMatrix::from_fn(sites, sites, |x, y| {
        // sites x+1, y+1; (E^{-1})_{x+1, y+2} in 1-based indexing
        let d = if x == y { Rational::one() } else { Rational::zero() };
        d + &inv[(x, y + 1)]
    });
    Ok((k, det.recip()))
}

/// One entry of the interval-chain normal form:
/// `0` if `x - y >= 2`, `-1` if `x - y = 1`, and otherwise
/// `sum_r (-1)^{r-1} sum_{x = l_0 < ... < l_r = y+1} prod rho([l_{i-1}, l_i))`.
pub fn kernel_general(rho: &IntervalTable, x: usize, y: usize) -> Result<Rational> {
    if x >= y + 2 {
        return Ok(Rational::zero());
    }
    if x == y + 1 {
        return Ok(-Rational::one());
    }
    // g[l] = sum over chains from x to l of (-1)^r prod rho
    let end = y + 1;
    let mut g = vec![Rational::zero(); end - x + 1];
    g[0] = Rational::one();
    for l in x + 1..=end {
        let mut acc = Rational::zero();
        for m in x..l {
            let gm = &g[m - x];
            if gm.is_zero() {
                continue;
            }
            acc += gm * rho.get(m, l - m)?;
        }
        g[l - x] = -acc;
    }
    Ok(-g[end - x].clone())
}

/// The full normal-form kernel on sites `1..n-1`.
pub fn kernel_general_matrix(rho: &IntervalTable) -> Result<RationalMatrix> {
    let sites = rho.horizon().saturating_sub(1);
    let mut m = RationalMatrix::zeros(sites, sites);
    for x in 1..=sites {
        for y in 1..=sites {
            m[(x - 1, y - 1)] = kernel_general(rho, x, y)?;
        }
    }
    Ok(m)
}

/// Complementation principle on a region of sites (1-based): rows of the
/// region become `[-C, I - D]`, rows outside stay `[A, B]`.
pub fn particle_hole_kernel(k: &RationalMatrix, region: &[usize]) -> Result<RationalMatrix> {
    let n = k.rows();
    let mut inside = vec![false; n];
    for &s in region {
        if s == 0 || s > n {
            return Err(Error::Dimension(format!("site {s} outside 1..{n}")));
        }
        inside[s - 1] = true;
    }
    Ok(RationalMatrix::from_fn(n, n, |x, y| {
        if !inside[x] {
            k[(x, y)].clone()
        } else if inside[y] {
            let d = if x == y { Rational::one() } else { Rational::zero() };
            d - &k[(x, y)]
        } else {
            -k[(x, y)].clone()
        }
    }))
}

pub(crate) fn kernel_for_spec(spec: &OneDepSpec) -> Result<Kernel> {
    match spec.kind() {
        SpecKind::StationaryA(_) | SpecKind::StationaryE(_) => {
            let max_m = spec.sites().saturating_sub(1) as i64;
            Ok(Kernel::Stationary(kernel_stationary(spec, max_m)?))
        }
        SpecKind::TableE(t) => Ok(Kernel::Dense(kernel_from_e(t)?.0)),
        SpecKind::IntervalRho(t) => Ok(Kernel::Dense(kernel_general_matrix(t)?)),
    }
}

/// Kernel dump as CSV: `row,col,value` with 1-based sites.
pub fn kernel_csv(k: &RationalMatrix) -> String {
    let mut out = String::from("row,col,value\n");
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            out.push_str(&format!("{},{},{}\n", i + 1, j + 1, rational::format(&k[(i, j)])));
        }
    }
    out
}
