//! Statistics of the number of points `N`: its generating polynomial,
//! moments from kernel traces, a normal-approximation check, numeric
//! eigenvalues and seeded Monte Carlo samplers.
//!
//! This is the only module that uses floating point, and only for `Phi`,
//! eigenvalues, z-scores and empirical frequencies.

use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use libm::erfc;

use crate::catalog::{generic_points_h, ProcessName};
use crate::connectivity::uniform_below;
use crate::error::{Error, Result};
use crate::groupcarries::CentralExtensionSetup;
use crate::exact::rational::{self, int, Rational};
use crate::exact::{Polynomial, RationalMatrix};
use crate::onedep::{pattern_probability, OneDepSpec, Pattern};

/// Coefficients of `E(x^N) = det(I + (x-1)K)`; coefficient `j` is `P(N = j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountPolynomial {
    coefficients: Vec<Rational>,
}

impl CountPolynomial {
    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Exact mean and variance of the distribution the coefficients describe.
    pub fn mean_variance(&self) -> (Rational, Rational) {
        let mut m1 = Rational::zero();
        let mut m2 = Rational::zero();
        for (j, c) in self.coefficients.iter().enumerate() {
            let j = int(j as i64);
            m1 += &j * c;
            m2 += &j * &j * c;
        }
        let var = m2 - &m1 * &m1;
        (m1, var)
    }
}

/// The dense kernel on the sites of `spec`.
pub fn site_kernel(spec: &OneDepSpec) -> Result<RationalMatrix> {
    spec.kernel()?.matrix(spec.sites())
}

fn shifted_det(k: &RationalMatrix, t: &Rational) -> Result<Rational> {
    let id = RationalMatrix::identity(k.rows());
    id.add(&k.scale(t))?.det()
}

/// `det(I + (x-1)K)` as a polynomial, by exact evaluation at `x = 0..=d`
/// and interpolation.
pub fn count_polynomial(k: &RationalMatrix) -> Result<CountPolynomial> {
    if k.rows() != k.cols() {
        return Err(Error::Dimension("kernel must be square".into()));
    }
    let values = (0..=k.rows())
        .map(|x| shifted_det(k, &int(x as i64 - 1)))
        .collect::<Result<Vec<_>>>()?;
    let mut coefficients = Polynomial::interpolate_naturals(&values).coefficients().to_vec();
    coefficients.resize(k.rows() + 1, Rational::zero());
    Ok(CountPolynomial { coefficients })
}

/// `det(tI - K)` exactly.
pub fn characteristic_polynomial(k: &RationalMatrix) -> Result<Polynomial> {
    if k.rows() != k.cols() {
        return Err(Error::Dimension("kernel must be square".into()));
    }
    let id = RationalMatrix::identity(k.rows());
    let values = (0..=k.rows())
        .map(|t| id.scale(&int(t as i64)).sub(k)?.det())
        .collect::<Result<Vec<_>>>()?;
    Ok(Polynomial::interpolate_naturals(&values))
}

/// `(tr K, tr(K - K^2))`.
pub fn count_moments(k: &RationalMatrix) -> Result<(Rational, Rational)> {
    if k.rows() != k.cols() {
        return Err(Error::Dimension("kernel must be square".into()));
    }
    let n = k.rows();
    let mean = k.trace();
    let mut tr_sq = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            tr_sq += &k[(i, j)] * &k[(j, i)];
        }
    }
    let var = &mean - tr_sq;
    Ok((mean, var))
}

/// Eulerian numbers `A(n, k)`, `k = 0..n-1`: permutations of `n` with `k`
/// descents.
pub fn eulerian_numbers(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for m in 2..=n {
        let mut next = vec![BigInt::zero(); m];
        for (k, v) in row.iter().enumerate() {
            next[k] += v * BigInt::from(k + 1);
            next[k + 1] += v * BigInt::from(m - k - 1);
        }
        row = next;
    }
    if n == 0 {
        return vec![];
    }
    row
}

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Clone, Debug)]
pub struct NormalReport {
    pub distribution: CountPolynomial,
    pub mean: Rational,
    pub variance: Rational,
    pub approx_sigma: f64,
    /// `sup_x |P((N - mean)/sigma <= x) - Phi(x)|`.
    pub approx_sup_distance: f64,
    /// `0.80 / sigma`.
    pub approx_bound: f64,
    pub within_bound: bool,
    pub mode: usize,
    pub approx_mode_minus_mean: f64,
    pub unimodal: bool,
}

/// Compares the exact law of `N` with the normal law of the same mean and
/// variance.
pub fn normal_approx_check(k: &RationalMatrix) -> Result<NormalReport> {
    let poly = count_polynomial(k)?;
    let (mean, variance) = count_moments(k)?;
    if !variance.is_positive() {
        return Err(Error::Parameter("count has zero variance".into()));
    }
    let mu = rational::to_f64(&mean);
    let sigma = rational::to_f64(&variance).sqrt();
    let mut cdf = Rational::zero();
    let mut sup: f64 = 0.0;
    for (j, p) in poly.coefficients().iter().enumerate() {
        let z = phi((j as f64 - mu) / sigma);
        let below = rational::to_f64(&cdf);
        cdf += p;
        let at = rational::to_f64(&cdf);
        sup = sup.max((below - z).abs()).max((at - z).abs());
    }
    let coeffs = poly.coefficients();
    let mode = (0..coeffs.len())
        .max_by(|&a, &b| coeffs[a].cmp(&coeffs[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    let unimodal = coeffs[..=mode].windows(2).all(|w| w[0] <= w[1])
        && coeffs[mode..].windows(2).all(|w| w[0] >= w[1]);
    let bound = 0.80 / sigma;
    Ok(NormalReport {
        mean,
        variance,
        approx_sigma: sigma,
        approx_sup_distance: sup,
        approx_bound: bound,
        within_bound: sup <= bound,
        mode,
        approx_mode_minus_mean: mode as f64 - mu,
        unimodal,
        distribution: poly,
    })
}

/// Floating-point eigenvalues; exploratory only.
#[derive(Clone, Debug)]
pub struct EigenReport {
    /// `(re, im)` pairs with multiplicity, sorted by real part.
    pub eigenvalues: Vec<(f64, f64)>,
    /// Largest smallest-singular-value of `K - lambda I` over the eigenvalues.
    pub max_residual: f64,
    /// Whether every root of the characteristic polynomial is real, decided
    /// exactly by Sturm sequences.
    pub exactly_real: bool,
}

impl EigenReport {
    pub fn all_real(&self, tol: f64) -> bool {
        self.eigenvalues.iter().all(|&(_, im)| im.abs() <= tol)
    }

    pub fn all_in_unit_interval(&self, tol: f64) -> bool {
        self.all_real(tol)
            && self
                .eigenvalues
                .iter()
                .all(|&(re, _)| re >= -tol && re <= 1.0 + tol)
    }
}

type C64 = Complex<f64>;

fn eval_c(coeffs: &[f64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Roots of a squarefree polynomial from its companion matrix, each
/// polished by a few Newton steps.
fn simple_roots(p: &Polynomial) -> Vec<C64> {
    let p = p.monic();
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return vec![];
    }
    let c: Vec<f64> = p.coefficients().iter().map(rational::to_f64).collect();
    let dc: Vec<f64> = (1..=d).map(|i| c[i] * i as f64).collect();
    let companion = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..4 {
                let step = eval_c(&c, z) / eval_c(&dc, z);
                if !step.re.is_finite() || !step.im.is_finite() {
                    break;
                }
                let next = z - step;
                if eval_c(&c, next).norm() >= eval_c(&c, z).norm() {
                    break;
                }
                z = next;
            }
            z
        })
        .collect()
}

/// Eigenvalues via the squarefree factors of the exact characteristic
/// polynomial, so repeated eigenvalues do not smear numerically.
pub fn numeric_eigenvalues(k: &RationalMatrix) -> Result<EigenReport> {
    let charpoly = characteristic_polynomial(k)?;
    let n = k.rows();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut real_roots = 0;
    let mut distinct = 0;
    for (i, part) in charpoly.squarefree_decomposition().iter().enumerate() {
        distinct += part.degree().unwrap_or(0);
        real_roots += part.count_real_roots();
        for z in simple_roots(part) {
            for _ in 0..=i {
                eigenvalues.push(z);
            }
        }
    }
    let a = DMatrix::from_fn(n, n, |i, j| C64::new(rational::to_f64(&k[(i, j)]), 0.0));
    let mut max_residual: f64 = 0.0;
    for lambda in &eigenvalues {
        let shifted = &a - DMatrix::from_diagonal_element(n, n, *lambda);
        max_residual = max_residual.max(shifted.singular_values().min());
    }
    let mut eigenvalues: Vec<(f64, f64)> = eigenvalues.iter().map(|z| (z.re, z.im)).collect();
    eigenvalues.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    Ok(EigenReport { eigenvalues, max_residual, exactly_real: real_roots == distinct })
}

/// Number of patterns with nonzero probability.
pub fn support_size(spec: &OneDepSpec) -> Result<usize> {
    let mut count = 0;
    for p in Pattern::all(spec.horizon()) {
        if !pattern_probability(spec, &p)?.is_zero() {
            count += 1;
        }
    }
    Ok(count)
}

/// An empirical estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn z(&self, target: f64) -> f64 {
        if self.se == 0.0 {
            if self.value == target { 0.0 } else { f64::INFINITY }
        } else {
            (self.value - target) / self.se
        }
    }

    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z(target).abs() <= k
    }
}

/// One Monte Carlo check against an exact target.
#[derive(Clone, Debug)]
pub struct Gate {
    pub name: String,
    pub approx_estimate: f64,
    pub approx_target: f64,
    pub approx_se: f64,
    pub approx_z: f64,
    pub pass: bool,
}

/// A 4-standard-error gate.
pub fn gate(name: impl Into<String>, est: Estimate, target: f64) -> Gate {
    let z = est.z(target);
    Gate {
        name: name.into(),
        approx_estimate: est.value,
        approx_target: target,
        approx_se: est.se,
        approx_z: z,
        pass: z.abs() <= 4.0,
    }
}

/// A gate on a frequency whose standard error is taken under the target,
/// so that events too rare to be seen still get a finite z-score.
pub fn binomial_gate(name: impl Into<String>, hits: u64, reps: u64, target: f64) -> Gate {
    let value = hits as f64 / reps as f64;
    let se = (target * (1.0 - target) / reps as f64).sqrt();
    gate(name, Estimate { value, se }, target)
}

fn proportion(hits: u64, reps: u64) -> Estimate {
    let p = hits as f64 / reps as f64;
    Estimate { value: p, se: (p * (1.0 - p) / reps as f64).sqrt() }
}

/// Exact sampling from nonnegative rational weights via integer thresholds.
#[derive(Clone, Debug)]
struct IntegerCdf {
    cum: Vec<BigUint>,
    fast: Option<Vec<u64>>,
}

impl IntegerCdf {
    fn new(weights: &[Rational]) -> Result<Self> {
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::Parameter("negative sampling weight".into()));
        }
        let l = rational::lcm_of_denominators(weights);
        let mut acc = BigUint::zero();
        let mut cum = Vec::with_capacity(weights.len());
        for w in weights {
            let scaled = (w * Rational::from(l.clone())).to_integer();
            acc += scaled.to_biguint().expect("nonnegative");
            cum.push(acc.clone());
        }
        if acc.is_zero() {
            return Err(Error::Parameter("all sampling weights are zero".into()));
        }
        let fast = cum.iter().map(|c| c.to_u64()).collect::<Option<Vec<u64>>>();
        Ok(Self { cum, fast })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.fast {
            Some(cum) => {
                let u = rng.random_range(0..*cum.last().expect("nonempty"));
                cum.partition_point(|&c| c <= u)
            }
            None => {
                let u = uniform_below(rng, self.cum.last().expect("nonempty"));
                self.cum.partition_point(|c| *c <= u)
            }
        }
    }
}

/// Sequential-insertion sampler for `P(σ) ∝ q^{inv(σ)}`: value `i` goes
/// in with `k` smaller values after it with probability `∝ q^k`.
#[derive(Clone, Debug)]
pub struct MallowsSampler {
    steps: Vec<IntegerCdf>,
}

impl MallowsSampler {
    pub fn new(q: &Rational, n: usize) -> Result<Self> {
        let steps = (0..n)
            .map(|i| {
                let w: Vec<Rational> = (0..=i).map(|k| rational::pow(q, k as u32)).collect();
                IntegerCdf::new(&w)
            })
            .collect::<Result<_>>()?;
        Ok(Self { steps })
    }

    /// A permutation of `0..n` in one-line notation.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut perm = Vec::with_capacity(self.steps.len());
        for (i, step) in self.steps.iter().enumerate() {
            let k = step.draw(rng);
            perm.insert(perm.len() - k, i);
        }
        perm
    }
}

fn descents(p: &[usize], out: &mut [bool]) {
    for (o, w) in out.iter_mut().zip(p.windows(2)) {
        *o = w[0] > w[1];
    }
}

type PathSampler = Box<dyn FnMut(&mut ChaCha8Rng, &mut [bool])>;

fn sampler(model: &ProcessName, n: usize) -> Result<PathSampler> {
    model.validate()?;
    Ok(match model.clone() {
        ProcessName::CarriesBaseB(b) => Box::new(move |rng, out| {
            let mut rem = rng.random_range(0..b);
            for o in out.iter_mut() {
                let s = rem + rng.random_range(0..b);
                *o = s >= b;
                rem = s % b;
            }
        }),
        ProcessName::UniformDescents => {
            let mut perm: Vec<usize> = (0..n).collect();
            Box::new(move |rng, out| {
                perm.shuffle(rng);
                descents(&perm, out);
            })
        }
        ProcessName::AlternatingDescents => {
            let mut perm: Vec<usize> = (0..n).collect();
            Box::new(move |rng, out| {
                perm.shuffle(rng);
                descents(&perm, out);
                for o in out.iter_mut().skip(1).step_by(2) {
                    *o = !*o;
                }
            })
        }
        ProcessName::MallowsDescents(q) => {
            let s = MallowsSampler::new(&q, n)?;
            Box::new(move |rng, out| descents(&s.sample(rng), out))
        }
        ProcessName::BinomialPosetUnion { q, r } => {
            let s = MallowsSampler::new(&q, n)?;
            let mut one = vec![false; n.saturating_sub(1)];
            Box::new(move |rng, out| {
                out.fill(false);
                for _ in 0..r {
                    descents(&s.sample(rng), &mut one);
                    for (o, d) in out.iter_mut().zip(&one) {
                        *o |= *d;
                    }
                }
            })
        }
        ProcessName::IidTrials(p) => {
            let cdf = IntegerCdf::new(&p)?;
            Box::new(move |rng, out| {
                let mut prev = cdf.draw(rng);
                for o in out.iter_mut() {
                    let next = cdf.draw(rng);
                    *o = prev > next;
                    prev = next;
                }
            })
        }
        ProcessName::BrentiRelation { relation, theta } => {
            let cdf = IntegerCdf::new(&theta)?;
            Box::new(move |rng, out| {
                let mut prev = cdf.draw(rng);
                for o in out.iter_mut() {
                    let next = cdf.draw(rng);
                    *o = !relation[prev][next];
                    prev = next;
                }
            })
        }
        ProcessName::GenericPoints(k) => Box::new(move |rng, out| {
            let mut prev = rng.random_range(0..=k);
            for o in out.iter_mut() {
                let next = rng.random_range(0..=k);
                *o = generic_points_h(k, prev, next);
                prev = next;
            }
        }),
        ProcessName::TypeBDescents(m) => {
            if n != m + 1 {
                return Err(Error::Parameter(format!("B_{m} lives on horizon {}, not {n}", m + 1)));
            }
            let mut perm: Vec<usize> = (1..=m).collect();
            Box::new(move |rng, out| {
                perm.shuffle(rng);
                // order 1 < .. < m < -m < .. < -1
                let ranks: Vec<(usize, bool)> = perm
                    .iter()
                    .map(|&v| {
                        let neg = rng.random_bool(0.5);
                        (if neg { 2 * m + 1 - v } else { v }, neg)
                    })
                    .collect();
                for i in 0..m {
                    out[i] = if i + 1 < m { ranks[i].0 > ranks[i + 1].0 } else { ranks[i].1 };
                }
            })
        }
    })
}

/// Tallies from `reps` independent paths of a catalog model.
#[derive(Clone, Debug)]
pub struct SimulationReport {
    pub model: String,
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    /// `site_ones[i-1]`: paths with a one at site `i`.
    pub site_ones: Vec<u64>,
    /// `adjacent_both[i-1]`: paths with ones at `i` and `i+1`.
    pub adjacent_both: Vec<u64>,
    /// `count_histogram[j]`: paths with exactly `j` ones.
    pub count_histogram: Vec<u64>,
    /// Pattern code to frequency; kept only for horizons up to 21.
    pub pattern_counts: BTreeMap<u64, u64>,
}

impl SimulationReport {
    fn sites(&self) -> usize {
        self.n.saturating_sub(1)
    }

    pub fn site_rate(&self, site: usize) -> Result<Estimate> {
        self.check_site(site)?;
        Ok(proportion(self.site_ones[site - 1], self.reps))
    }

    /// Average of the site rates, with a standard error from the per-path
    /// counts (sites on one path are dependent).
    pub fn pooled_rate(&self) -> Result<Estimate> {
        let s = self.sites();
        if s == 0 || self.reps < 2 {
            return Err(Error::Parameter("need at least one site and two paths".into()));
        }
        let r = self.reps as f64;
        let (mut m1, mut m2) = (0.0, 0.0);
        for (j, &c) in self.count_histogram.iter().enumerate() {
            let x = j as f64 / s as f64;
            m1 += x * c as f64;
            m2 += x * x * c as f64;
        }
        let mean = m1 / r;
        let var = (m2 / r - mean * mean) * r / (r - 1.0);
        Ok(Estimate { value: mean, se: (var.max(0.0) / r).sqrt() })
    }

    /// `Cov(X_i, X_{i+1})` with a delta-method standard error.
    pub fn adjacent_covariance(&self, site: usize) -> Result<Estimate> {
        self.check_site(site)?;
        self.check_site(site + 1)?;
        let r = self.reps as f64;
        let p11 = self.adjacent_both[site - 1] as f64 / r;
        let pa = self.site_ones[site - 1] as f64 / r;
        let pb = self.site_ones[site] as f64 / r;
        let cov = p11 - pa * pb;
        // E[(X - pa)^2 (Y - pb)^2] from the 2x2 table
        let p10 = pa - p11;
        let p01 = pb - p11;
        let p00 = 1.0 - p11 - p10 - p01;
        let sq = |x: f64, y: f64| (x * y) * (x * y);
        let m2 = p11 * sq(1.0 - pa, 1.0 - pb)
            + p10 * sq(1.0 - pa, -pb)
            + p01 * sq(-pa, 1.0 - pb)
            + p00 * sq(-pa, -pb);
        Ok(Estimate { value: cov, se: ((m2 - cov * cov).max(0.0) / r).sqrt() })
    }

    pub fn pattern_frequency(&self, p: &Pattern) -> Result<Estimate> {
        if p.horizon() != self.n {
            return Err(Error::Dimension(format!("pattern horizon {} vs {}", p.horizon(), self.n)));
        }
        if self.n > 21 {
            return Err(Error::Unsupported("pattern tallies are kept only for horizons up to 21".into()));
        }
        let hits = self.pattern_counts.get(&p.code()).copied().unwrap_or(0);
        Ok(proportion(hits, self.reps))
    }

    /// Binomial gate of a pattern frequency against an exact probability.
    pub fn pattern_gate(&self, p: &Pattern, target: f64) -> Result<Gate> {
        self.pattern_frequency(p)?;
        let hits = self.pattern_counts.get(&p.code()).copied().unwrap_or(0);
        Ok(binomial_gate(format!("P({p})"), hits, self.reps, target))
    }

    pub fn count_frequency(&self, j: usize) -> Estimate {
        proportion(self.count_histogram.get(j).copied().unwrap_or(0), self.reps)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.sites() {
            return Err(Error::Dimension(format!("site {site} outside 1..{}", self.sites())));
        }
        Ok(())
    }
}

/// Seeded simulation of `reps` paths on horizon `n`.
pub fn simulate_process(model: &ProcessName, n: usize, reps: u64, seed: u64) -> Result<SimulationReport> {
    if n == 0 || reps == 0 {
        return Err(Error::Parameter("horizon and reps must be positive".into()));
    }
    let draw = sampler(model, n)?;
    Ok(tally(model.to_string(), n, reps, seed, draw))
}

/// Seeded simulation of the carries when multiplying uniform columns of
/// `n` coset representatives.
pub fn simulate_group_carries(
    setup: &CentralExtensionSetup,
    label: &str,
    n: usize,
    reps: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if n == 0 || reps == 0 {
        return Err(Error::Parameter("horizon and reps must be positive".into()));
    }
    let setup = setup.clone();
    let m = setup.cosets();
    let id = setup.group().identity();
    let draw: PathSampler = Box::new(move |rng, out| {
        let mut rem = rng.random_range(0..m);
        for o in out.iter_mut() {
            let t = rng.random_range(0..m);
            *o = setup.f(rem, t) != id;
            rem = setup.coset_product(rem, t);
        }
    });
    Ok(tally(label.to_string(), n, reps, seed, draw))
}

fn tally(model: String, n: usize, reps: u64, seed: u64, mut draw: PathSampler) -> SimulationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = n - 1;
    let mut report = SimulationReport {
        model,
        n,
        reps,
        seed,
        site_ones: vec![0; sites],
        adjacent_both: vec![0; sites.saturating_sub(1)],
        count_histogram: vec![0; n],
        pattern_counts: BTreeMap::new(),
    };
    let mut path = vec![false; sites];
    for _ in 0..reps {
        draw(&mut rng, &mut path);
        let mut ones = 0;
        for (i, &x) in path.iter().enumerate() {
            if x {
                ones += 1;
                report.site_ones[i] += 1;
                if i + 1 < sites && path[i + 1] {
                    report.adjacent_both[i] += 1;
                }
            }
        }
        report.count_histogram[ones] += 1;
        if n <= 21 {
            let code = path.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | u64::from(b) << i);
            *report.pattern_counts.entry(code).or_insert(0) += 1;
        }
    }
    report
}

#[derive(Clone, Debug)]
pub struct UniformSumReport {
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    /// `counts[j]`: samples with `floor(U_1 + .. + U_n) = j`.
    pub counts: Vec<u64>,
    /// `A(n, j) / n!`.
    pub exact: Vec<Rational>,
    /// Paths where the number of dots differed from the integer part.
    pub pathwise_failures: u64,
    pub gates: Vec<Gate>,
}

impl UniformSumReport {
    pub fn pathwise_ok(&self) -> bool {
        self.pathwise_failures == 0
    }

    pub fn passed(&self) -> bool {
        self.pathwise_ok() && self.gates.iter().all(|g| g.pass)
    }
}

const FRAC_BITS: u32 = 53;

/// Samples `floor(U_1 + .. + U_n)` with 53-bit uniforms held as integers,
/// compares against the Eulerian law, and checks on each path that the
/// number of dots (fractional parts `V_{i+1} < V_i`) is the integer part.
pub fn uniform_sum_check(n: usize, reps: u64, seed: u64) -> Result<UniformSumReport> {
    if n == 0 || reps == 0 {
        return Err(Error::Parameter("n and reps must be positive".into()));
    }
    if n > 1 << 20 {
        return Err(Error::Parameter("n too large".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = (1u64 << FRAC_BITS) - 1;
    let mut counts = vec![0u64; n];
    let mut failures = 0;
    for _ in 0..reps {
        let mut sum: u128 = 0;
        let mut prev_frac: Option<u64> = None;
        let mut dots = 0u64;
        for _ in 0..n {
            sum += u128::from(rng.next_u64() & mask);
            let frac = (sum as u64) & mask;
            if let Some(p) = prev_frac {
                if frac < p {
                    dots += 1;
                }
            }
            prev_frac = Some(frac);
        }
        let j = (sum >> FRAC_BITS) as u64;
        if dots != j {
            failures += 1;
        }
        counts[j as usize] += 1;
    }
    let fact = Rational::from(rational::factorial(n as u64));
    let exact: Vec<Rational> = eulerian_numbers(n)
        .into_iter()
        .map(|a| Rational::from(a) / &fact)
        .collect();
    let gates = exact
        .iter()
        .enumerate()
        .map(|(j, p)| gate(format!("P(floor sum = {j})"), proportion(counts[j], reps), rational::to_f64(p)))
        .collect();
    Ok(UniformSumReport { n, reps, seed, counts, exact, pathwise_failures: failures, gates })
}
