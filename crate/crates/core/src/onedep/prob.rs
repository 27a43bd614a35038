//! Pattern probabilities, correlations and validity checks.

use num_traits::{One, Signed, Zero};

use super::pattern::{blocks, Pattern, Support, Zeros};
use super::spec::{OneDepSpec, SpecKind};
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::RationalMatrix;

/// Toeplitz-minor formula in the run probabilities:
/// `P = det(a_{s_{j+1} - s_i})_{i,j=0..k}` over the zeros `s_1 < .. < s_k`,
/// with `s_0 = 0`, `s_{k+1} = n`, `a_0 = 1` and `a_i = 0` for `i < 0`.
pub fn probability_from_zeros(spec: &OneDepSpec, zeros: &Zeros) -> Result<Rational> {
    check_horizon(spec, zeros.horizon)?;
    let a = spec.a_sequence(spec.horizon() + 1)?;
    let s = with_ends(&zeros.positions, zeros.horizon);
    let k = s.len() - 2;
    let mut m = RationalMatrix::zeros(k + 1, k + 1);
    for i in 0..=k {
        for j in 0..=k {
            m[(i, j)] = a.get(s[j + 1] as i64 - s[i] as i64)?;
        }
    }
    m.det()
}

/// e-form determinant `P_n(S) = h(n) det[e(s_i, s_{j+1})]_{i,j=0..k}` over the
/// occupied sites, with `h(n) = 1 / prod e(i, i+1)`.
pub fn probability_from_support(spec: &OneDepSpec, support: &Support) -> Result<Rational> {
    check_horizon(spec, support.horizon)?;
    let n = spec.horizon();
    let s = with_ends(&support.positions, n);
    let k = s.len() - 2;
    let (e, h): (Box<dyn Fn(usize, usize) -> Result<Rational>>, Rational) = match spec.kind() {
        SpecKind::StationaryE(seq) => {
            let e1 = seq.get(1)?;
            let h = rational::powi(&e1, n as i64).recip();
            (Box::new(move |i, j| seq.get(j as i64 - i as i64)), h)
        }
        SpecKind::StationaryA(_) => {
            let seq = spec.normalized_e_sequence(n + 1)?;
            (
                Box::new(move |i, j| seq.get(j as i64 - i as i64)),
                Rational::one(),
            )
        }
        SpecKind::TableE(t) => {
            let h = (0..n).fold(Rational::one(), |acc, i| acc * t.e(i, i + 1)).recip();
            (Box::new(move |i, j| Ok(t.e(i, j))), h)
        }
        SpecKind::IntervalRho(_) => {
            return Err(Error::Unsupported(
                "interval-correlation specs have no e-form".into(),
            ))
        }
    };
    let mut m = RationalMatrix::zeros(k + 1, k + 1);
    for i in 0..=k {
        for j in 0..=k {
            m[(i, j)] = e(s[i], s[j + 1])?;
        }
    }
    Ok(h * m.det()?)
}

/// `P(X = S) = (-1)^{|W \ S|} det(K - 1_{W \ S})` on the window `W` of sites.
pub fn probability_from_kernel(k: &RationalMatrix, pattern: &Pattern) -> Result<Rational> {
    if k.rows() != pattern.len() {
        return Err(Error::Dimension(format!(
            "kernel has {} sites, pattern has {}",
            k.rows(),
            pattern.len()
        )));
    }
    let mut m = k.clone();
    let mut holes = 0;
    for (i, &b) in pattern.bits().iter().enumerate() {
        if !b {
            m[(i, i)] -= Rational::one();
            holes += 1;
        }
    }
    let d = m.det()?;
    Ok(if holes % 2 == 1 { -d } else { d })
}

/// Exact probability of a pattern.
///
/// Stationary a-form specs use the Toeplitz minor over the zeros; e-form
/// specs use the e-determinant over the occupied sites; interval specs use
/// the kernel. A negative value means the spec does not define a process.
pub fn pattern_probability(spec: &OneDepSpec, pattern: &Pattern) -> Result<Rational> {
    let p = match spec.kind() {
        SpecKind::StationaryA(_) => probability_from_zeros(spec, &pattern.zeros_of())?,
        SpecKind::StationaryE(_) | SpecKind::TableE(_) => {
            probability_from_support(spec, &pattern.support_of())?
        }
        SpecKind::IntervalRho(_) => {
            check_horizon(spec, pattern.horizon())?;
            let k = spec.kernel()?.matrix(spec.sites())?;
            probability_from_kernel(&k, pattern)?
        }
    };
    if p.is_negative() {
        return Err(Error::NegativeProbability {
            pattern: pattern.to_string(),
            value: rational::format(&p),
        });
    }
    Ok(p)
}

/// `rho(A) = P(S contains A)`.
///
/// Stationary and interval specs factor over maximal blocks of consecutive
/// sites; e-table specs use the kernel minor.
pub fn correlation(spec: &OneDepSpec, set: &[usize]) -> Result<Rational> {
    let sites = spec.sites();
    if let Some(&bad) = set.iter().find(|&&s| s == 0 || s > sites) {
        return Err(Error::Dimension(format!("site {bad} outside 1..{sites}")));
    }
    if set.is_empty() {
        return Ok(Rational::one());
    }
    match spec.kind() {
        SpecKind::StationaryA(_) | SpecKind::StationaryE(_) => {
            let a = spec.a_sequence(spec.horizon() + 1)?;
            blocks(set)
                .iter()
                .try_fold(Rational::one(), |acc, b| Ok(acc * a.get(b.len() as i64 + 1)?))
        }
        SpecKind::IntervalRho(t) => blocks(set)
            .iter()
            .try_fold(Rational::one(), |acc, b| Ok(acc * t.get(b[0], b.len())?)),
        SpecKind::TableE(_) => spec.kernel()?.minor(set),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub max_n: usize,
    pub patterns_checked: usize,
    /// Patterns (with their horizon) whose determinant is negative.
    pub negative: Vec<(Pattern, Rational)>,
    /// Horizons whose pattern probabilities fail to sum to one.
    pub bad_sums: Vec<(usize, Rational)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.negative.is_empty() && self.bad_sums.is_empty()
    }
}

/// Evaluates every pattern determinant on every horizon up to `max_n`
/// (only the spec's own horizon for non-stationary specs) and reports any
/// negative value. A clean report certifies a process up to that horizon.
pub fn validate_spec(spec: &OneDepSpec, max_n: usize) -> Result<ValidationReport> {
    let horizons: Vec<usize> = if spec.is_stationary() {
        (1..=max_n).collect()
    } else {
        vec![spec.horizon()]
    };
    let mut report = ValidationReport {
        max_n,
        patterns_checked: 0,
        negative: Vec::new(),
        bad_sums: Vec::new(),
    };
    for n in horizons {
        let s = if spec.is_stationary() {
            spec.with_horizon(n)?
        } else {
            spec.clone()
        };
        let mut total = Rational::zero();
        for p in Pattern::all(n) {
            let v = raw_probability(&s, &p)?;
            report.patterns_checked += 1;
            if v.is_negative() {
                report.negative.push((p, v.clone()));
            }
            total += v;
        }
        if !total.is_one() {
            report.bad_sums.push((n, total));
        }
    }
    Ok(report)
}

fn raw_probability(spec: &OneDepSpec, p: &Pattern) -> Result<Rational> {
    match pattern_probability(spec, p) {
        Err(Error::NegativeProbability { value, .. }) => rational::parse(&value),
        other => other,
    }
}

/// Full exact distribution over all patterns of the spec's horizon.
pub fn distribution(spec: &OneDepSpec) -> Result<Vec<(Pattern, Rational)>> {
    Pattern::all(spec.horizon())
        .map(|p| pattern_probability(spec, &p).map(|v| (p, v)))
        .collect()
}

fn check_horizon(spec: &OneDepSpec, n: usize) -> Result<()> {
    if n != spec.horizon() {
        return Err(Error::Dimension(format!(
            "pattern horizon {n} does not match spec horizon {}",
            spec.horizon()
        )));
    }
    Ok(())
}

fn with_ends(positions: &[usize], n: usize) -> Vec<usize> {
    let mut s = Vec::with_capacity(positions.len() + 2);
    s.push(0);
    let mut p = positions.to_vec();
    p.sort_unstable();
    s.extend(p);
    s.push(n);
    s
}
