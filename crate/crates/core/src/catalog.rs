//! Named constructors for the concrete processes: carries, descents of
//! uniform, Mallows, i.i.d. and alternating models, signed permutations,
//! unions of Mallows descent sets, Brenti's relation processes and the
//! generic-points process.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::rational::{self, big, int, Rational};
use crate::exact::series::{exp_series, sin_cos_series};
use crate::exact::RationalMatrix;
use crate::onedep::{ETable, OneDepSpec};
use crate::symfunc::symmetric_polys;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProcessName {
    CarriesBaseB(u32),
    UniformDescents,
    MallowsDescents(Rational),
    IidTrials(Vec<Rational>),
    AlternatingDescents,
    /// Signed permutations of `1..=n`; sites `1..=n`, horizon `n + 1`.
    TypeBDescents(usize),
    BinomialPosetUnion { q: Rational, r: u32 },
    /// `relation[i][j]` is true when `(i+1, j+1)` lies in `R`; a one is
    /// recorded where consecutive letters fall outside `R`.
    BrentiRelation { relation: Vec<Vec<bool>>, theta: Vec<Rational> },
    GenericPoints(usize),
}

impl ProcessName {
    pub fn validate(&self) -> Result<()> {
        let param = |m: String| Err(Error::Parameter(m));
        let check_q = |q: &Rational| -> Result<()> {
            if !q.is_positive() || *q > Rational::one() {
                return Err(Error::Parameter(format!(
                    "q = {} must lie in (0, 1]",
                    rational::format(q)
                )));
            }
            Ok(())
        };
        let check_prob = |p: &[Rational]| -> Result<()> {
            if p.is_empty() || p.iter().any(Signed::is_negative) {
                return Err(Error::Parameter("probabilities must be nonnegative".into()));
            }
            let total: Rational = p.iter().sum();
            if !total.is_one() {
                return Err(Error::Parameter(format!(
                    "probabilities sum to {}, not 1",
                    rational::format(&total)
                )));
            }
            Ok(())
        };
        match self {
            ProcessName::CarriesBaseB(b) if *b < 2 => param(format!("base {b} < 2")),
            ProcessName::MallowsDescents(q) => check_q(q),
            ProcessName::BinomialPosetUnion { q, r } => {
                check_q(q)?;
                if *r == 0 {
                    return param("r must be at least 1".into());
                }
                Ok(())
            }
            ProcessName::IidTrials(p) => check_prob(p),
            ProcessName::TypeBDescents(0) => param("type B needs n >= 1".into()),
            ProcessName::GenericPoints(0) => param("generic points need n >= 1".into()),
            ProcessName::BrentiRelation { relation, theta } => {
                check_prob(theta)?;
                if relation.len() != theta.len() || relation.iter().any(|r| r.len() != theta.len()) {
                    return param("relation must be N x N with N = len(theta)".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The horizon a process needs when it has one of its own.
    pub fn natural_horizon(&self) -> Option<usize> {
        match self {
            ProcessName::TypeBDescents(n) => Some(n + 1),
            _ => None,
        }
    }
}

fn e_terms(len: usize, f: impl Fn(usize) -> Rational) -> Vec<Rational> {
    (0..len).map(f).collect()
}

/// The process on horizon `n` (sites `1..n-1`).
///
/// Stationary models are returned in e-form with their natural
/// e-sequence (carries keep the integer sequence `C(j+b-1, b-1)`), the
/// generic-points process in a-form, and signed permutations as an e-table
/// whose horizon must equal `n + 1` for `B_n`.
pub fn build(name: &ProcessName, horizon: usize) -> Result<OneDepSpec> {
    name.validate()?;
    let len = horizon + 2;
    match name {
        ProcessName::CarriesBaseB(b) => {
            let b = *b as i64;
            let e = e_terms(len, |j| big(rational::binomial(j as i64 + b - 1, b - 1)));
            OneDepSpec::stationary_e(e, horizon)
        }
        ProcessName::UniformDescents => {
            OneDepSpec::stationary_e(e_terms(len, |j| big(rational::factorial(j as u64)).recip()), horizon)
        }
        ProcessName::MallowsDescents(q) => {
            OneDepSpec::stationary_e(e_terms(len, |j| rational::q_factorial(j as u64, q).recip()), horizon)
        }
        ProcessName::BinomialPosetUnion { q, r } => OneDepSpec::stationary_e(
            e_terms(len, |j| rational::pow(&rational::q_factorial(j as u64, q), *r).recip()),
            horizon,
        ),
        ProcessName::IidTrials(p) => {
            let (_, h) = symmetric_polys(p, len - 1);
            OneDepSpec::stationary_e(h, horizon)
        }
        ProcessName::AlternatingDescents => {
            let euler = euler_numbers(len)?;
            let e = euler
                .into_iter()
                .enumerate()
                .map(|(j, v)| v / big(rational::factorial(j as u64)))
                .collect();
            OneDepSpec::stationary_e(e, horizon)
        }
        ProcessName::TypeBDescents(n) => {
            if horizon != n + 1 {
                return Err(Error::Parameter(format!(
                    "B_{n} lives on horizon {}, not {horizon}",
                    n + 1
                )));
            }
            Ok(OneDepSpec::table_e(type_b_table(*n)?))
        }
        ProcessName::BrentiRelation { relation, theta } => {
            OneDepSpec::stationary_e(brenti_h(relation, theta, len), horizon)
        }
        ProcessName::GenericPoints(n) => {
            let n = *n as i64;
            let base = int(n + 1);
            let a = (1..len as i64)
                .map(|i| {
                    if i == 1 {
                        int(1)
                    } else {
                        int(2 * n) / rational::powi(&base, i)
                    }
                })
                .collect();
            OneDepSpec::stationary_a(a, false, horizon)
        }
    }
}

/// `e(i, j) = 1/(j-i)!` for `j <= n` and `e(i, n+1) = 1/(2^{n-i} (n-i)!)`.
pub fn type_b_table(n: usize) -> Result<ETable> {
    let size = n + 2;
    let m = RationalMatrix::from_fn(size, size, |i, j| {
        if j < i {
            Rational::zero()
        } else if j <= n {
            big(rational::factorial((j - i) as u64)).recip()
        } else if i == n + 1 {
            Rational::one()
        } else {
            let k = (n - i) as u32;
            (rational::pow(&int(2), k) * big(rational::factorial(k as u64))).recip()
        }
    });
    ETable::new(m)
}

/// `h_j^R = P(all j-1 consecutive pairs of j letters lie in R)`, `j < len`.
pub fn brenti_h(relation: &[Vec<bool>], theta: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    if len <= 1 {
        return out;
    }
    // w[a] = P(chain of j letters in R ending at a)
    let mut w: Vec<Rational> = theta.to_vec();
    out.push(w.iter().sum());
    for _ in 2..len {
        w = (0..theta.len())
            .map(|b| {
                (0..theta.len())
                    .filter(|&a| relation[a][b])
                    .map(|a| &w[a] * &theta[b])
                    .sum()
            })
            .collect();
        out.push(w.iter().sum());
    }
    out
}

/// Two-block factor of the generic-points process on symbols `0 = *` and
/// `1..=n` (cyclically ordered).
pub fn generic_points_h(n: usize, u: usize, v: usize) -> bool {
    if u == 0 {
        return false;
    }
    v == 0 || v == u % n + 1
}

/// `E_0 .. E_{count-1}` from `tan z + sec z = (1 + sin z) / cos z`.
pub fn euler_numbers(count: usize) -> Result<Vec<Rational>> {
    if count == 0 {
        return Err(Error::Parameter("count must be at least 1".into()));
    }
    let order = count as i64;
    let (sin, cos) = sin_cos_series(order);
    let gf = sin.add(&crate::exact::LaurentSeries::one(order)).multiply(&cos.reciprocal(order)?);
    (0..count)
        .map(|j| Ok(gf.coeff(j as i64)? * big(rational::factorial(j as u64))))
        .collect()
}

/// `k(-1), k(0), .., k(count-2)` with `sum k(m) z^m = 1 / (1 - e^z)`, that
/// is `k(m) = -B_{m+1} / (m+1)!`.
pub fn bernoulli_kernel(count: usize) -> Result<Vec<Rational>> {
    if count == 0 {
        return Err(Error::Parameter("count must be at least 1".into()));
    }
    let order = count as i64 - 1;
    let denom = crate::exact::LaurentSeries::one(order + 2).sub(&exp_series(order + 2));
    let k = denom.reciprocal(order)?;
    (-1..order).map(|m| k.coeff(m)).collect()
}

/// `B_0 .. B_{count-1}` from `sum_{k<=n} C(n+1, k) B_k = 0`.
pub fn bernoulli_numbers(count: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(count);
    for n in 0..count {
        if n == 0 {
            b.push(Rational::one());
            continue;
        }
        let s: Rational = (0..n)
            .map(|k| big(rational::binomial(n as i64 + 1, k as i64)) * &b[k])
            .sum();
        b.push(-s / int(n as i64 + 1));
    }
    b
}

impl fmt::Display for ProcessName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| v.iter().map(rational::format).collect::<Vec<_>>().join(",");
        match self {
            ProcessName::CarriesBaseB(b) => write!(f, "carries:b={b}"),
            ProcessName::UniformDescents => write!(f, "descents:uniform"),
            ProcessName::MallowsDescents(q) => write!(f, "descents:mallows:q={}", rational::format(q)),
            ProcessName::IidTrials(p) => write!(f, "descents:iid:p={}", join(p)),
            ProcessName::AlternatingDescents => write!(f, "descents:alternating"),
            ProcessName::TypeBDescents(n) => write!(f, "descents:typeB:n={n}"),
            ProcessName::BinomialPosetUnion { q, r } => {
                write!(f, "poset:q={}:r={r}", rational::format(q))
            }
            ProcessName::BrentiRelation { relation, theta } => {
                let pairs: Vec<String> = relation
                    .iter()
                    .enumerate()
                    .flat_map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, &x)| x)
                            .map(move |(j, _)| format!("{}-{}", i + 1, j + 1))
                    })
                    .collect();
                write!(f, "brenti:theta={}:R={}", join(theta), pairs.join(","))
            }
            ProcessName::GenericPoints(n) => write!(f, "genericpoints:n={n}"),
        }
    }
}

impl FromStr for ProcessName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Parse(format!("unknown model '{s}'"));
        let field = |part: &str, key: &str| -> Result<String> {
            part.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("expected '{key}=...' in '{s}'")))
        };
        let number = |v: String| -> Result<usize> {
            v.parse().map_err(|_| Error::Parse(format!("bad integer '{v}' in '{s}'")))
        };
        let list = |v: String| -> Result<Vec<Rational>> { v.split(',').map(rational::parse).collect() };
        let name = match parts.as_slice() {
            ["carries", b] => ProcessName::CarriesBaseB(number(field(b, "b")?)? as u32),
            ["descents", "uniform"] => ProcessName::UniformDescents,
            ["descents", "alternating"] => ProcessName::AlternatingDescents,
            ["descents", "mallows", q] => ProcessName::MallowsDescents(rational::parse(&field(q, "q")?)?),
            ["descents", "iid", p] => ProcessName::IidTrials(list(field(p, "p")?)?),
            ["descents", "typeB", n] => ProcessName::TypeBDescents(number(field(n, "n")?)?),
            ["poset", q, r] => ProcessName::BinomialPosetUnion {
                q: rational::parse(&field(q, "q")?)?,
                r: number(field(r, "r")?)? as u32,
            },
            ["genericpoints", n] => ProcessName::GenericPoints(number(field(n, "n")?)?),
            ["brenti", theta, rel] => {
                let theta = list(field(theta, "theta")?)?;
                let size = theta.len();
                let mut relation = vec![vec![false; size]; size];
                let spec = field(rel, "R")?;
                for pair in spec.split(',').filter(|p| !p.is_empty()) {
                    let (a, b) = pair
                        .split_once('-')
                        .ok_or_else(|| Error::Parse(format!("bad pair '{pair}' in '{s}'")))?;
                    let (a, b) = (number(a.to_string())?, number(b.to_string())?);
                    if a == 0 || b == 0 || a > size || b > size {
                        return Err(Error::Parse(format!("pair '{pair}' outside 1..{size}")));
                    }
                    relation[a - 1][b - 1] = true;
                }
                ProcessName::BrentiRelation { relation, theta }
            }
            _ => return Err(bad()),
        };
        name.validate()?;
        Ok(name)
    }
}
