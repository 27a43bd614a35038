//! Brute-force ground truth by exhaustive enumeration.
//!
//! Nothing here touches determinants, kernels or series: carries come from
//! adding digits, descents from comparing entries, group carries from the
//! Cayley table, and Mallows weights from counting inversions.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::catalog::{generic_points_h, ProcessName};
use crate::connectivity::connectivity_set;
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::groupcarries::CentralExtensionSetup;
use crate::onedep::Pattern;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug)]
pub enum OracleModel {
    Process(ProcessName),
    Group(CentralExtensionSetup),
    /// Connectivity set of a uniform permutation of `n` (horizon `n`).
    Connectivity,
}

/// Lexicographic successor; false after the last permutation.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Mixed-radix successor over `0..radix` digits; false after wrapping.
fn next_word(w: &mut [usize], radix: usize) -> bool {
    for d in w.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn check_budget(required: Option<u128>, budget: u128) -> Result<()> {
    let required = required.unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(())
}

fn power(base: usize, exp: usize) -> Option<u128> {
    (base as u128).checked_pow(exp as u32)
}

fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

fn code_of(bits: impl Iterator<Item = bool>) -> u64 {
    bits.enumerate().fold(0u64, |acc, (i, b)| acc | (u64::from(b) << i))
}

/// Histogram over pattern codes, in either integer or rational weights.
struct Histogram {
    counts: Vec<u64>,
    weights: Vec<Rational>,
    total: u64,
}

impl Histogram {
    fn new(sites: usize) -> Self {
        Self {
            counts: vec![0; 1 << sites],
            weights: vec![Rational::zero(); 1 << sites],
            total: 0,
        }
    }

    fn count(&mut self, code: u64) {
        self.counts[code as usize] += 1;
        self.total += 1;
    }

    fn weigh(&mut self, code: u64, w: Rational) {
        self.weights[code as usize] += w;
    }

    fn counted(self, horizon: usize) -> Vec<(Pattern, Rational)> {
        let total = BigInt::from(self.total);
        Pattern::all(horizon)
            .map(|p| {
                let c = BigInt::from(self.counts[p.code() as usize]);
                (p, Rational::new(c, total.clone()))
            })
            .collect()
    }

    fn weighted(self, horizon: usize) -> Vec<(Pattern, Rational)> {
        let mut w = self.weights;
        Pattern::all(horizon)
            .map(|p| {
                let v = std::mem::take(&mut w[p.code() as usize]);
                (p, v)
            })
            .collect()
    }
}

/// Exact law of the binary pattern on horizon `n` (sites `1..n-1`), listed
/// in `Pattern::all(n)` order.
pub fn oracle_distribution(model: &OracleModel, n: usize, budget: u128) -> Result<Vec<(Pattern, Rational)>> {
    if n == 0 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    if n > 40 {
        return Err(Error::Budget { required: u128::MAX, budget });
    }
    let sites = n - 1;
    match model {
        OracleModel::Connectivity => {
            check_budget(factorial(n), budget)?;
            let mut h = Histogram::new(sites);
            let mut p: Vec<usize> = (0..n).collect();
            loop {
                let c = connectivity_set(&p);
                h.count(code_of((1..n).map(|i| c.contains(&i))));
                if !next_permutation(&mut p) {
                    break;
                }
            }
            Ok(h.counted(n))
        }
        OracleModel::Group(setup) => group_distribution(setup, n, budget),
        OracleModel::Process(name) => process_distribution(name, n, budget),
    }
}

fn group_distribution(setup: &CentralExtensionSetup, n: usize, budget: u128) -> Result<Vec<(Pattern, Rational)>> {
    let m = setup.cosets();
    check_budget(power(m, n), budget)?;
    let g = setup.group();
    let reps = setup.reps();
    let in_n: Vec<bool> = (0..g.order()).map(|x| setup.subgroup().contains(&x)).collect();
    // the representative of the coset containing x
    let rep_of = |x: usize| -> usize {
        *reps
            .iter()
            .find(|&&r| in_n[g.mul(g.inv(r), x)])
            .expect("representatives cover the group")
    };
    let mut h = Histogram::new(n - 1);
    let mut column = vec![0usize; n];
    loop {
        let mut r = reps[column[0]];
        let mut bits = Vec::with_capacity(n - 1);
        for &c in &column[1..] {
            let prod = g.mul(r, reps[c]);
            let next = rep_of(prod);
            bits.push(next != prod);
            r = next;
        }
        h.count(code_of(bits.into_iter()));
        if !next_word(&mut column, m) {
            break;
        }
    }
    Ok(h.counted(n))
}

fn descents_of(p: &[usize]) -> impl Iterator<Item = bool> + '_ {
    p.windows(2).map(|w| w[0] > w[1])
}

fn process_distribution(name: &ProcessName, n: usize, budget: u128) -> Result<Vec<(Pattern, Rational)>> {
    name.validate()?;
    let sites = n - 1;
    let mut h = Histogram::new(sites);
    match name {
        ProcessName::CarriesBaseB(b) => {
            let b = *b as usize;
            check_budget(power(b, n), budget)?;
            let mut digits = vec![0usize; n];
            loop {
                // add the column top to bottom, recording carries
                let mut rem = digits[0];
                let mut bits = Vec::with_capacity(sites);
                for &d in &digits[1..] {
                    let s = rem + d;
                    bits.push(s >= b);
                    rem = s % b;
                }
                h.count(code_of(bits.into_iter()));
                if !next_word(&mut digits, b) {
                    break;
                }
            }
            Ok(h.counted(n))
        }
        ProcessName::UniformDescents | ProcessName::AlternatingDescents => {
            check_budget(factorial(n), budget)?;
            let alternating = matches!(name, ProcessName::AlternatingDescents);
            let mut p: Vec<usize> = (0..n).collect();
            loop {
                let bits = descents_of(&p)
                    .enumerate()
                    .map(|(i, d)| if alternating && (i + 1) % 2 == 0 { !d } else { d });
                h.count(code_of(bits));
                if !next_permutation(&mut p) {
                    break;
                }
            }
            Ok(h.counted(n))
        }
        ProcessName::MallowsDescents(q) => {
            check_budget(factorial(n), budget)?;
            let d = mallows_descent_law(q, n)?;
            for (code, w) in d.into_iter().enumerate() {
                h.weigh(code as u64, w);
            }
            Ok(h.weighted(n))
        }
        ProcessName::BinomialPosetUnion { q, r } => {
            check_budget(factorial(n), budget)?;
            let single = mallows_descent_law(q, n)?;
            let mut law = vec![Rational::zero(); 1 << sites];
            law[0] = Rational::one();
            for _ in 0..*r {
                let mut next = vec![Rational::zero(); 1 << sites];
                for (a, pa) in law.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                    for (b, pb) in single.iter().enumerate() {
                        next[a | b] += pa * pb;
                    }
                }
                law = next;
            }
            for (code, w) in law.into_iter().enumerate() {
                h.weigh(code as u64, w);
            }
            Ok(h.weighted(n))
        }
        ProcessName::IidTrials(p) => {
            weighted_strings(p, n, budget, |a, b| a > b)
        }
        ProcessName::BrentiRelation { relation, theta } => {
            weighted_strings(theta, n, budget, |a, b| !relation[a][b])
        }
        ProcessName::GenericPoints(k) => {
            let k = *k;
            check_budget(power(k + 1, n), budget)?;
            let mut u = vec![0usize; n];
            loop {
                h.count(code_of(u.windows(2).map(|w| generic_points_h(k, w[0], w[1]))));
                if !next_word(&mut u, k + 1) {
                    break;
                }
            }
            Ok(h.counted(n))
        }
        ProcessName::TypeBDescents(m) => {
            let m = *m;
            if n != m + 1 {
                return Err(Error::Parameter(format!("B_{m} lives on horizon {}, not {n}", m + 1)));
            }
            check_budget(factorial(m).and_then(|f| f.checked_mul(1u128 << m.min(100))), budget)?;
            let mut p: Vec<usize> = (0..m).collect();
            loop {
                for signs in 0u64..1 << m {
                    // rank in 1 < 2 < .. < m < -m < .. < -1: positive v -> v, negative v -> 2m+1-v
                    let rank = |i: usize| -> usize {
                        let v = p[i] + 1;
                        if signs >> i & 1 == 1 {
                            2 * m + 1 - v
                        } else {
                            v
                        }
                    };
                    let bits = (0..m).map(|i| {
                        if i + 1 < m {
                            rank(i) > rank(i + 1)
                        } else {
                            signs >> i & 1 == 1
                        }
                    });
                    h.count(code_of(bits));
                }
                if !next_permutation(&mut p) {
                    break;
                }
            }
            Ok(h.counted(n))
        }
    }
}

/// i.i.d. letters with weights `p`; a one at `i` when `one(Y_i, Y_{i+1})`.
fn weighted_strings(
    p: &[Rational],
    n: usize,
    budget: u128,
    one: impl Fn(usize, usize) -> bool,
) -> Result<Vec<(Pattern, Rational)>> {
    check_budget(power(p.len(), n), budget)?;
    let mut h = Histogram::new(n - 1);
    let mut y = vec![0usize; n];
    loop {
        let w = y.iter().fold(Rational::one(), |acc, &l| acc * &p[l]);
        if !w.is_zero() {
            h.weigh(code_of(y.windows(2).map(|w| one(w[0], w[1]))), w);
        }
        if !next_word(&mut y, p.len()) {
            break;
        }
    }
    Ok(h.weighted(n))
}

/// Descent-set law of `P(σ) ∝ q^{inv(σ)}` on `S_n`, indexed by pattern code.
/// The normaliser is `prod_{i<=n} (q^i - 1)/(q - 1)`, checked against the
/// weight sum.
pub fn mallows_descent_law(q: &Rational, n: usize) -> Result<Vec<Rational>> {
    let max_inv = n * n.saturating_sub(1) / 2;
    let powers: Vec<Rational> = (0..=max_inv).map(|k| rational::pow(q, k as u32)).collect();
    let mut law = vec![Rational::zero(); 1 << (n - 1)];
    let mut total = Rational::zero();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        let inv = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        law[code_of(descents_of(&p)) as usize] += &powers[inv];
        total += &powers[inv];
        if !next_permutation(&mut p) {
            break;
        }
    }
    let z = rational::q_factorial(n as u64, q);
    if z != total {
        return Err(Error::Parameter(format!(
            "Mallows normaliser {} disagrees with the weight sum {}",
            rational::format(&z),
            rational::format(&total)
        )));
    }
    Ok(law.into_iter().map(|w| w / &z).collect())
}

/// `rho(A)` for every `A ⊆ {1..n-1}` by summing over supersets.
pub fn oracle_correlations(model: &OracleModel, n: usize, budget: u128) -> Result<Vec<(Vec<usize>, Rational)>> {
    let dist = oracle_distribution(model, n, budget)?;
    let sites = n - 1;
    let mut rho: Vec<Rational> = dist.into_iter().map(|(_, v)| v).collect();
    // superset-sum transform
    for bit in 0..sites {
        for mask in 0..rho.len() {
            if mask >> bit & 1 == 0 {
                let add = rho[mask | 1 << bit].clone();
                rho[mask] += add;
            }
        }
    }
    Ok(rho
        .into_iter()
        .enumerate()
        .map(|(mask, v)| ((1..=sites).filter(|&i| mask >> (i - 1) & 1 == 1).collect(), v))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build;
    use crate::exact::rational::{int, rat};
    use crate::groupcarries::{builtin_setup, carries_pattern_distribution};
    use crate::onedep::{correlation, pattern_probability};

    fn process(name: &str) -> OracleModel {
        OracleModel::Process(name.parse().unwrap())
    }

    #[test]
    fn binary_carries_at_one_and_five() {
        let d = oracle_distribution(&process("carries:b=2"), 8, DEFAULT_BUDGET).unwrap();
        let p = Pattern::from_ones(8, &[1, 5]).unwrap();
        let v = &d.iter().find(|(q, _)| *q == p).unwrap().1;
        assert_eq!(*v, rat(9, 256));
    }

    #[test]
    fn eulerian_histogram() {
        let d = oracle_distribution(&process("descents:uniform"), 4, DEFAULT_BUDGET).unwrap();
        let mut hist = [Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()];
        for (p, v) in d {
            hist[p.ones()] += v;
        }
        assert_eq!(hist, [rat(1, 24), rat(11, 24), rat(11, 24), rat(1, 24)]);
    }

    #[test]
    fn horizon_one_is_certain() {
        for m in ["carries:b=3", "descents:uniform", "descents:mallows:q=1/3", "genericpoints:n=2"] {
            let d = oracle_distribution(&process(m), 1, DEFAULT_BUDGET).unwrap();
            assert_eq!(d.len(), 1);
            assert_eq!(d[0].1, int(1));
        }
    }

    #[test]
    fn decimal_pair_correlation() {
        let c = oracle_correlations(&process("carries:b=10"), 3, DEFAULT_BUDGET).unwrap();
        let both = c.iter().find(|(a, _)| *a == vec![1, 2]).unwrap();
        assert_eq!(both.1, rat(120, 1000));
        assert_eq!(c[0].1, int(1));
    }

    #[test]
    fn budget_refuses() {
        let r = oracle_distribution(&process("carries:b=10"), 8, 1000);
        assert!(matches!(r, Err(Error::Budget { required: 100_000_000, budget: 1000 })));
    }

    #[test]
    fn catalog_models_match_determinants() {
        let models = [
            "carries:b=2",
            "carries:b=3",
            "descents:uniform",
            "descents:mallows:q=1/2",
            "descents:iid:p=1/4,1/4,1/2",
            "descents:alternating",
            "poset:q=1/2:r=2",
            "genericpoints:n=3",
            "brenti:theta=1/3,2/3:R=1-2,2-1",
        ];
        for m in models {
            let name: ProcessName = m.parse().unwrap();
            for n in 1..=7 {
                let spec = build(&name, n).unwrap();
                let d = oracle_distribution(&OracleModel::Process(name.clone()), n, DEFAULT_BUDGET).unwrap();
                for (p, v) in d {
                    assert_eq!(pattern_probability(&spec, &p).unwrap(), v, "{m} n={n} {p}");
                }
            }
        }
    }

    #[test]
    fn signed_permutations_match_reiner() {
        for m in 1..=4 {
            let name = ProcessName::TypeBDescents(m);
            let spec = build(&name, m + 1).unwrap();
            let model = OracleModel::Process(name);
            for (p, v) in oracle_distribution(&model, m + 1, DEFAULT_BUDGET).unwrap() {
                assert_eq!(pattern_probability(&spec, &p).unwrap(), v, "B_{m} {p}");
            }
            for (a, v) in oracle_correlations(&model, m + 1, DEFAULT_BUDGET).unwrap() {
                assert_eq!(spec.kernel().unwrap().minor(&a).unwrap(), v);
            }
        }
    }

    #[test]
    fn groups_match_transfer_matrix() {
        for name in ["q8", "d8", "cyclic:m=4", "split:m=3", "c2cubed:nontrivial"] {
            let s = builtin_setup(name).unwrap();
            let exact = carries_pattern_distribution(&s, 6, DEFAULT_BUDGET).unwrap();
            let brute = oracle_distribution(&OracleModel::Group(s), 6, DEFAULT_BUDGET).unwrap();
            assert_eq!(exact.patterns, brute, "{name}");
        }
    }

    #[test]
    fn connectivity_matches_counts() {
        let n = 6;
        let c = oracle_correlations(&OracleModel::Connectivity, n, DEFAULT_BUDGET).unwrap();
        for (a, v) in c {
            assert_eq!(v, crate::connectivity::containing_probability(n, &a).unwrap());
        }
    }

    #[test]
    fn correlations_match_closed_forms() {
        let name: ProcessName = "carries:b=3".parse().unwrap();
        let spec = build(&name, 6).unwrap();
        for (a, v) in oracle_correlations(&OracleModel::Process(name), 6, DEFAULT_BUDGET).unwrap() {
            assert_eq!(correlation(&spec, &a).unwrap(), v);
        }
    }
}
