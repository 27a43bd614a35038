//! Carries of central extensions of finite groups.
//!
//! A group `G`, a central subgroup `N` and one representative per coset of
//! `N` determine a factor set `f` by `t(s) t(u) = t(su) f(s, u)`. Multiplying
//! a column of representatives produces remainders and `N`-valued carries;
//! the binary process `B_i = [f_i != id]` is a stationary one-dependent
//! two-block factor of the (uniform, independent) remainders.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{int, Rational};
use crate::onedep::{OneDepSpec, Pattern};

/// A finite group given by its Cayley table, `table[a][b] = a * b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    names: Vec<String>,
}

impl FiniteGroup {
    /// Checks closure, identity, inverses and associativity.
    pub fn new(table: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Setup("empty group".into()));
        }
        if let Some(r) = table.iter().position(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::Setup(format!("row {r} of the Cayley table is malformed")));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::Setup("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::Setup(format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::Setup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let names = match names {
            Some(v) if v.len() == n => v,
            Some(v) => {
                return Err(Error::Setup(format!("{} names for {n} elements", v.len())));
            }
            None => (0..n).map(|g| g.to_string()).collect(),
        };
        Ok(Self {
            table,
            identity,
            inverse,
            names,
        })
    }

    /// The group generated by permutations (given as images of `0..d`),
    /// with the product `a * b` meaning "apply `b`, then `a`".
    pub fn from_permutations(generators: &[Vec<usize>]) -> Result<(Self, Vec<Vec<usize>>)> {
        let d = generators.first().map_or(0, Vec::len);
        let id: Vec<usize> = (0..d).collect();
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&x| a[x]).collect() };
        let mut elements = vec![id];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut i = 0;
        while i < elements.len() {
            for g in generators {
                let p = compose(&elements[i], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elements.len());
                    elements.push(p);
                }
            }
            i += 1;
        }
        let table = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        Ok((Self::new(table, None)?, elements))
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn product(&self, word: &[usize]) -> usize {
        word.iter().fold(self.identity, |acc, &g| self.mul(acc, g))
    }

    fn with_names(mut self, names: Vec<String>) -> Self {
        self.names = names;
        self
    }
}

/// Cyclic group `Z/m`, elements named `0..m-1`.
pub fn cyclic(m: usize) -> Result<FiniteGroup> {
    if m == 0 {
        return Err(Error::Parameter("cyclic group of order 0".into()));
    }
    FiniteGroup::new(
        (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect(),
        None,
    )
}

/// `Q8 = {1, i, j, k, -1, -i, -j, -k}` in that index order.
pub fn quaternion() -> FiniteGroup {
    // unit products on {1, i, j, k} as (sign, unit)
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let table = (0..8)
        .map(|a| {
            (0..8)
                .map(|b| {
                    let (s, u) = UNIT[a % 4][b % 4];
                    let neg = s ^ (a >= 4) ^ (b >= 4);
                    u + if neg { 4 } else { 0 }
                })
                .collect()
        })
        .collect();
    let names = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    FiniteGroup::new(table, Some(names)).expect("quaternion table is a group")
}

/// `D8 = <x, y : x^2 = y^2 = (xy)^4 = 1>` acting on the corners of a square,
/// with elements named by words in `x`, `y`, `z = xy` and `-1 = z^2`.
pub fn dihedral8() -> FiniteGroup {
    // x: reflection i -> -i, z: rotation i -> i+1, y = x z (so that x y = z)
    let x = vec![0, 3, 2, 1];
    let z = vec![1, 2, 3, 0];
    let y: Vec<usize> = z.iter().map(|&v| x[v]).collect();
    let (g, elements) = FiniteGroup::from_permutations(&[x.clone(), y.clone()]).expect("dihedral group");
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&v| a[v]).collect() };
    let id: Vec<usize> = (0..4).collect();
    let minus = compose(&z, &z);
    let named: [(&str, Vec<usize>); 8] = [
        ("1", id),
        ("x", x.clone()),
        ("y", y.clone()),
        ("z", z.clone()),
        ("-1", minus.clone()),
        ("-x", compose(&minus, &x)),
        ("-y", compose(&minus, &y)),
        ("-z", compose(&minus, &z)),
    ];
    let names = elements
        .iter()
        .map(|e| {
            named
                .iter()
                .find(|(_, p)| p == e)
                .map(|(n, _)| n.to_string())
                .expect("every element of D8 is named")
        })
        .collect();
    g.with_names(names)
}

/// `C2 x Cm`, element `(a, b)` at index `a * m + b`.
pub fn c2_times_cm(m: usize) -> Result<FiniteGroup> {
    if m == 0 {
        return Err(Error::Parameter("C_0 is not a group".into()));
    }
    let size = 2 * m;
    let table = (0..size)
        .map(|p| {
            (0..size)
                .map(|q| ((p / m + q / m) % 2) * m + (p % m + q % m) % m)
                .collect()
        })
        .collect();
    let names = (0..size).map(|p| format!("({},{})", p / m, p % m)).collect();
    FiniteGroup::new(table, Some(names))
}

/// `C2^3`, element `(a, b, c)` at index `a + 2b + 4c`, named `"abc"`.
pub fn c2_cubed() -> FiniteGroup {
    let table = (0..8).map(|p| (0..8).map(|q| p ^ q).collect()).collect();
    let names = (0..8usize)
        .map(|p| format!("{}{}{}", p & 1, (p >> 1) & 1, (p >> 2) & 1))
        .collect();
    FiniteGroup::new(table, Some(names)).expect("C2^3 table is a group")
}

/// A group, a central subgroup and coset representatives (label `0` is the
/// identity coset and must be represented by the identity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralExtensionSetup {
    group: FiniteGroup,
    subgroup: Vec<usize>,
    reps: Vec<usize>,
    /// coset label of every element
    coset: Vec<usize>,
    /// `n_part[g]` with `g = n_part[g] * t(coset[g])`
    n_part: Vec<usize>,
}

impl CentralExtensionSetup {
    pub fn new(group: FiniteGroup, subgroup: Vec<usize>, reps: Vec<usize>) -> Result<Self> {
        let order = group.order();
        let mut in_n = vec![false; order];
        for &x in &subgroup {
            if x >= order {
                return Err(Error::Setup(format!("subgroup element {x} outside the group")));
            }
            in_n[x] = true;
        }
        if !in_n[group.identity()] {
            return Err(Error::Setup("subgroup misses the identity".into()));
        }
        let members: Vec<usize> = (0..order).filter(|&g| in_n[g]).collect();
        for &a in &members {
            for &b in &members {
                if !in_n[group.mul(a, b)] {
                    return Err(Error::Setup(format!(
                        "subgroup not closed: {} * {} = {}",
                        group.name(a),
                        group.name(b),
                        group.name(group.mul(a, b))
                    )));
                }
            }
            for g in 0..order {
                if group.mul(a, g) != group.mul(g, a) {
                    return Err(Error::Setup(format!(
                        "subgroup not central: {} * {} != {} * {}",
                        group.name(a),
                        group.name(g),
                        group.name(g),
                        group.name(a)
                    )));
                }
            }
        }
        if !order.is_multiple_of(members.len()) || reps.len() != order / members.len() {
            return Err(Error::Setup(format!(
                "{} representatives for {} cosets",
                reps.len(),
                order / members.len()
            )));
        }
        if reps.first() != Some(&group.identity()) {
            return Err(Error::Setup("the identity coset must be represented by the identity".into()));
        }
        let mut coset = vec![usize::MAX; order];
        let mut n_part = vec![usize::MAX; order];
        for (label, &t) in reps.iter().enumerate() {
            if t >= order {
                return Err(Error::Setup(format!("representative {t} outside the group")));
            }
            for &x in &members {
                let g = group.mul(x, t);
                if coset[g] != usize::MAX {
                    return Err(Error::Setup(format!(
                        "representatives {} and {} lie in the same coset",
                        group.name(reps[coset[g]]),
                        group.name(t)
                    )));
                }
                coset[g] = label;
                n_part[g] = x;
            }
        }
        Ok(Self {
            group,
            subgroup: members,
            reps,
            coset,
            n_part,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn subgroup(&self) -> &[usize] {
        &self.subgroup
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn cosets(&self) -> usize {
        self.reps.len()
    }

    /// `(n, label)` with `g = n * t(label)`.
    pub fn decompose(&self, g: usize) -> (usize, usize) {
        (self.n_part[g], self.coset[g])
    }

    /// `f(s, u) = t(su)^{-1} t(s) t(u)`, an element of `N`.
    pub fn f(&self, s: usize, u: usize) -> usize {
        let prod = self.group.mul(self.reps[s], self.reps[u]);
        self.n_part[prod]
    }

    /// Coset label of `t(s) t(u)`.
    pub fn coset_product(&self, s: usize, u: usize) -> usize {
        self.coset[self.group.mul(self.reps[s], self.reps[u])]
    }

    /// Two-block rule: `h(r, r') = f(r, t)` where `t` is the coset of
    /// `r^{-1} r'`.
    pub fn h(&self, r: usize, r2: usize) -> usize {
        let t = self.coset[self.group.mul(self.group.inv(self.reps[r]), self.reps[r2])];
        self.f(r, t)
    }

    pub fn carries_at(&self, r: usize, r2: usize) -> bool {
        self.h(r, r2) != self.group.identity()
    }
}

/// All factor-set values, keyed by coset labels.
pub fn factor_set(setup: &CentralExtensionSetup) -> BTreeMap<(usize, usize), usize> {
    let m = setup.cosets();
    let mut out = BTreeMap::new();
    for s in 0..m {
        for u in 0..m {
            out.insert((s, u), setup.f(s, u));
        }
    }
    out
}

pub fn is_trivial_factor_set(setup: &CentralExtensionSetup) -> bool {
    let id = setup.group.identity();
    factor_set(setup).values().all(|&v| v == id)
}

/// Remainders and carries of one column of coset representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarriesTrace {
    /// coset labels of the column
    pub column: Vec<usize>,
    /// coset labels of the running products
    pub remainders: Vec<usize>,
    /// carries as elements of `N`, one between consecutive rows
    pub carries: Vec<usize>,
}

impl CarriesTrace {
    pub fn bits(&self, identity: usize) -> Vec<bool> {
        self.carries.iter().map(|&c| c != identity).collect()
    }
}

/// Multiplies `t(c_1) t(c_2) ...` row by row, recording carries.
pub fn multiply_column(setup: &CentralExtensionSetup, column: &[usize]) -> Result<CarriesTrace> {
    if let Some(&bad) = column.iter().find(|&&c| c >= setup.cosets()) {
        return Err(Error::Parameter(format!("coset label {bad} out of range")));
    }
    let mut remainders = Vec::with_capacity(column.len());
    let mut carries = Vec::with_capacity(column.len().saturating_sub(1));
    for (i, &t) in column.iter().enumerate() {
        if i == 0 {
            remainders.push(t);
            continue;
        }
        let r = remainders[i - 1];
        carries.push(setup.f(r, t));
        remainders.push(setup.coset_product(r, t));
    }
    Ok(CarriesTrace {
        column: column.to_vec(),
        remainders,
        carries,
    })
}

/// Product of arbitrary group elements recomputed from the carries: the
/// `N`-parts and carries commute past everything, leaving the last
/// remainder's representative on the right.
pub fn reconstruct_product(setup: &CentralExtensionSetup, word: &[usize]) -> Result<usize> {
    let g = &setup.group;
    if word.is_empty() {
        return Ok(g.identity());
    }
    let (ns, column): (Vec<usize>, Vec<usize>) = word.iter().map(|&x| setup.decompose(x)).unzip();
    let trace = multiply_column(setup, &column)?;
    let central = ns.iter().chain(&trace.carries).fold(g.identity(), |acc, &x| g.mul(acc, x));
    let last = *trace.remainders.last().expect("nonempty column");
    Ok(g.mul(central, setup.reps[last]))
}

/// Uniform random column of `length` representatives and its trace.
pub fn simulate_carries(setup: &CentralExtensionSetup, length: usize, seed: u64) -> CarriesTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = setup.cosets();
    let column: Vec<usize> = (0..length).map(|_| rng.random_range(0..m)).collect();
    multiply_column(setup, &column).expect("labels in range")
}

/// Exact law of the binary carries on horizon `n` together with
/// `a_0 .. a_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CarriesDistribution {
    pub n: usize,
    pub patterns: Vec<(Pattern, Rational)>,
    pub a: Vec<Rational>,
}

/// Exact pattern distribution by a transfer-matrix sum over the uniform
/// remainder sequences. The cost `n * m^2 * 2^(n-1)` (with `m` cosets) must
/// fit the budget.
pub fn carries_pattern_distribution(
    setup: &CentralExtensionSetup,
    n: usize,
    budget: u128,
) -> Result<CarriesDistribution> {
    if n < 1 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    let m = setup.cosets();
    let cost = (n as u128) * (m as u128).pow(2) * (1u128 << (n - 1).min(120));
    if cost > budget || n > 60 {
        return Err(Error::Budget {
            required: cost,
            budget,
        });
    }
    let sites = n - 1;
    // weights[r][code]: number of remainder prefixes ending at r with these bits
    let mut weights: Vec<HashMap<u64, u64>> = vec![HashMap::new(); m];
    for w in weights.iter_mut() {
        w.insert(0, 1);
    }
    for step in 0..sites {
        let mut next: Vec<HashMap<u64, u64>> = vec![HashMap::new(); m];
        for (r, w) in weights.iter().enumerate() {
            for r2 in 0..m {
                let bit = u64::from(setup.carries_at(r, r2)) << step;
                for (&code, &count) in w {
                    *next[r2].entry(code | bit).or_insert(0) += count;
                }
            }
        }
        weights = next;
    }
    let total = int(m as i64).pow(n as i32);
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for w in &weights {
        for (&code, &c) in w {
            *counts.entry(code).or_insert(0) += c;
        }
    }
    let patterns: Vec<(Pattern, Rational)> = Pattern::all(n)
        .map(|p| {
            let c = counts.get(&p.code()).copied().unwrap_or(0);
            let v = Rational::from_integer(c.into()) / &total;
            (p, v)
        })
        .collect();
    let a = carries_a_sequence(setup, n + 1);
    Ok(CarriesDistribution { n, patterns, a })
}

/// `a_0 .. a_{len-1}` with `a_i = P(B_1 = .. = B_{i-1} = 1)`.
pub fn carries_a_sequence(setup: &CentralExtensionSetup, len: usize) -> Vec<Rational> {
    let m = setup.cosets();
    let mut out = Vec::with_capacity(len);
    // paths[r]: sequences of remainders of the current length, all carrying, ending at r
    let mut paths = vec![Rational::one(); m];
    let mm = int(m as i64);
    for i in 0..len {
        if i == 0 {
            out.push(Rational::one());
            continue;
        }
        if i >= 2 {
            paths = (0..m)
                .map(|r2| {
                    (0..m)
                        .filter(|&r| setup.carries_at(r, r2))
                        .fold(Rational::zero(), |acc, r| acc + &paths[r])
                })
                .collect();
        }
        let total: Rational = paths.iter().sum();
        out.push(total / mm.pow(i as i32));
    }
    out
}

/// The binary carries process as a stationary a-form spec on horizon `n`.
pub fn carries_spec(setup: &CentralExtensionSetup, n: usize) -> Result<OneDepSpec> {
    let a = carries_a_sequence(setup, n + 2);
    OneDepSpec::stationary_a(a[1..].to_vec(), false, n)
}

/// Group input file: Cayley table with 0-based indices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupFile {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub subgroup: Vec<usize>,
    pub reps: Vec<usize>,
}

impl GroupFile {
    pub fn into_setup(self) -> Result<CentralExtensionSetup> {
        if self.table.len() != self.order {
            return Err(Error::Setup(format!(
                "order {} but {} table rows",
                self.order,
                self.table.len()
            )));
        }
        let g = FiniteGroup::new(self.table, self.names)?;
        CentralExtensionSetup::new(g, self.subgroup, self.reps)
    }

    pub fn from_setup(setup: &CentralExtensionSetup) -> Self {
        Self {
            order: setup.group.order(),
            table: setup.group.table.clone(),
            names: Some(setup.group.names.clone()),
            subgroup: setup.subgroup.clone(),
            reps: setup.reps.clone(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group file serialises")
    }
}

/// Named setups from the examples: `q8`, `d8`, `cyclic:m=<m>` (the
/// extension `C_2m ⊃ {0, m}`), `split:m=<m>` (`C2 x Cm` with reps `(0, i)`),
/// `c100` (`C_100 ⊃ C_10`), `c2cubed:trivial` and `c2cubed:nontrivial`.
pub fn builtin_setup(name: &str) -> Result<CentralExtensionSetup> {
    let by_names = |g: FiniteGroup, n: &[&str], r: &[&str]| -> Result<CentralExtensionSetup> {
        let idx = |s: &&str| {
            g.index_of(s)
                .ok_or_else(|| Error::Setup(format!("no element named {s}")))
        };
        let n = n.iter().map(idx).collect::<Result<Vec<_>>>()?;
        let r = r.iter().map(idx).collect::<Result<Vec<_>>>()?;
        CentralExtensionSetup::new(g, n, r)
    };
    let param = |s: &str, key: &str| -> Result<usize> {
        s.strip_prefix(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected {key}<int> in '{name}'")))
    };
    match name.split(':').collect::<Vec<_>>().as_slice() {
        ["q8"] => by_names(quaternion(), &["1", "-1"], &["1", "i", "j", "k"]),
        ["d8"] => by_names(dihedral8(), &["1", "-1"], &["1", "x", "y", "z"]),
        ["c100"] => CentralExtensionSetup::new(cyclic(100)?, (0..10).map(|i| 10 * i).collect(), (0..10).collect()),
        ["cyclic", m] => {
            let m = param(m, "m=")?;
            if m == 0 {
                return Err(Error::Parameter("m must be positive".into()));
            }
            CentralExtensionSetup::new(cyclic(2 * m)?, vec![0, m], (0..m).collect())
        }
        ["split", m] => {
            let m = param(m, "m=")?;
            CentralExtensionSetup::new(c2_times_cm(m)?, vec![0, m], (0..m).collect())
        }
        ["c2cubed", "trivial"] => by_names(c2_cubed(), &["000", "111"], &["000", "100", "010", "110"]),
        ["c2cubed", "nontrivial"] => by_names(c2_cubed(), &["000", "111"], &["000", "100", "010", "001"]),
        _ => Err(Error::Parse(format!("unknown group setup '{name}'"))),
    }
}
