//! One-dependent process specifications.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::kernel::Kernel;
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::{LaurentSeries, RationalMatrix};

/// A coefficient sequence `c_0, c_1, ..., c_{L-1}` declared to a finite
/// length. Beyond that length a query is an error unless `tail_zero` says
/// the remaining coefficients are exactly zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    values: Vec<Rational>,
    tail_zero: bool,
}

impl Sequence {
    pub fn new(values: Vec<Rational>, tail_zero: bool) -> Self {
        Self { values, tail_zero }
    }

    pub fn get(&self, i: i64) -> Result<Rational> {
        if i < 0 {
            return Ok(Rational::zero());
        }
        let i = i as usize;
        match self.values.get(i) {
            Some(v) => Ok(v.clone()),
            None if self.tail_zero => Ok(Rational::zero()),
            None => Err(Error::SequenceTooShort {
                index: i,
                len: self.values.len(),
            }),
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tail_zero(&self) -> bool {
        self.tail_zero
    }

    /// Number of leading coefficients that are known (infinite when the tail
    /// is exactly zero).
    pub fn known(&self) -> usize {
        if self.tail_zero {
            usize::MAX
        } else {
            self.values.len()
        }
    }

    /// Generating series `sum c_i z^i` known below `order`.
    pub fn series(&self, order: usize) -> Result<LaurentSeries> {
        if order > self.known() {
            return Err(Error::SequenceTooShort {
                index: order - 1,
                len: self.values.len(),
            });
        }
        Ok(LaurentSeries::polynomial(&self.values, order as i64))
    }
}

/// `e(i, j)` for `0 <= i <= j <= n`, stored as an upper triangular matrix with
/// unit diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ETable {
    table: RationalMatrix,
}

impl ETable {
    /// `table` is `(n+1) x (n+1)`, indexed by `0..=n`.
    pub fn new(table: RationalMatrix) -> Result<Self> {
        if !table.is_square() || table.rows() < 2 {
            return Err(Error::InvalidSpec("e-table must be square of size >= 2".into()));
        }
        let n = table.rows() - 1;
        for i in 0..=n {
            if !table[(i, i)].is_one() {
                return Err(Error::InvalidSpec(format!("e({i},{i}) must be 1")));
            }
            if i < n && !table[(i, i + 1)].is_positive() {
                return Err(Error::SingularMatrix(format!(
                    "e({},{}) must be positive",
                    i,
                    i + 1
                )));
            }
            for j in 0..i {
                if !table[(i, j)].is_zero() {
                    return Err(Error::InvalidSpec(format!("e({i},{j}) must vanish for i > j")));
                }
            }
        }
        Ok(Self { table })
    }

    /// Toeplitz table `e(i, j) = e(j - i)` on `0..=n`.
    pub fn toeplitz(e: &Sequence, n: usize) -> Result<Self> {
        let mut t = RationalMatrix::zeros(n + 1, n + 1);
        for i in 0..=n {
            for j in i..=n {
                t[(i, j)] = e.get((j - i) as i64)?;
            }
        }
        Self::new(t)
    }

    pub fn horizon(&self) -> usize {
        self.table.rows() - 1
    }

    pub fn e(&self, i: usize, j: usize) -> Rational {
        if i > j {
            Rational::zero()
        } else {
            self.table[(i, j)].clone()
        }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.table
    }
}

/// `rho([x, x+len))` for the intervals inside `1..n-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalTable {
    horizon: usize,
    values: BTreeMap<(usize, usize), Rational>,
}

impl IntervalTable {
    pub fn new(horizon: usize, values: BTreeMap<(usize, usize), Rational>) -> Result<Self> {
        for &(x, len) in values.keys() {
            if x == 0 || len == 0 || x + len > horizon {
                return Err(Error::InvalidSpec(format!(
                    "interval [{x},{}) outside 1..{}",
                    x + len,
                    horizon.saturating_sub(1)
                )));
            }
        }
        Ok(Self { horizon, values })
    }

    /// `rho([x, x+len))`; the empty interval has correlation 1.
    pub fn get(&self, x: usize, len: usize) -> Result<Rational> {
        if len == 0 {
            return Ok(Rational::one());
        }
        self.values.get(&(x, len)).cloned().ok_or_else(|| {
            Error::IncompleteSpec(format!("missing rho([{x},{}))", x + len))
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecKind {
    /// Run probabilities `a_0 = 1, a_1 = 1, a_2, ...` with
    /// `a_i = P(X_1 = ... = X_{i-1} = 1)`.
    StationaryA(Sequence),
    /// Stationary e-sequence `e(0) = 1, e(1) > 0, ...`, with
    /// `P_n(S) = e(1)^{-n} det[e(s_{j+1} - s_i)]` over the occupied sites.
    StationaryE(Sequence),
    /// Non-stationary e-table.
    TableE(ETable),
    /// Correlations of all intervals.
    IntervalRho(IntervalTable),
}

/// A one-dependent process on the sites `1..n-1` (`n` is the horizon).
#[derive(Clone, Debug)]
pub struct OneDepSpec {
    kind: SpecKind,
    horizon: usize,
    kernel: Arc<OnceLock<Kernel>>,
}

impl PartialEq for OneDepSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.horizon == other.horizon
    }
}

impl Eq for OneDepSpec {}

impl OneDepSpec {
    fn from_kind(kind: SpecKind, horizon: usize) -> Self {
        Self {
            kind,
            horizon,
            kernel: Arc::new(OnceLock::new()),
        }
    }

    /// Stationary spec from `a_1, a_2, ...` (`a_1` must be 1).
    pub fn stationary_a(a_from_one: Vec<Rational>, tail_zero: bool, horizon: usize) -> Result<Self> {
        match a_from_one.first() {
            Some(a1) if a1.is_one() => {}
            _ => return Err(Error::InvalidSpec("a_1 must equal 1".into())),
        }
        if let Some((i, v)) = a_from_one.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::InvalidSpec(format!(
                "a_{} = {} is negative",
                i + 1,
                rational::format(v)
            )));
        }
        let mut values = vec![Rational::one()];
        values.extend(a_from_one);
        Ok(Self::from_kind(
            SpecKind::StationaryA(Sequence::new(values, tail_zero)),
            horizon,
        ))
    }

    /// Stationary spec from `e(0), e(1), ...`.
    pub fn stationary_e(e: Vec<Rational>, horizon: usize) -> Result<Self> {
        Self::stationary_e_seq(Sequence::new(e, false), horizon)
    }

    pub fn stationary_e_seq(e: Sequence, horizon: usize) -> Result<Self> {
        if !e.get(0)?.is_one() {
            return Err(Error::InvalidSpec("e(0) must equal 1".into()));
        }
        if !e.get(1)?.is_positive() {
            return Err(Error::SingularMatrix("e(1) must be positive".into()));
        }
        Ok(Self::from_kind(SpecKind::StationaryE(e), horizon))
    }

    pub fn table_e(table: ETable) -> Self {
        let n = table.horizon();
        Self::from_kind(SpecKind::TableE(table), n)
    }

    pub fn interval_rho(table: IntervalTable) -> Self {
        let n = table.horizon();
        Self::from_kind(SpecKind::IntervalRho(table), n)
    }

    pub fn kind(&self) -> &SpecKind {
        &self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of sites, `n - 1`.
    pub fn sites(&self) -> usize {
        self.horizon.saturating_sub(1)
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self.kind, SpecKind::StationaryA(_) | SpecKind::StationaryE(_))
    }

    /// The same stationary process on a different horizon.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        if !self.is_stationary() {
            return Err(Error::Unsupported(
                "only stationary specs can change horizon".into(),
            ));
        }
        Ok(Self::from_kind(self.kind.clone(), horizon))
    }

    /// The dense kernel on the sites, computed once and cached.
    pub fn kernel(&self) -> Result<&Kernel> {
        if let Some(k) = self.kernel.get() {
            return Ok(k);
        }
        let k = super::kernel::kernel_for_spec(self)?;
        Ok(self.kernel.get_or_init(|| k))
    }

    /// Run probabilities `a_0 .. a_{len-1}` (`a_0 = a_1 = 1`).
    ///
    /// For an e-form spec they come from `A(z) = 1 / E(-z)`, where `E` is the
    /// e-series normalised so that `e(1) = 1`.
    pub fn a_sequence(&self, len: usize) -> Result<Sequence> {
        match &self.kind {
            SpecKind::StationaryA(a) => {
                if a.tail_zero() {
                    return Ok(a.clone());
                }
                let vals = (0..len.min(a.len()))
                    .map(|i| a.get(i as i64))
                    .collect::<Result<Vec<_>>>()?;
                if len > a.len() {
                    return Err(Error::SequenceTooShort {
                        index: len - 1,
                        len: a.len(),
                    });
                }
                Ok(Sequence::new(vals, false))
            }
            SpecKind::StationaryE(e) => {
                let norm = normalized_series(e, len)?;
                let a = norm.negate_variable().reciprocal(len as i64)?;
                Ok(Sequence::new(a.coefficients().to_vec(), false))
            }
            _ => Err(Error::Unsupported("a-sequence of a non-stationary spec".into())),
        }
    }

    /// The e-sequence normalised to `e(1) = 1`, `e(0) .. e(len-1)`.
    pub fn normalized_e_sequence(&self, len: usize) -> Result<Sequence> {
        match &self.kind {
            SpecKind::StationaryE(e) => {
                let s = normalized_series(e, len)?;
                Ok(Sequence::new(s.coefficients().to_vec(), false))
            }
            SpecKind::StationaryA(a) => {
                let order = len.min(a.known());
                if order < len {
                    return Err(Error::SequenceTooShort {
                        index: len - 1,
                        len: a.len(),
                    });
                }
                let e = a.series(len)?.negate_variable().reciprocal(len as i64)?;
                Ok(Sequence::new(e.coefficients().to_vec(), false))
            }
            _ => Err(Error::Unsupported("e-sequence of a non-stationary spec".into())),
        }
    }

    /// Interval correlations `rho([x, x+len))` on this spec's horizon.
    pub fn interval_table(&self) -> Result<IntervalTable> {
        let n = self.horizon;
        let sites = self.sites();
        let mut values = BTreeMap::new();
        match &self.kind {
            SpecKind::IntervalRho(t) => return Ok(t.clone()),
            SpecKind::StationaryA(_) | SpecKind::StationaryE(_) => {
                let a = self.a_sequence(n + 1)?;
                for x in 1..=sites {
                    for len in 1..=sites + 1 - x {
                        values.insert((x, len), a.get(len as i64 + 1)?);
                    }
                }
            }
            SpecKind::TableE(_) => {
                let k = self.kernel()?.matrix(sites)?;
                for x in 1..=sites {
                    for len in 1..=sites + 1 - x {
                        let idx: Vec<usize> = (x - 1..x - 1 + len).collect();
                        values.insert((x, len), k.principal(&idx).det()?);
                    }
                }
            }
        }
        IntervalTable::new(n, values)
    }
}

fn normalized_series(e: &Sequence, len: usize) -> Result<LaurentSeries> {
    let e1 = e.get(1)?;
    let s = e.series(len)?;
    Ok(s.rescale_variable(&e1.recip()))
}

// ---------------------------------------------------------------------------
// JSON spec files

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IntervalEntry {
    pub start: usize,
    pub len: usize,
    #[serde(with = "rational::as_string")]
    pub value: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SpecFile {
    StationaryA {
        horizon: usize,
        /// `a_1, a_2, ...`
        #[serde(with = "rational::as_string_vec")]
        a: Vec<Rational>,
        #[serde(default)]
        tail_zero: bool,
    },
    StationaryE {
        horizon: usize,
        /// `e(0), e(1), ...`
        #[serde(with = "rational::as_string_vec")]
        e: Vec<Rational>,
        #[serde(default)]
        tail_zero: bool,
    },
    TableE {
        horizon: usize,
        /// Row `i` lists `e(i, i), e(i, i+1), ..., e(i, n)`.
        e: Vec<Vec<String>>,
    },
    IntervalRho {
        horizon: usize,
        rho: Vec<IntervalEntry>,
    },
}

impl SpecFile {
    pub fn from_spec(spec: &OneDepSpec) -> Self {
        let horizon = spec.horizon();
        match spec.kind() {
            SpecKind::StationaryA(a) => SpecFile::StationaryA {
                horizon,
                a: a.values()[1..].to_vec(),
                tail_zero: a.tail_zero(),
            },
            SpecKind::StationaryE(e) => SpecFile::StationaryE {
                horizon,
                e: e.values().to_vec(),
                tail_zero: e.tail_zero(),
            },
            SpecKind::TableE(t) => {
                let n = t.horizon();
                SpecFile::TableE {
                    horizon,
                    e: (0..=n)
                        .map(|i| (i..=n).map(|j| rational::format(&t.e(i, j))).collect())
                        .collect(),
                }
            }
            SpecKind::IntervalRho(t) => SpecFile::IntervalRho {
                horizon,
                rho: t
                    .entries()
                    .iter()
                    .map(|(&(start, len), v)| IntervalEntry {
                        start,
                        len,
                        value: v.clone(),
                    })
                    .collect(),
            },
        }
    }

    pub fn into_spec(self) -> Result<OneDepSpec> {
        match self {
            SpecFile::StationaryA { horizon, a, tail_zero } => {
                OneDepSpec::stationary_a(a, tail_zero, horizon)
            }
            SpecFile::StationaryE { horizon, e, tail_zero } => {
                OneDepSpec::stationary_e_seq(Sequence::new(e, tail_zero), horizon)
            }
            SpecFile::TableE { horizon, e } => {
                if e.len() != horizon + 1 {
                    return Err(Error::InvalidSpec(format!(
                        "table_e needs {} rows, got {}",
                        horizon + 1,
                        e.len()
                    )));
                }
                let mut m = RationalMatrix::zeros(horizon + 1, horizon + 1);
                for (i, row) in e.iter().enumerate() {
                    if row.len() != horizon + 1 - i {
                        return Err(Error::InvalidSpec(format!(
                            "table_e row {i} must have {} entries",
                            horizon + 1 - i
                        )));
                    }
                    for (k, v) in row.iter().enumerate() {
                        m[(i, i + k)] = rational::parse(v)?;
                    }
                }
                Ok(OneDepSpec::table_e(ETable::new(m)?))
            }
            SpecFile::IntervalRho { horizon, rho } => {
                let values = rho.into_iter().map(|e| ((e.start, e.len), e.value)).collect();
                Ok(OneDepSpec::interval_rho(IntervalTable::new(horizon, values)?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn carries_a(b: i64) -> Vec<Rational> {
        (1..=b)
            .map(|i| rational::big(rational::binomial(b, i)) / rational::powi(&int(b), i))
            .collect()
    }

    #[test]
    fn a_one_must_be_one() {
        assert!(OneDepSpec::stationary_a(vec![rat(1, 2)], false, 4).is_err());
        assert!(OneDepSpec::stationary_a(vec![int(1), int(-1)], false, 4).is_err());
    }

    #[test]
    fn e_form_requires_positive_e1() {
        assert!(OneDepSpec::stationary_e(vec![int(1), int(0), int(1)], 3).is_err());
        assert!(OneDepSpec::stationary_e(vec![int(2), int(1)], 3).is_err());
    }

    #[test]
    fn sequence_truncation_is_loud() {
        let s = Sequence::new(vec![int(1), int(2)], false);
        assert!(s.get(2).is_err());
        let s = Sequence::new(vec![int(1), int(2)], true);
        assert_eq!(s.get(7).unwrap(), int(0));
    }

    #[test]
    fn a_and_e_forms_agree_for_carries() {
        // e(j) = C(j+2, 2) and a_i = C(3, i)/3^i describe the same process
        let e: Vec<Rational> = (0..10).map(|j| rational::big(rational::binomial(j + 2, 2))).collect();
        let se = OneDepSpec::stationary_e(e, 9).unwrap();
        let sa = OneDepSpec::stationary_a(carries_a(3), true, 9).unwrap();
        let from_e = se.a_sequence(10).unwrap();
        for i in 0..10 {
            assert_eq!(from_e.get(i).unwrap(), sa.a_sequence(10).unwrap().get(i).unwrap());
        }
        let back = sa.normalized_e_sequence(10).unwrap();
        for j in 0..10i64 {
            let expect = rational::big(rational::binomial(j + 2, 2)) / rational::powi(&int(3), j);
            assert_eq!(back.get(j).unwrap(), expect);
        }
    }

    #[test]
    fn toeplitz_table_validation() {
        let bad = RationalMatrix::from_i64(&[&[1, 0], &[0, 1]]);
        assert!(matches!(ETable::new(bad), Err(Error::SingularMatrix(_))));
        let lower = RationalMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(ETable::new(lower).is_err());
    }

    #[test]
    fn spec_file_round_trip() {
        let sa = OneDepSpec::stationary_a(carries_a(3), true, 6).unwrap();
        let json = SpecFile::from_spec(&sa).to_json();
        let back = SpecFile::from_json(&json).unwrap().into_spec().unwrap();
        assert_eq!(back, sa);

        let t = ETable::toeplitz(&Sequence::new(vec![int(1), int(1), rat(1, 2), rat(1, 6)], false), 3)
            .unwrap();
        let st = OneDepSpec::table_e(t);
        let json = SpecFile::from_spec(&st).to_json();
        assert_eq!(SpecFile::from_json(&json).unwrap().into_spec().unwrap(), st);

        let ir = OneDepSpec::interval_rho(sa.interval_table().unwrap());
        let json = SpecFile::from_spec(&ir).to_json();
        assert_eq!(SpecFile::from_json(&json).unwrap().into_spec().unwrap(), ir);
    }
}
