//! Binary patterns on the positions `1..n-1` and the two subset views of them.
//!
//! The run-probability (a-form) determinant is indexed by the *zeros* of a
//! pattern while the e-form determinant is indexed by its *occupied* sites.
//! `Zeros` and `Support` keep those two subsets apart at the type level.

use std::fmt;

use crate::error::{Error, Result};

/// A binary string `t_1 .. t_{n-1}` for a process on `n - 1` sites.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    bits: Vec<bool>,
}

/// Positions (1-based) of the zeros of a pattern, with its horizon `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Zeros {
    pub horizon: usize,
    pub positions: Vec<usize>,
}

/// Positions (1-based) of the ones of a pattern, with its horizon `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Support {
    pub horizon: usize,
    pub positions: Vec<usize>,
}

impl Pattern {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad pattern character {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    /// Pattern on horizon `n` whose ones are exactly `ones`.
    pub fn from_ones(horizon: usize, ones: &[usize]) -> Result<Self> {
        let len = horizon.saturating_sub(1);
        let mut bits = vec![false; len];
        for &p in ones {
            if p == 0 || p > len {
                return Err(Error::Parse(format!(
                    "position {p} outside 1..{len} for horizon {horizon}"
                )));
            }
            bits[p - 1] = true;
        }
        Ok(Self { bits })
    }

    pub fn from_zeros(z: &Zeros) -> Result<Self> {
        let len = z.horizon.saturating_sub(1);
        let mut bits = vec![true; len];
        for &p in &z.positions {
            if p == 0 || p > len {
                return Err(Error::Parse(format!("zero position {p} outside 1..{len}")));
            }
            bits[p - 1] = false;
        }
        Ok(Self { bits })
    }

    pub fn from_support(s: &Support) -> Result<Self> {
        Self::from_ones(s.horizon, &s.positions)
    }

    /// Pattern of horizon `n` from the low `n - 1` bits of `code`
    /// (bit `i - 1` is `t_i`).
    pub fn from_code(horizon: usize, code: u64) -> Self {
        let len = horizon.saturating_sub(1);
        Self {
            bits: (0..len).map(|i| code >> i & 1 == 1).collect(),
        }
    }

    pub fn code(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    /// All `2^(n-1)` patterns of horizon `n`, in code order.
    pub fn all(horizon: usize) -> impl Iterator<Item = Pattern> {
        let len = horizon.saturating_sub(1);
        (0..1u64 << len).map(move |c| Self::from_code(horizon, c))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.bits.len() + 1
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn zeros_of(&self) -> Zeros {
        Zeros {
            horizon: self.horizon(),
            positions: self.positions(false),
        }
    }

    pub fn support_of(&self) -> Support {
        Support {
            horizon: self.horizon(),
            positions: self.positions(true),
        }
    }

    fn positions(&self, value: bool) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == value)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn reversed(&self) -> Self {
        Self {
            bits: self.bits.iter().rev().copied().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Splits a sorted set of positions into maximal runs of consecutive integers.
pub fn blocks(set: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for p in sorted {
        match out.last_mut() {
            Some(b) if *b.last().unwrap() + 1 == p => b.push(p),
            _ => out.push(vec![p]),
        }
    }
    out
}
