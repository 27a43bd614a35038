//! Particle-hole involution, intersections and unions.

use std::collections::BTreeMap;

use super::kernel::particle_hole_kernel;
use super::spec::{IntervalTable, OneDepSpec, Sequence, SpecKind};
use crate::error::{Error, Result};
use crate::exact::rational::Rational;

/// Caller's assertion that the operands of a set operation are independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Independence {
    Asserted,
    NotAsserted,
}

/// Whole-region particle-hole involution of a stationary spec.
///
/// With `R(z) = sum a_i z^i` the involution is `R(z) -> 1/R(-z)`, which
/// swaps the run probabilities with the normalised e-sequence: an a-form
/// spec maps to the a-form whose run probabilities are the old `e`, and an
/// e-form spec maps to the e-form whose e-sequence is the old `a`.
pub fn particle_hole(spec: &OneDepSpec) -> Result<OneDepSpec> {
    let len = spec.horizon() + 1;
    match spec.kind() {
        SpecKind::StationaryA(a) => {
            let e = if a.tail_zero() {
                spec.normalized_e_sequence(len)?
            } else {
                spec.normalized_e_sequence(len.min(a.len()))?
            };
            OneDepSpec::stationary_a(e.values()[1..].to_vec(), false, spec.horizon())
        }
        SpecKind::StationaryE(e) => {
            let a = spec.a_sequence(len.min(e.known()))?;
            let vals: Vec<Rational> = (0..len.min(a.known()))
                .map(|i| a.get(i as i64))
                .collect::<Result<_>>()?;
            OneDepSpec::stationary_e_seq(Sequence::new(vals, a.tail_zero()), spec.horizon())
        }
        _ => {
            let all: Vec<usize> = (1..=spec.sites()).collect();
            particle_hole_region(spec, &all)
        }
    }
}

/// Particle-hole involution on an arbitrary region of sites, implemented on
/// the kernel by the complementation principle. The result is returned as
/// interval correlations read off the transformed kernel.
pub fn particle_hole_region(spec: &OneDepSpec, region: &[usize]) -> Result<OneDepSpec> {
    let sites = spec.sites();
    let k = spec.kernel()?.matrix(sites)?;
    let kt = particle_hole_kernel(&k, region)?;
    let mut values = BTreeMap::new();
    for x in 1..=sites {
        for len in 1..=sites + 1 - x {
            let idx: Vec<usize> = (x - 1..x - 1 + len).collect();
            values.insert((x, len), kt.principal(&idx).det()?);
        }
    }
    Ok(OneDepSpec::interval_rho(IntervalTable::new(
        spec.horizon(),
        values,
    )?))
}

/// Intersection of independent processes: correlations multiply.
pub fn intersect(specs: &[OneDepSpec], independence: Independence) -> Result<OneDepSpec> {
    if independence != Independence::Asserted {
        return Err(Error::IndependenceNotAsserted);
    }
    let first = specs
        .first()
        .ok_or_else(|| Error::InvalidSpec("intersection of no processes".into()))?;
    let n = first.horizon();
    if let Some(s) = specs.iter().find(|s| s.horizon() != n) {
        return Err(Error::Dimension(format!(
            "mismatched horizons {n} and {}",
            s.horizon()
        )));
    }
    if specs.iter().all(OneDepSpec::is_stationary) {
        let seqs = specs
            .iter()
            .map(|s| s.a_sequence(n + 1))
            .collect::<Result<Vec<_>>>()?;
        let a: Vec<Rational> = (1..=n as i64)
            .map(|i| {
                seqs.iter()
                    .try_fold(Rational::from_integer(1.into()), |acc, s| Ok(acc * s.get(i)?))
            })
            .collect::<Result<_>>()?;
        // every a_i beyond the horizon is zero as soon as one factor's tail is
        let tail_zero = seqs.iter().any(|s| s.tail_zero() && s.len() <= n + 1);
        return OneDepSpec::stationary_a(a, tail_zero, n);
    }
    let tables = specs
        .iter()
        .map(OneDepSpec::interval_table)
        .collect::<Result<Vec<_>>>()?;
    let mut values = BTreeMap::new();
    for (&key, v) in tables[0].entries() {
        let mut acc = v.clone();
        for t in &tables[1..] {
            acc *= t.get(key.0, key.1)?;
        }
        values.insert(key, acc);
    }
    Ok(OneDepSpec::interval_rho(IntervalTable::new(n, values)?))
}

/// Union of independent processes, as the particle-hole image of the
/// intersection of the particle-hole images.
pub fn union(specs: &[OneDepSpec], independence: Independence) -> Result<OneDepSpec> {
    if independence != Independence::Asserted {
        return Err(Error::IndependenceNotAsserted);
    }
    let flipped = specs
        .iter()
        .map(particle_hole)
        .collect::<Result<Vec<_>>>()?;
    particle_hole(&intersect(&flipped, independence)?)
}
