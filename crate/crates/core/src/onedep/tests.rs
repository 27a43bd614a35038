use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::catalog::{build, ProcessName};
use crate::error::Error;
use crate::exact::rational::{self, big, int, rat, Rational};
use crate::exact::RationalMatrix;

fn carries(b: u32, n: usize) -> OneDepSpec {
    build(&ProcessName::CarriesBaseB(b), n).unwrap()
}

fn uniform(n: usize) -> OneDepSpec {
    build(&ProcessName::UniformDescents, n).unwrap()
}

fn inv_fact(m: u64) -> Rational {
    big(rational::factorial(m)).recip()
}

#[test]
fn binary_carries_at_one_and_five() {
    let s = carries(2, 8);
    let p = Pattern::from_ones(8, &[1, 5]).unwrap();
    assert_eq!(pattern_probability(&s, &p).unwrap(), rat(9, 256));
    let a_form = OneDepSpec::stationary_a(
        s.a_sequence(9).unwrap().values()[1..].to_vec(),
        false,
        8,
    )
    .unwrap();
    assert_eq!(probability_from_zeros(&a_form, &p.zeros_of()).unwrap(), rat(9, 256));
    let k = s.kernel().unwrap().matrix(7).unwrap();
    assert_eq!(probability_from_kernel(&k, &p).unwrap(), rat(9, 256));
}

#[test]
fn decimal_carries_at_one_and_five() {
    let s = carries(10, 8);
    let p = Pattern::from_ones(8, &[1, 5]).unwrap();
    assert_eq!(
        pattern_probability(&s, &p).unwrap(),
        rat(1_042_470, 100_000_000)
    );
}

#[test]
fn ternary_no_carries() {
    let s = carries(3, 4);
    let p = Pattern::parse("000").unwrap();
    assert_eq!(pattern_probability(&s, &p).unwrap(), rat(5, 27));
    let (a2, a3, a4) = (rat(1, 3), rat(1, 27), int(0));
    let poly = int(1) - int(3) * &a2 + &a2 * &a2 + int(2) * &a3 - a4;
    assert_eq!(poly, rat(5, 27));
}

#[test]
fn all_ones_is_a_n() {
    for spec in [carries(3, 5), carries(2, 4), uniform(6)] {
        let n = spec.horizon();
        let ones: Vec<usize> = (1..n).collect();
        let p = Pattern::from_ones(n, &ones).unwrap();
        let a = spec.a_sequence(n + 1).unwrap();
        assert_eq!(pattern_probability(&spec, &p).unwrap(), a.get(n as i64).unwrap());
    }
}

#[test]
fn validation_reports() {
    let b3 = carries(3, 6);
    let report = validate_spec(&b3, 6).unwrap();
    assert!(report.is_valid());
    assert_eq!(report.patterns_checked, (1..=6).map(|n| 1usize << (n - 1)).sum::<usize>());

    let all_ones = OneDepSpec::stationary_a(vec![int(1); 8], false, 6).unwrap();
    assert!(validate_spec(&all_ones, 6).unwrap().is_valid());
    let p = Pattern::from_ones(6, &[1, 2, 3, 4, 5]).unwrap();
    assert_eq!(pattern_probability(&all_ones, &p).unwrap(), int(1));

    let bad = OneDepSpec::stationary_a(vec![int(1), int(0), int(1)], true, 3).unwrap();
    let report = validate_spec(&bad, 3).unwrap();
    assert!(!report.is_valid());
    // P(01) = det[[a_1, a_3], [a_0, a_2]] = -1
    let p01 = Pattern::parse("01").unwrap();
    assert!(report.negative.iter().any(|(p, v)| *p == p01 && *v == int(-1)));
    assert!(matches!(
        pattern_probability(&bad, &p01),
        Err(Error::NegativeProbability { .. })
    ));
}

#[test]
fn rejects_wrong_pattern_length() {
    let s = carries(3, 5);
    let p = Pattern::parse("00").unwrap();
    assert!(matches!(pattern_probability(&s, &p), Err(Error::Dimension(_))));
}

#[test]
fn block_correlations() {
    let s = carries(10, 13);
    assert_eq!(correlation(&s, &[]).unwrap(), int(1));
    let c = |k: i64| big(rational::binomial(10, k)) / rational::powi(&int(10), k);
    let expect = c(3) * c(4) * c(2);
    assert_eq!(correlation(&s, &[2, 3, 5, 6, 7, 11]).unwrap(), expect);

    let u = uniform(10);
    let expect = inv_fact(3) * inv_fact(4) * inv_fact(2);
    assert_eq!(correlation(&u, &[1, 2, 4, 5, 6, 9]).unwrap(), expect);
    assert!(correlation(&u, &[10]).is_err());
}

#[test]
fn ternary_carries_kernel() {
    let s = carries(3, 13);
    let k = kernel_stationary(&s, 11).unwrap();
    let want = [
        (-1, rat(1, 3)),
        (0, rat(1, 3)),
        (1, rat(2, 9)),
        (2, rat(1, 9)),
        (3, rat(1, 27)),
        (4, int(0)),
        (5, rat(-1, 81)),
        (11, rat(1, 2187)),
    ];
    for (m, v) in want {
        assert_eq!(k.k(m).unwrap(), v, "k({m})");
    }
    assert_eq!(k.k(-2).unwrap(), int(0));
    assert!(matches!(k.k(12), Err(Error::Truncated { .. })));
}

#[test]
fn binary_carries_kernel() {
    let s = carries(2, 12);
    let k = kernel_stationary(&s, 9).unwrap();
    for m in -1..=9 {
        assert_eq!(k.k(m).unwrap(), rational::powi(&int(2), -(m + 2)));
    }
}

#[test]
fn uniform_kernel_matches_bernoulli_display_up_to_conjugation() {
    let k = kernel_stationary(&uniform(8), 5).unwrap();
    // the canonical form is 1/(1 - e^{-z}); conjugating by -1 gives 1/(1 - e^z)
    assert_eq!(k.k(-1).unwrap(), int(1));
    assert_eq!(k.k(1).unwrap(), rat(1, 12));
    let c = k.conjugated(&int(-1));
    assert_eq!(c.k(0).unwrap(), rat(1, 2));
    assert_eq!(c.k(1).unwrap(), rat(-1, 12));
    assert_eq!(c.k(2).unwrap(), int(0));
    assert_eq!(c.k(3).unwrap(), rat(1, 720));
    let run = kernel_run_form(&uniform(8), 5).unwrap();
    assert_eq!(run, c);
}

#[test]
fn normal_form_entries() {
    let s = carries(3, 8);
    let rho = s.interval_table().unwrap();
    assert_eq!(kernel_general(&rho, 3, 2).unwrap(), int(-1));
    assert_eq!(kernel_general(&rho, 5, 2).unwrap(), int(0));
    let r1 = correlation(&s, &[3]).unwrap();
    assert_eq!(kernel_general(&rho, 3, 3).unwrap(), r1);
    let r2 = correlation(&s, &[3, 4]).unwrap();
    assert_eq!(kernel_general(&rho, 3, 4).unwrap(), &r2 - &r1 * &r1);
}

#[test]
fn normal_form_round_trip_is_run_form() {
    for spec in [carries(3, 8), uniform(8), carries(5, 7)] {
        let sites = spec.sites();
        let general = kernel_general_matrix(&spec.interval_table().unwrap()).unwrap();
        let run = kernel_run_form(&spec, sites as i64).unwrap().matrix(sites).unwrap();
        assert_eq!(general, run);
        // canonical k(-1) = 1/e(1); conjugating by -1/e(1) moves it to -1
        let k = kernel_stationary(&spec, sites as i64).unwrap();
        let c = -k.k(-1).unwrap();
        let canon = k.conjugated(&c).matrix(sites).unwrap();
        assert_eq!(general, canon);
    }
}

#[test]
fn missing_interval_is_reported() {
    let mut values = std::collections::BTreeMap::new();
    values.insert((1, 1), rat(1, 2));
    let t = IntervalTable::new(3, values).unwrap();
    assert!(matches!(kernel_general(&t, 1, 2), Err(Error::IncompleteSpec(_))));
}

#[test]
fn e_table_kernel_matches_stationary_block() {
    let e: Vec<Rational> = (0..=8).map(|j| big(rational::binomial(j + 2, 2))).collect();
    let table = ETable::toeplitz(&Sequence::new(e, false), 7).unwrap();
    let (k, h) = kernel_from_e(&table).unwrap();
    assert_eq!(h, rational::powi(&int(3), -7));
    let stat = kernel_stationary(&carries(3, 7), 5).unwrap().matrix(6).unwrap();
    assert_eq!(k, stat);
}

#[test]
fn bidiagonal_e_table_is_all_ones_process() {
    let n = 5;
    let m = RationalMatrix::from_fn(n + 1, n + 1, |i, j| {
        if j == i || j == i + 1 {
            int(1)
        } else {
            int(0)
        }
    });
    let table = ETable::new(m).unwrap();
    let (k, h) = kernel_from_e(&table).unwrap();
    assert_eq!(h, int(1));
    let expect = RationalMatrix::from_fn(n - 1, n - 1, |x, y| {
        if x == y || x == y + 1 {
            int(1)
        } else {
            int(0)
        }
    });
    assert_eq!(k, expect);
    let spec = OneDepSpec::table_e(table);
    assert_eq!(correlation(&spec, &[1, 2, 4]).unwrap(), int(1));
    let p = Pattern::from_ones(n, &[1, 2, 3, 4]).unwrap();
    assert_eq!(pattern_probability(&spec, &p).unwrap(), int(1));
}

#[test]
fn singular_e_table_is_rejected() {
    let m = RationalMatrix::from_fn(3, 3, |i, j| {
        if i == j {
            int(1)
        } else if j == i + 1 && i == 0 {
            int(0)
        } else if j > i {
            int(1)
        } else {
            int(0)
        }
    });
    assert!(matches!(ETable::new(m), Err(Error::SingularMatrix(_))));
}

#[test]
fn uniform_descents_are_self_dual() {
    let u = uniform(7);
    let d = particle_hole(&u).unwrap();
    let a = u.a_sequence(8).unwrap();
    let b = d.a_sequence(8).unwrap();
    for i in 0..8 {
        assert_eq!(a.get(i).unwrap(), b.get(i).unwrap());
    }
}

#[test]
fn complement_of_carries_runs() {
    let bb = 4u32;
    let s = carries(bb, 7);
    let d = particle_hole(&s).unwrap();
    let a = d.a_sequence(8).unwrap();
    for i in 0..8i64 {
        let expect = big(rational::binomial(bb as i64 + i - 1, i)) / rational::powi(&int(bb as i64), i);
        assert_eq!(a.get(i).unwrap(), expect);
    }
    for p in Pattern::all(7) {
        assert_eq!(
            pattern_probability(&d, &p).unwrap(),
            pattern_probability(&s, &p.complement()).unwrap()
        );
    }
    let back = particle_hole(&d).unwrap();
    let orig = s.a_sequence(8).unwrap();
    let round = back.a_sequence(8).unwrap();
    for i in 0..8 {
        assert_eq!(orig.get(i).unwrap(), round.get(i).unwrap());
    }
}

#[test]
fn region_particle_hole_flips_chosen_sites() {
    let s = carries(3, 6);
    let region = [2usize, 4];
    let t = particle_hole_region(&s, &region).unwrap();
    for p in Pattern::all(6) {
        let mut bits = p.bits().to_vec();
        for &r in &region {
            bits[r - 1] = !bits[r - 1];
        }
        assert_eq!(
            pattern_probability(&t, &p).unwrap(),
            pattern_probability(&s, &Pattern::new(bits)).unwrap()
        );
    }
    let k = s.kernel().unwrap().matrix(5).unwrap();
    let twice = particle_hole_kernel(&particle_hole_kernel(&k, &region).unwrap(), &region).unwrap();
    assert_eq!(twice, k);
}

#[test]
fn intersections_of_uniform_descents() {
    let n = 7;
    for r in 1..=3u32 {
        let specs = vec![uniform(n); r as usize];
        let cap = intersect(&specs, Independence::Asserted).unwrap();
        for m in 1..n {
            let set: Vec<usize> = (1..=m).collect();
            let expect = rational::pow(&inv_fact(m as u64 + 1), r);
            assert_eq!(correlation(&cap, &set).unwrap(), expect);
        }
    }
}

#[test]
fn union_of_uniform_descents_is_binomial_poset() {
    let n = 7;
    let cup = union(&[uniform(n), uniform(n)], Independence::Asserted).unwrap();
    let poset = build(&ProcessName::BinomialPosetUnion { q: int(1), r: 2 }, n).unwrap();
    for p in Pattern::all(n) {
        assert_eq!(
            pattern_probability(&cup, &p).unwrap(),
            pattern_probability(&poset, &p).unwrap()
        );
    }
    let a = cup.kernel().unwrap().matrix(n - 1).unwrap();
    let b = poset.kernel().unwrap().matrix(n - 1).unwrap();
    assert_eq!(a, b);
}

#[test]
fn empty_process_absorbs() {
    let n = 6;
    let empty = OneDepSpec::stationary_a(vec![int(1)], true, n).unwrap();
    let cap = intersect(&[carries(3, n), empty], Independence::Asserted).unwrap();
    let zeros = Pattern::parse("00000").unwrap();
    assert_eq!(pattern_probability(&cap, &zeros).unwrap(), int(1));
}

#[test]
fn set_operations_need_independence_and_matching_horizons() {
    assert!(matches!(
        intersect(&[uniform(5), uniform(5)], Independence::NotAsserted),
        Err(Error::IndependenceNotAsserted)
    ));
    assert!(matches!(
        union(&[uniform(5), uniform(5)], Independence::NotAsserted),
        Err(Error::IndependenceNotAsserted)
    ));
    assert!(matches!(
        intersect(&[uniform(5), uniform(6)], Independence::Asserted),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn non_stationary_intersection_uses_interval_tables() {
    let b = build(&ProcessName::TypeBDescents(4), 5).unwrap();
    let cap = intersect(&[b.clone(), uniform(5)], Independence::Asserted).unwrap();
    for set in [vec![1], vec![2, 3], vec![1, 2, 3, 4], vec![1, 3]] {
        let expect = correlation(&b, &set).unwrap() * correlation(&uniform(5), &set).unwrap();
        assert_eq!(correlation(&cap, &set).unwrap(), expect);
    }
}

#[test]
fn kernel_csv_layout() {
    let k = RationalMatrix::from_rows(vec![vec![rat(1, 2), int(0)], vec![int(-1), rat(1, 3)]]).unwrap();
    let csv = kernel::kernel_csv(&k);
    assert_eq!(csv, "row,col,value\n1,1,1/2\n1,2,0\n2,1,-1\n2,2,1/3\n");
}

fn model_strategy() -> impl Strategy<Value = ProcessName> {
    prop_oneof![
        (2u32..7).prop_map(ProcessName::CarriesBaseB),
        Just(ProcessName::UniformDescents),
        Just(ProcessName::AlternatingDescents),
        (1i64..8, 1i64..8).prop_map(|(a, b)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            ProcessName::MallowsDescents(rat(lo, hi))
        }),
        prop::collection::vec(0i64..5, 2..4).prop_filter_map("nonzero", |w| {
            let total: i64 = w.iter().sum();
            (total > 0).then(|| ProcessName::IidTrials(w.iter().map(|&x| rat(x, total)).collect()))
        }),
        (1usize..5).prop_map(ProcessName::GenericPoints),
    ]
}

fn subsets(sites: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << sites).map(move |mask| (1..=sites).filter(|&i| mask >> (i - 1) & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn probabilities_sum_to_one(model in model_strategy(), n in 1usize..8) {
        let s = build(&model, n).unwrap();
        let total: Rational = distribution(&s).unwrap().into_iter().map(|(_, v)| v).sum();
        prop_assert!(total.is_one());
    }

    #[test]
    fn separated_sets_are_independent(model in model_strategy(), n in 2usize..9) {
        let s = build(&model, n).unwrap();
        let sites = s.sites();
        for a in subsets(sites) {
            for b in subsets(sites) {
                let far = a.iter().all(|x| b.iter().all(|y| x.abs_diff(*y) >= 2));
                if a.is_empty() || b.is_empty() || !far {
                    continue;
                }
                let mut u = a.clone();
                u.extend(&b);
                u.sort_unstable();
                let lhs = correlation(&s, &u).unwrap();
                let rhs = correlation(&s, &a).unwrap() * correlation(&s, &b).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn kernel_minors_are_correlations(model in model_strategy(), n in 2usize..9) {
        let s = build(&model, n).unwrap();
        let k = s.kernel().unwrap();
        for a in subsets(s.sites()).filter(|a| a.len() <= 4) {
            prop_assert_eq!(k.minor(&a).unwrap(), correlation(&s, &a).unwrap());
        }
    }

    #[test]
    fn time_reversal(model in model_strategy(), n in 2usize..8) {
        let s = build(&model, n).unwrap();
        for p in Pattern::all(n) {
            prop_assert_eq!(
                pattern_probability(&s, &p).unwrap(),
                pattern_probability(&s, &p.reversed()).unwrap()
            );
        }
    }

    #[test]
    fn conjugation_leaves_minors(model in model_strategy(), n in 2usize..7) {
        let s = build(&model, n).unwrap();
        let sites = s.sites();
        let k = kernel_stationary(&s, sites as i64).unwrap();
        let m = k.matrix(sites).unwrap();
        let c = k.conjugated(&int(2)).matrix(sites).unwrap();
        for a in subsets(sites) {
            let idx: Vec<usize> = a.iter().map(|x| x - 1).collect();
            prop_assert_eq!(m.principal(&idx).det().unwrap(), c.principal(&idx).det().unwrap());
        }
    }

    #[test]
    fn e_and_a_forms_agree(model in model_strategy(), n in 1usize..8) {
        let s = build(&model, n).unwrap();
        let a = s.a_sequence(n + 1).unwrap();
        let a_form = OneDepSpec::stationary_a(a.values()[1..].to_vec(), false, n).unwrap();
        for p in Pattern::all(n) {
            prop_assert_eq!(
                probability_from_zeros(&a_form, &p.zeros_of()).unwrap(),
                pattern_probability(&s, &p).unwrap()
            );
        }
        prop_assert!(!Rational::zero().is_one());
    }
}
