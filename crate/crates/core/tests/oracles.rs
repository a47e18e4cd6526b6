use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trinomial_core::arith::{gcd, prime_power};
use trinomial_core::counter::{
    broadcast, divisor_indicator, folded_exhaustive, full_direct, indicator_power_sum,
    monomial_solutions, CurveFamily,
};
use trinomial_core::laws::{verify_family, Depth};
use trinomial_core::{ExponentMatrix, FieldCtx};

const SMALL_Q: [u64; 12] = [3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 25, 27];

fn prime_powers_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&q| prime_power(q).is_some()).collect()
}

fn field(q: u64) -> Arc<FieldCtx> {
    Arc::new(FieldCtx::from_q(q).unwrap())
}

#[test]
fn indicator_power_sums() {
    for q in prime_powers_upto(64) {
        let m = q as i64 - 1;
        for ell in (1..=m).filter(|l| m % l == 0) {
            for r in 1..=2 {
                let direct: i64 = (0..m).map(|i| divisor_indicator(ell, i).pow(r)).sum();
                assert_eq!(
                    direct,
                    indicator_power_sum(ell, q, r),
                    "q = {q}, ell = {ell}, r = {r}"
                );
            }
        }
    }
}

fn direct_monomial_count(f: &FieldCtx, a1: i64, a2: i64, i: i64) -> u64 {
    let c = f.exp(i);
    let xs: Vec<_> = f.nonzero_elements().collect();
    let px: Vec<_> = xs.iter().map(|&x| f.pow(x, a1).unwrap()).collect();
    let py: Vec<_> = xs.iter().map(|&y| f.pow(y, a2).unwrap()).collect();
    let mut n = 0;
    for &u in &px {
        for &v in &py {
            if f.mul(c, f.mul(u, v)) == trinomial_core::FieldElement::ONE {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn monomial_solution_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for q in prime_powers_upto(64) {
        let f = field(q);
        for _ in 0..200 {
            let a1 = rng.random_range(-20..=20);
            let a2 = rng.random_range(-20..=20);
            let i = rng.random_range(0..q as i64 - 1);
            assert_eq!(
                direct_monomial_count(&f, a1, a2, i),
                monomial_solutions(a1, a2, i, q),
                "q = {q}, a = ({a1}, {a2}), i = {i}"
            );
        }
    }
}

fn q_strategy() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![
        2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64, 81, 121, 125,
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(q in q_strategy(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = FieldCtx::from_q(q).unwrap();
        let (a, b, c) = (f.from_code(a % q).unwrap(), f.from_code(b % q).unwrap(), f.from_code(c % q).unwrap());
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), trinomial_core::FieldElement::ZERO);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), trinomial_core::FieldElement::ONE);
            prop_assert_eq!(f.exp(f.dlog(a).unwrap() as i64), a);
            prop_assert_eq!(f.pow(a, q as i64 - 1).unwrap(), trinomial_core::FieldElement::ONE);
        }
    }

    #[test]
    fn fold_matches_direct(q in prop::sample::select(vec![3u64, 4, 5, 7, 8, 9, 11, 13, 16, 17]), a in prop::array::uniform6(-3i64..6)) {
        let Ok(e) = ExponentMatrix::from_row_major(a) else { return Ok(()) };
        let fam = CurveFamily::new(e, field(q)).unwrap();
        prop_assert_eq!(broadcast(&fam, &folded_exhaustive(&fam)), full_direct(&fam));
        let report = verify_family(&fam, Depth::Full).unwrap();
        prop_assert!(report.all_pass(), "{}", report.summary_table());
    }

    #[test]
    fn generator_independence(q in prop::sample::select(vec![5u64, 7, 9, 13, 16, 25, 27, 49]), a in prop::array::uniform6(0i64..5), t in 1i64..200) {
        let Ok(e) = ExponentMatrix::from_row_major(a) else { return Ok(()) };
        let base = field(q);
        let m = q as i64 - 1;
        let t = (t..).find(|t| gcd(*t, m) == 1).unwrap();
        let other = base.exp(t).code() as u64;
        let (p, n) = prime_power(q).unwrap();
        let alt = Arc::new(FieldCtx::build_with_generator(p, n, other).unwrap());
        let f1 = CurveFamily::new(e, base).unwrap();
        let f2 = CurveFamily::new(e, alt).unwrap();
        let mut v1: Vec<i64> = full_direct(&f1).n_values().to_vec();
        let mut v2: Vec<i64> = full_direct(&f2).n_values().to_vec();
        v1.sort_unstable();
        v2.sort_unstable();
        prop_assert_eq!(v1, v2);
        prop_assert!(verify_family(&f2, Depth::Full).unwrap().all_pass());
    }
}

#[test]
fn constants_battery_is_consistent() {
    for q in SMALL_Q {
        let f = field(q);
        for code in 0..5i64.pow(6) {
            let mut a = [0i64; 6];
            let mut c = code;
            for x in a.iter_mut() {
                *x = c % 5;
                c /= 5;
            }
            let Ok(e) = ExponentMatrix::from_row_major(a) else {
                continue;
            };
            let fam = CurveFamily::new(e, f.clone()).unwrap();
            let c = fam.constants();
            assert_eq!(fam.coker().order(), c.k);
            assert!(c.twice_g_tilde >= 0, "{a:?} over F_{q}");
        }
    }
}
