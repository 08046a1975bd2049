mod common;

use common::{oracle_count, random_interval, random_poly};
use leech24_core::series::{rat, ratio};
use leech24_core::sturm::{count_real_roots, count_real_roots_strict, sturm_chain, RatPoly};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn agrees_with_descartes_bisection_on_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut mismatches = Vec::new();
    for i in 0..300 {
        let p = random_poly(&mut rng, 40);
        let (lo, hi) = random_interval(&mut rng);
        let sturm = count_real_roots(&p, &lo, &hi).unwrap();
        let oracle = oracle_count(&p, &lo, &hi);
        if sturm != oracle {
            mismatches.push((i, sturm, oracle));
        }
    }
    assert!(mismatches.is_empty(), "mismatches: {mismatches:?}");
}

#[test]
fn chebyshev_thirty_has_thirty_roots_in_the_open_square() {
    // T₃₀ via T_{n+1} = 2x T_n − T_{n−1}; all roots lie in (−1, 1)
    let x2 = RatPoly::from_ints(&[0, 2]);
    let (mut a, mut b) = (RatPoly::from_ints(&[1]), RatPoly::from_ints(&[0, 1]));
    for _ in 1..30 {
        let c = x2.mul(&b).add(&a.neg());
        a = b;
        b = c;
    }
    assert_eq!(b.degree(), Some(30));
    assert_eq!(count_real_roots(&b, &rat(-1), &rat(1)).unwrap(), 30);
    assert_eq!(count_real_roots(&b, &rat(0), &rat(1)).unwrap(), 15);
    assert_eq!(oracle_count(&b, &rat(0), &rat(1)), 15);
}

#[test]
fn repeated_and_endpoint_roots() {
    // (x − 1/2)³ (x − 1) (x² + 1)
    let lin = |r: i64, d: i64| RatPoly::new(vec![-ratio(r, d), rat(1)]);
    let p = lin(1, 2).mul(&lin(1, 2)).mul(&lin(1, 2)).mul(&lin(1, 1)).mul(&RatPoly::from_ints(&[1, 0, 1]));
    assert_eq!(count_real_roots(&p, &rat(0), &rat(2)).unwrap(), 2);
    assert_eq!(count_real_roots(&p, &rat(0), &rat(1)).unwrap(), 1);
    assert!(count_real_roots_strict(&p, &rat(0), &rat(1)).is_err());
    assert_eq!(oracle_count(&p, &rat(0), &rat(1)), 1);
}

#[test]
fn chain_ends_in_a_nonzero_polynomial() {
    let p = RatPoly::from_ints(&[6, -5, 1]);
    let chain = sturm_chain(&p);
    assert!(!chain.last().unwrap().is_zero());
    assert_eq!(chain[0], p);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn products_of_distinct_linear_factors(roots in prop::collection::btree_set(-40i64..40, 1..12)) {
        let mut p = RatPoly::from_ints(&[1]);
        for r in &roots {
            p = p.mul(&RatPoly::new(vec![ratio(-r, 4), rat(1)]));
        }
        // interval (−41/4, 41/4) contains all roots, (0, 41/4) the positive ones
        let all = count_real_roots(&p, &ratio(-41, 4), &ratio(41, 4)).unwrap();
        prop_assert_eq!(all, roots.len());
        let positive = roots.iter().filter(|r| **r > 0).count();
        prop_assert_eq!(count_real_roots(&p, &rat(0), &ratio(41, 4)).unwrap(), positive);
    }

    #[test]
    fn counts_are_additive_over_a_split(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&mut rng, 20);
        let (lo, hi) = random_interval(&mut rng);
        let mid = (&lo + &hi) / rat(2);
        let whole = count_real_roots(&p, &lo, &hi).unwrap();
        let at_mid = usize::from(p.eval(&mid) == rat(0));
        let parts = count_real_roots(&p, &lo, &mid).unwrap() + count_real_roots(&p, &mid, &hi).unwrap();
        prop_assert_eq!(whole, parts + at_mid);
    }
}
