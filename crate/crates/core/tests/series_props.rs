use leech24_core::series::{ratio, FormalSeries, HalfExp};
use leech24_core::Rat;
use proptest::prelude::*;

fn agree(a: &FormalSeries, b: &FormalSeries) -> bool {
    a.first_difference(b).is_none()
}

prop_compose! {
    fn series_strategy(max_len: usize)(
        min in -4i64..4,
        coeffs in prop::collection::vec((-30i64..30, 1i64..5), 1..max_len),
        extra in 0i64..6,
    ) -> FormalSeries {
        let trunc = HalfExp(min + coeffs.len() as i64 + extra);
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, &(n, d))| (HalfExp(min + i as i64), ratio(n, d)));
        FormalSeries::from_terms(terms, HalfExp(min), trunc).unwrap()
    }
}

prop_compose! {
    fn unit_strategy(max_len: usize)(
        min in -3i64..3,
        lead in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 5]),
        rest in prop::collection::vec(-20i64..20, 0..max_len),
    ) -> FormalSeries {
        let trunc = HalfExp(min + 1 + rest.len() as i64);
        let terms = std::iter::once((HalfExp(min), ratio(lead, 1)))
            .chain(rest.iter().enumerate().map(|(i, &c)| (HalfExp(min + 1 + i as i64), ratio(c, 1))));
        FormalSeries::from_terms(terms, HalfExp(min), trunc).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_commutes(a in series_strategy(12), b in series_strategy(12)) {
        prop_assert!(agree(&a.add(&b), &b.add(&a)));
        prop_assert_eq!(a.add(&b).trunc_order(), a.trunc_order().min(b.trunc_order()));
    }

    #[test]
    fn multiplication_commutes_and_associates(
        a in series_strategy(10), b in series_strategy(10), c in series_strategy(10)
    ) {
        prop_assert!(agree(&a.mul(&b), &b.mul(&a)));
        prop_assert!(agree(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
    }

    #[test]
    fn distributive(a in series_strategy(10), b in series_strategy(10), c in series_strategy(10)) {
        let lhs = a.mul(&b.add(&c));
        let rhs = a.mul(&b).add(&a.mul(&c));
        prop_assert!(agree(&lhs, &rhs));
        prop_assert_eq!(lhs.trunc_order(), rhs.trunc_order());
    }

    #[test]
    fn subtraction_is_inverse_of_addition(a in series_strategy(12), b in series_strategy(12)) {
        prop_assert!(agree(&a.add(&b).sub(&b), &a.truncate(b.trunc_order().min(a.trunc_order()))));
    }

    #[test]
    fn inversion_round_trip(a in unit_strategy(14)) {
        let inv = a.invert().unwrap();
        let prod = a.mul(&inv);
        let one = FormalSeries::one(prod.trunc_order());
        prop_assert!(agree(&prod, &one));
        prop_assert_eq!(prod.trunc_order(), HalfExp(a.trunc_order().twice() - a.min_exp().twice()));
        let back = inv.invert().unwrap();
        prop_assert!(agree(&back, &a));
    }

    #[test]
    fn division_undoes_multiplication(a in series_strategy(10), b in unit_strategy(10)) {
        let q = a.mul(&b).div(&b).unwrap();
        prop_assert!(agree(&q, &a.truncate(q.trunc_order())));
    }

    #[test]
    fn truncation_is_monotone(a in series_strategy(16), cut1 in 0i64..20, cut2 in 0i64..20) {
        let (lo, hi) = (cut1.min(cut2), cut1.max(cut2));
        let t_hi = a.truncate(HalfExp(a.min_exp().twice() + hi));
        let t_lo = a.truncate(HalfExp(a.min_exp().twice() + lo));
        prop_assert!(t_lo.trunc_order() <= t_hi.trunc_order());
        prop_assert!(agree(&t_hi.truncate(t_lo.trunc_order()), &t_lo));
        prop_assert!(t_hi.trunc_order() <= a.trunc_order());
    }

    #[test]
    fn shift_composes(a in series_strategy(10), s in -6i64..6, t in -6i64..6) {
        prop_assert_eq!(a.shift(HalfExp(s)).shift(HalfExp(t)), a.shift(HalfExp(s + t)));
    }

    #[test]
    fn flipping_half_powers_is_an_involution_and_a_ring_map(
        a in series_strategy(10), b in series_strategy(10)
    ) {
        prop_assert_eq!(a.flip_half_powers().flip_half_powers(), a.clone());
        prop_assert!(agree(&a.mul(&b).flip_half_powers(), &a.flip_half_powers().mul(&b.flip_half_powers())));
    }

    #[test]
    fn scaling_by_rationals(a in series_strategy(10), n in 1i64..9, d in 1i64..9) {
        let s: Rat = ratio(n, d);
        prop_assert!(agree(&a.scale(&s).scale(&s.recip()), &a));
    }
}
