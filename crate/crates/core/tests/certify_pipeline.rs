use leech24_core::certify::{
    certify_branch, certify_fhat_gap, certify_lemma_with, lemma_branches, pi_lower, pi_upper, reduce_piece, CertInputs,
    LemmaId, Piece, Sense,
};
use leech24_core::series::{pow_rat, rat, ratio, HalfExp};
use leech24_core::Rat;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn rat_of(x: f64) -> Rat {
    Rat::from_float(x).unwrap()
}

fn pieces() -> Vec<Piece> {
    vec![
        Piece::whole_range(),
        Piece::bounded(&rat(1), &ratio(9, 8)),
        Piece::bounded(&ratio(9, 8), &ratio(5, 4)),
        Piece::unbounded(&ratio(5, 4)),
    ]
}

/// The reduced polynomial never sits on the desired side of the retained
/// terms: it is a lower bound (positive sense) or an upper bound (negative
/// sense) of the truncated expression for every `π` in the rational bracket.
#[test]
fn reductions_are_conservative() {
    let inputs = CertInputs::build(HalfExp::q(20)).unwrap();
    let n0 = inputs.order.twice() as u64;
    let pis = [pi_lower(), pi_upper(), (pi_lower() + pi_upper()) / rat(2)];
    let mut checked = 0;
    for id in LemmaId::ALL {
        for (kind, expr, sense) in lemma_branches(id, &inputs) {
            let expr = expr.truncate(inputs.order).unwrap();
            for piece in pieces() {
                let red = reduce_piece(&expr, &piece, sense, n0).unwrap();
                let hi = piece.t_end.clone().unwrap_or_else(|| rat(6));
                for k in 0..=12 {
                    let t = &piece.t_lo + (&hi - &piece.t_lo) * ratio(k, 12);
                    let u = rat_of((-std::f64::consts::PI * t.to_f64().unwrap()).exp());
                    if !piece.contains(&t, &u) {
                        continue;
                    }
                    let bound = red.eval(&u);
                    let tail = &red.tail * pow_rat(&u, 12);
                    for pi in &pis {
                        let value = expr.eval_truncated(&t, &u, pi);
                        match sense {
                            Sense::ShouldBePositive => assert!(
                                &bound + &tail <= value,
                                "{id} {} at t = {t}: bound above the expression",
                                kind.label()
                            ),
                            Sense::ShouldBeNegative => assert!(
                                &bound - &tail >= value,
                                "{id} {} at t = {t}: bound below the expression",
                                kind.label()
                            ),
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 200, "only {checked} sample points were inside their pieces");
}

#[test]
fn low_order_certificate_fails_with_a_recorded_transcript() {
    let inputs = CertInputs::build(HalfExp::q(20)).unwrap();
    let r = certify_lemma_with(LemmaId::A3, &inputs).unwrap();
    assert!(!r.ok);
    let branch = &r.branches[0];
    assert!(!branch.ok);
    assert!(!branch.refined.is_empty());
    assert!(branch.pieces.iter().any(|p| !p.ok));
    let json = r.to_json();
    assert_eq!(json["status"], "failed");
    assert_eq!(json["branches"][0]["pieces"].as_array().unwrap().len(), branch.pieces.len());
}

#[test]
fn a1_certifies_at_a_moderate_order() {
    let inputs = CertInputs::build(HalfExp::q(30)).unwrap();
    let r = certify_lemma_with(LemmaId::A1, &inputs).unwrap();
    assert!(r.ok, "{r}");
    for b in &r.branches {
        assert!(b.pieces.iter().all(|p| p.ok && p.root_count == 0));
        // the pieces cover [1, ∞) without gaps
        let mut labels: Vec<&str> = b.pieces.iter().map(|p| p.t_interval.as_str()).collect();
        labels.sort();
        assert!(labels.iter().any(|l| l.ends_with("inf)")));
    }
}

#[test]
fn fhat_gap_is_certified() {
    let r = certify_fhat_gap().unwrap();
    assert!(r.ok);
    assert_eq!(r.branches[0].pieces[0].root_count, 0);
}

#[test]
fn branch_sense_flip_breaks_the_certificate() {
    let inputs = CertInputs::build(HalfExp::q(20)).unwrap();
    let (kind, expr, sense) = lemma_branches(LemmaId::A1, &inputs).remove(0);
    let flipped = match sense {
        Sense::ShouldBePositive => Sense::ShouldBeNegative,
        Sense::ShouldBeNegative => Sense::ShouldBePositive,
    };
    let r = certify_branch(&expr, kind.label(), flipped, inputs.order).unwrap();
    assert!(!r.ok);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exp_bounds_bracket_the_float(num in 1i64..200, den in 1i64..40) {
        let y = ratio(num, den);
        let (lo, hi) = leech24_core::certify::exp_neg_bounds(&y);
        let e = (-(num as f64) / den as f64).exp();
        prop_assert!(lo <= hi);
        prop_assert!(lo.to_f64().unwrap() <= e * (1.0 + 1e-12));
        prop_assert!(hi.to_f64().unwrap() >= e * (1.0 - 1e-12));
    }
}
