use mdzv::eval::{eval_lhs_in, eval_term, partial_sums, verify_named, EvalError};
use mdzv::formulas::{catalog_names, identity, mzv_shuffle_square, parse_latex, printed_text, self_shuffle_zeta, Form};
use mdzv::numfield::{enumerate_cone, make_field};
use mdzv::real::Complex;
use mdzv::{EvalContext, PairingStructure, Permutation, RefinedTerm, SummationPolicy, TruncationSet};

fn ctx(d: i64, r: f64, k: usize) -> EvalContext {
    EvalContext::new(enumerate_cone(make_field(d).unwrap(), r).unwrap(), PairingStructure::standard(k).unwrap())
}

fn rel(a: &Complex<f64>, b: &Complex<f64>) -> f64 {
    a.sub(b).abs_f64() / a.abs_f64().max(b.abs_f64())
}

#[test]
fn coset_members_evaluate_equal() {
    let c = ctx(-1, 8.0, 4);
    let pairing = PairingStructure::standard(4).unwrap();
    assert_eq!(pairing.subgroup().len(), 8);
    for exps in [[2, 2, 2, 2], [1, 3, 1, 3], [1, 1, 2, 4]] {
        for rho in Permutation::all(4) {
            let base = eval_term(&RefinedTerm::new(rho.clone(), exps.to_vec()).unwrap(), &c).unwrap();
            for h in pairing.subgroup() {
                let moved = eval_term(&RefinedTerm::new(&rho * h, exps.to_vec()).unwrap(), &c).unwrap();
                assert!(rel(&base, &moved) < 1e-10, "ρ={rho} h={h} {exps:?}");
            }
        }
    }
}

#[test]
fn three_cosets_of_size_eight() {
    let cosets = PairingStructure::standard(4).unwrap().cosets();
    assert_eq!(cosets.len(), 3);
    assert!(cosets.iter().all(|c| c.len() == 8));
    let reps: Vec<String> = cosets.iter().map(|c| c[0].to_string()).collect();
    assert_eq!(reps, ["(1)", "(23)", "(234)"]);
}

#[test]
fn conjugation_closed_sums_are_real() {
    for d in [-1, -3, -7] {
        let c2 = ctx(d, 12.0, 2);
        for s in ["(1):1,3", "(1):2,2", "(1):2,5"] {
            let z = eval_term(&s.parse().unwrap(), &c2).unwrap();
            assert!(z.im.abs() < 1e-15 * z.re.abs(), "{s} d={d}: {z:?}");
        }
        let c4 = ctx(d, 5.0, 4);
        for s in ["(1):1,1,1,3", "(23):1,1,2,2", "(234):1,1,1,7"] {
            let z = eval_term(&s.parse().unwrap(), &c4).unwrap();
            assert!(z.im.abs() < 1e-13 * z.re.abs(), "{s} d={d}: {z:?}");
        }
    }
}

#[test]
fn conjugate_points_cancel_imaginary_parts() {
    // depth one: the summands at α and ᾱ are complex conjugates
    let f = make_field(-1).unwrap();
    let t: RefinedTerm = "(1):1,3".parse().unwrap();
    for (a, b) in [(1, 2), (3, -1), (2, 5)] {
        let x = mdzv::numfield::RingElement::new(a, b);
        let r = (f.norm(x) as f64).sqrt();
        let pair = TruncationSet::new(f, r + 1e-9, false).unwrap();
        let one = TruncationSet::new(f, r - 1e-9, false).unwrap();
        let ctx_pair = EvalContext::new(pair, PairingStructure::standard(2).unwrap());
        let ctx_less = EvalContext::new(one, PairingStructure::standard(2).unwrap());
        let diff = eval_term(&t, &ctx_pair).unwrap().sub(&eval_term(&t, &ctx_less).unwrap());
        assert!(diff.im.abs() < 1e-15, "{x}: {diff:?}");
        assert!(diff.re > 0.0);
    }
}

#[test]
fn boundary_points_make_depth_one_singular() {
    let set = TruncationSet::new(make_field(-1).unwrap(), 3.0, true).unwrap();
    let c = EvalContext::new(set, PairingStructure::standard(2).unwrap());
    let err = eval_term(&"(1):1,3".parse().unwrap(), &c).unwrap_err();
    assert!(matches!(err, EvalError::SingularTerm(_)));
}

#[test]
fn smaller_radius_is_a_prefix() {
    let c = self_shuffle_zeta(3).unwrap();
    for d in [-1, -3] {
        let small = partial_sums(&c, &ctx(d, 5.0, 2)).unwrap();
        let big = partial_sums(&c, &ctx(d, 10.0, 2)).unwrap();
        assert_eq!(small, big[..small.len()]);
    }
    let p = identity("zeta2-x-zeta2").unwrap().rhs;
    let small = partial_sums(&p, &ctx(-1, 4.0, 4)).unwrap();
    let big = partial_sums(&p, &ctx(-1, 6.0, 4)).unwrap();
    assert_eq!(small, big[..small.len()]);
}

#[test]
fn summation_policies_agree() {
    let c = identity("zeta2-x-zeta3").unwrap().rhs;
    let base = ctx(-3, 6.0, 4);
    let a = mdzv::eval::eval_combination(&c, &base).unwrap();
    let b = mdzv::eval::eval_combination(&c, &base.clone().with_policy(SummationPolicy::Ordered)).unwrap();
    assert!(rel(&a, &b) < 1e-13);
    let again = mdzv::eval::eval_combination(&c, &base).unwrap();
    assert_eq!(a, again);
}

#[test]
fn whole_catalog_verifies_at_radius_five() {
    for d in [-1, -3] {
        for name in catalog_names() {
            let report = verify_named(&name, &ctx(d, 5.0, 4), 1e-10).unwrap();
            assert!(report.passed, "{report}");
        }
    }
}

#[test]
fn extended_precision_is_tighter() {
    let c = ctx(-1, 4.0, 4).with_precision(mdzv::Precision::Extended);
    for name in ["selfie-zeta3", "shuffle-22x13", "corollary"] {
        let report = verify_named(name, &c, 1e-40).unwrap();
        assert!(report.passed, "{report}");
    }
}

#[test]
fn mzv_words_give_the_same_coefficients() {
    for n in 2..=5 {
        let engine = self_shuffle_zeta(n).unwrap();
        let words = mzv_shuffle_square(n);
        assert_eq!(engine.len(), words.len());
        for ((a, b), count) in words {
            let t = RefinedTerm::identity(vec![a, b]).unwrap();
            assert_eq!(engine.coefficient(&t), count as i64, "n={n} ({a},{b})");
        }
    }
}

#[test]
fn printed_forms_that_disagree_also_fail_numerically() {
    let c = ctx(-1, 6.0, 4);
    let mut failing = 0;
    for name in catalog_names() {
        let id = identity(&name).unwrap();
        let Some(text) = printed_text(&name, Form::Simplified) else { continue };
        let printed = parse_latex(&text, id.pairing.k()).combination;
        let c = c.with_pairing(id.pairing.clone());
        let lhs = eval_lhs_in::<f64>(&id.lhs, &c).unwrap();
        let value = mdzv::eval::eval_combination(&printed, &c).unwrap();
        let canon = printed.canonicalized(&id.pairing).unwrap();
        if canon == id.rhs {
            assert!(rel(&lhs, &value) < 1e-10, "{name}");
        } else {
            failing += 1;
            assert!(rel(&lhs, &value) > 1e-3, "{name} differs symbolically but not numerically");
        }
    }
    assert!(failing > 0);
}
