mod common;

use prefrobust::*;
use proptest::prelude::*;
use rand::Rng;

/// Small random instance from a seed, so proptest shrinks over seeds and
/// shapes rather than raw floats.
fn instance(seed: u64, t: usize, n: usize, k: usize, law: bool) -> ValidInstance {
    let mut r = common::rng(seed);
    let c = [0.5, 1.0, 2.0][r.random_range(0..3)];
    common::instance(&mut r, t, n, k, c, law)
}

fn point(seed: u64, t: usize, n: usize) -> Prospect {
    let mut r = common::rng(seed ^ 0x9e37_79b9);
    common::prospect(&mut r, t, n, 8.0, false).shifted(-1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sorted_values_are_nonincreasing_and_start_at_zero(seed in 0u64..10_000, t in 1usize..4, n in 1usize..3, k in 1usize..5) {
        let inst = instance(seed, t, n, k, false);
        let d = sort_value_problem(&inst).unwrap();
        prop_assert_eq!(d.len(), inst.size());
        prop_assert_eq!(d.node(1), 0);
        prop_assert_eq!(d.value(1), Some(0.0));
        let v = d.values();
        prop_assert!(v.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn binary_and_level_search_agree(seed in 0u64..10_000, t in 1usize..4, n in 1usize..3, k in 1usize..5) {
        let inst = instance(seed, t, n, k, false);
        let d = sort_value_problem(&inst).unwrap();
        let x = point(seed, t, n);
        let a = eval_rcf(&x, &d, &inst).unwrap();
        let b = eval_rcf_levelsearch(&x, &d, &inst).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-7);
        prop_assert!(a.lp_calls <= binary_search_budget(d.len()));
    }

    #[test]
    fn law_search_variants_agree(seed in 0u64..10_000, t in 1usize..4, n in 1usize..3, k in 1usize..4) {
        let inst = instance(seed, t, n, k, true);
        let d = sort_value_problem_law(&inst).unwrap();
        let x = point(seed, t, n);
        let a = eval_rcf_law(&x, &d, &inst).unwrap();
        let b = eval_rcf_law_levelsearch(&x, &d, &inst).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-7);
    }

    #[test]
    fn translation_shifts_value_by_c(seed in 0u64..10_000, t in 1usize..4, k in 1usize..4, shift in 0.0f64..3.0) {
        // Below W₀ the value of x − a·1 is ψ(x) − C·a.
        let inst = instance(seed, t, 1, k, false);
        let d = sort_value_problem(&inst).unwrap();
        let x = inst.w0().shifted(-1.0);
        let a = eval_rcf(&x, &d, &inst).unwrap().value;
        let b = eval_rcf(&x.shifted(-shift), &d, &inst).unwrap().value;
        prop_assert!(b <= a + 1e-9);
        prop_assert!(a - b <= inst.lipschitz() * shift + 1e-7);
    }

    #[test]
    fn value_problem_reproduces_sorted_values(seed in 0u64..10_000, t in 1usize..4, n in 1usize..3, k in 1usize..5) {
        // Evaluating at a sorted prospect returns its sorted value.
        let inst = instance(seed, t, n, k, false);
        let d = sort_value_problem(&inst).unwrap();
        for j in 1..=d.len() {
            let x = inst.prospect(d.node(j));
            let v = eval_rcf(x, &d, &inst).unwrap().value;
            prop_assert!((v - d.value(j).unwrap()).abs() < 1e-7, "j = {}: {} vs {:?}", j, v, d.value(j));
        }
    }
}

#[test]
fn decomposition_json_round_trip() {
    let inst = instance(5, 2, 2, 3, true);
    let d = sort_value_problem_law(&inst).unwrap();
    let back = Decomposition::from_json(&d.to_json()).unwrap();
    assert_eq!(back, d);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    d.save(&path).unwrap();
    assert_eq!(Decomposition::load(&path).unwrap(), d);
}

#[test]
fn mismatched_decomposition_is_rejected() {
    let a = instance(1, 2, 1, 2, false);
    let b = instance(2, 3, 1, 2, false);
    let d = sort_value_problem(&a).unwrap();
    assert!(eval_rcf(&point(0, 3, 1), &d, &b).is_err());
    assert!(eval_rcf(&point(0, 3, 1), &d, &a).is_err());
    let law = a.with_law_invariance(true);
    assert!(eval_rcf_law(&point(0, 2, 1), &d, &law).is_err());
    assert!(sort_value_problem_law(&a).is_err());
    assert!(sort_value_problem(&law).is_err());
}

#[test]
fn instance_validation_errors() {
    let s = Prospect::scalar;
    let pair = |w, y| EcdsPair {
        preferred: s(w),
        dominated: s(y),
    };
    let bad_c = Instance::new(s(5.0), vec![pair(3.0, 1.0)], 0.0, false).validate();
    assert!(matches!(bad_c, Err(Error::Lipschitz(_))));
    let not_dominated = Instance::new(s(2.0), vec![pair(3.0, 1.0)], 1.0, false).validate();
    assert!(matches!(not_dominated, Err(Error::Dominance { .. })));
    let shape = Instance::new(
        s(5.0),
        vec![EcdsPair {
            preferred: Prospect::column(&[1.0, 2.0]).unwrap(),
            dominated: s(1.0),
        }],
        1.0,
        false,
    )
    .validate();
    assert!(matches!(shape, Err(Error::Dimension(_))));
}

#[test]
fn duplicates_and_self_comparisons_collapse() {
    let s = Prospect::scalar;
    let pair = |w, y| EcdsPair {
        preferred: s(w),
        dominated: s(y),
    };
    let inst = Instance::new(s(5.0), vec![pair(3.0, 1.0), pair(3.0, 1.0), pair(2.0, 2.0)], 1.0, false)
        .validate()
        .unwrap();
    assert_eq!(inst.size(), 4);
    let d = sort_value_problem(&inst).unwrap();
    let by_node = d.values_by_node();
    assert!((by_node[inst.node_of(&s(2.0)).unwrap()] + 3.0).abs() < 1e-9);
}

#[test]
fn oracles_refuse_large_instances() {
    let inst = instance(3, 1, 1, 5, false);
    if inst.size() > 8 {
        assert!(matches!(oracle_value_problem(&inst), Err(Error::TooLarge(_))));
    }
    let wide = instance(3, 6, 1, 1, true);
    assert!(matches!(oracle_value_problem_law(&wide), Err(Error::TooLarge(_))));
}
