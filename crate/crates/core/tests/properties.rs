mod common;

use std::cmp::Ordering;

use common::*;
use proptest::prelude::*;
use wsprop_core::shrink::compare_size;
use wsprop_core::*;

const SHRINK_CAP: usize = 10_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn generated_values_conform(ir in type_ir(), seed in any::<u64>(), size in 0u32..60) {
        let v = generate(&ir, GenContext::new(seed, size)).unwrap();
        prop_assert!(conforms(&ir, &v), "{v:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn generation_is_deterministic(ir in type_ir(), seed in any::<u64>(), size in 1u32..43) {
        let ctx = GenContext::new(seed, size);
        prop_assert_eq!(generate(&ir, ctx), generate(&ir, ctx));
    }

    #[test]
    fn list_lengths_follow_size(min in 0u64..5, extra in prop::option::of(0u64..10), seed in any::<u64>(), size in 1u32..43) {
        let max = extra.map_or(Bound::Infinite, |e| Bound::Finite(min + e));
        let ir = TypeIr::list(min, max, TypeIr::Scalar(Scalar::Boolean { wire: Wire::Text }));
        let Value::List(items) = generate(&ir, GenContext::new(seed, size)).unwrap() else {
            panic!()
        };
        let cap = max.finite().map_or(min + size as u64, |m| m.min(min + size as u64));
        prop_assert!((min..=cap).contains(&(items.len() as u64)));
    }

    #[test]
    fn unbounded_integers_are_size_limited(seed in any::<u64>(), size in 1u32..43) {
        let ir = TypeIr::integer(Bound::Infinite, Bound::Infinite, Wire::Text);
        let Value::Int(x) = generate(&ir, GenContext::new(seed, size)).unwrap() else { panic!() };
        prop_assert!(x.abs() <= 8 * size as i128);
    }

    #[test]
    fn shrink_candidates_are_smaller_and_conform(ir in type_ir(), seed in any::<u64>(), size in 1u32..12) {
        let v = generate(&ir, GenContext::new(seed, size)).unwrap();
        for c in shrink_candidates(&ir, &v) {
            prop_assert!(conforms(&ir, &c), "{c:?}");
            prop_assert_eq!(compare_size(&ir, &c, &v), Ordering::Less, "{:?} !< {:?}", c, v);
        }
    }

    #[test]
    fn shrinking_terminates_at_a_local_minimum(root in root_ir(), seed in any::<u64>(), size in 1u32..12) {
        let v = generate(&root.ir, GenContext::new(seed, size)).unwrap();
        let hooks = TransformHooks::new();
        let out = shrink_to_minimum(&root, v, &hooks, SHRINK_CAP, |_| true);
        prop_assert!(!out.exhausted, "shrink chain exceeded {SHRINK_CAP} steps");
        prop_assert!(conforms(&root.ir, &out.value));
        prop_assert!(shrink_candidates(&root.ir, &out.value).is_empty());
        prop_assert_eq!(Some(out.value), wsprop_core::shrink::simplest(&root.ir));
    }

    #[test]
    fn emitted_spec_round_trips(root in root_ir()) {
        let spec = GenSpec::from_lowered(&[LoweredOperation { name: "op", input: &root, output: &root }]);
        let text = spec.to_text("random");
        let parsed = GenSpec::parse(&text);
        prop_assert_eq!(parsed.as_ref(), Ok(&spec), "{}", text);
        let name = &spec.operations[0].input_gen;
        prop_assert_eq!(spec.to_ir(name), Ok(root.ir.clone()));
        prop_assert_eq!(spec.merge_overrides(&spec), Ok(spec.clone()));
    }

    #[test]
    fn integer_facets_only_narrow(
        base in prop::sample::select(vec!["integer", "int", "long", "short", "byte", "positiveInteger",
                                          "nonPositiveInteger", "unsignedByte", "unsignedLong"]),
        lo in prop::option::of(-70_000i64..70_000),
        hi in prop::option::of(-70_000i64..70_000),
    ) {
        let schema = XsdSchema::default();
        let facets = FacetSet {
            min_inclusive: lo.map(|x| x.to_string()),
            max_inclusive: hi.map(|x| x.to_string()),
            ..FacetSet::default()
        };
        let def = SimpleTypeDef { base: QName::xsd(base), derivation: SimpleDerivation::Restriction, facets };
        let TypeIr::Scalar(Scalar::Integer { min: bmin, max: bmax, .. }) = builtin_ir(&QName::xsd(base)).unwrap() else {
            panic!()
        };
        match lower_simple_type(&schema, &def) {
            Ok(TypeIr::Scalar(Scalar::Integer { min, max, .. })) => {
                let lo_of = |b: Bound<i128>| b.finite().unwrap_or(i128::MIN);
                let hi_of = |b: Bound<i128>| b.finite().unwrap_or(i128::MAX);
                prop_assert!(lo_of(min) >= lo_of(bmin) && hi_of(max) <= hi_of(bmax));
                if let Some(lo) = lo { prop_assert!(lo_of(min) >= lo as i128); }
                if let Some(hi) = hi { prop_assert!(hi_of(max) <= hi as i128); }
            }
            Ok(other) => prop_assert!(false, "{other:?}"),
            Err(LowerError::ContradictoryFacets(_)) => {
                let lo = lo.map_or(i128::MIN, i128::from).max(bmin.finite().unwrap_or(i128::MIN));
                let hi = hi.map_or(i128::MAX, i128::from).min(bmax.finite().unwrap_or(i128::MAX));
                prop_assert!(lo > hi);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn path_ids_are_unique_in_random_trees(root in root_ir()) {
        let mut ids: Vec<String> = root.walk().into_iter().map(path_id).collect();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        prop_assert_eq!(ids.len(), n);
    }
}

#[test]
fn value_is_replayable_from_seed_and_index() {
    let ir = TypeIr::string();
    let a = generate(&ir, GenContext::new(mix_seed(99, 7), size_for_test(7, 42)));
    let b = generate(&ir, GenContext::new(mix_seed(99, 7), size_for_test(7, 42)));
    assert_eq!(a, b);
}
