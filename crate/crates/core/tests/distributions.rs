use wsprop_core::*;

const DRAWS: u64 = 10_000;

#[test]
fn enumeration_members_are_equally_likely() {
    let ir = TypeIr::Enumeration(vec!["visa".into(), "paypal".into(), "deposit".into()]);
    let mut counts = [0u64; 3];
    for seed in 0..DRAWS {
        let Value::Text(s) = generate(&ir, GenContext::new(seed, 10)).unwrap() else {
            panic!()
        };
        counts[["visa", "paypal", "deposit"].iter().position(|e| *e == s).unwrap()] += 1;
    }
    for c in counts {
        let freq = c as f64 / DRAWS as f64;
        // 1/3 within 5% of its value; about 3.5 standard deviations.
        assert!((freq - 1.0 / 3.0).abs() <= 0.05 / 3.0, "{counts:?}");
    }
}

#[test]
fn strings_at_size_one_are_empty_half_the_time() {
    let ir = TypeIr::string();
    let empty = (0..DRAWS)
        .filter(|&seed| generate(&ir, GenContext::new(seed, 1)).unwrap() == Value::List(vec![]))
        .count();
    // Length is uniform over {0, 1}; 0.02 is four standard deviations.
    let freq = empty as f64 / DRAWS as f64;
    assert!((freq - 0.5).abs() <= 0.02, "{freq}");
}

#[test]
fn any_string_shrinks_to_empty() {
    let root = NamedIr {
        local_name: "s".into(),
        ancestor_path: vec![],
        namespace: String::new(),
        type_name: None,
        part: Some(1),
        ir: TypeIr::string(),
    };
    for seed in 0..200 {
        let v = generate(&root.ir, GenContext::new(seed, 42)).unwrap();
        let out = shrink_to_minimum(&root, v, &TransformHooks::new(), 10_000, |_| true);
        assert_eq!(out.value, Value::List(vec![]));
    }
}

#[test]
fn hooks_apply_after_generation_and_shrinking() {
    // Keep every generated integer even.
    let field = NamedIr {
        local_name: "n".into(),
        ancestor_path: vec!["r_1".into()],
        namespace: String::new(),
        type_name: None,
        part: None,
        ir: TypeIr::integer(Bound::Finite(10), Bound::Finite(1_000), Wire::Text),
    };
    let root = NamedIr {
        local_name: "r".into(),
        ancestor_path: vec![],
        namespace: String::new(),
        type_name: None,
        part: Some(1),
        ir: TypeIr::TupleOf(vec![field]),
    };
    let mut hooks = TransformHooks::new();
    hooks.register("r_1_n", |v| match v {
        Value::Int(x) => Value::Int(x - x % 2),
        other => other,
    });
    let v = hooks.apply(&root, Value::tuple([("n", Value::Int(777))]));
    assert_eq!(v.field("n"), Some(&Value::Int(776)));
    let out = shrink_to_minimum(
        &root,
        v,
        &hooks,
        10_000,
        |v| matches!(v.field("n"), Some(Value::Int(x)) if *x >= 100),
    );
    assert_eq!(out.value.field("n"), Some(&Value::Int(100)));
}
