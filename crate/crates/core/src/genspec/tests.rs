use super::*;
use crate::ir::path_id;
use alloc::vec;

fn leaf(local: &str, path: &[&str], ty: Option<&str>, ir: TypeIr) -> NamedIr {
    NamedIr {
        local_name: local.into(),
        ancestor_path: path.iter().map(|s| s.to_string()).collect(),
        namespace: String::new(),
        type_name: ty.map(Into::into),
        part: None,
        ir,
    }
}

fn delete_root() -> NamedIr {
    let c = leaf("c", &["delete_1"], None, TypeIr::string());
    let input = leaf("in", &["delete_1"], None, TypeIr::string());
    NamedIr {
        local_name: "delete".into(),
        ancestor_path: vec![],
        namespace: "http://delete.example/".into(),
        type_name: None,
        part: Some(1),
        ir: TypeIr::TupleOf(vec![input, c]),
    }
}

fn delete_response() -> NamedIr {
    NamedIr {
        local_name: "deleteResponse".into(),
        ancestor_path: vec![],
        namespace: "http://delete.example/".into(),
        type_name: None,
        part: Some(1),
        ir: TypeIr::TupleOf(vec![leaf(
            "deleteReturn",
            &["deleteResponse_1"],
            None,
            TypeIr::string(),
        )]),
    }
}

fn delete_spec() -> GenSpec {
    let (input, output) = (delete_root(), delete_response());
    GenSpec::from_lowered(&[LoweredOperation {
        name: "delete",
        input: &input,
        output: &output,
    }])
}

#[test]
fn emits_one_definition_per_node_children_first() {
    let spec = delete_spec();
    let names: Vec<&str> = spec.definitions.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "delete_1_in",
            "delete_1_c",
            "delete_1",
            "deleteResponse_1_deleteReturn",
            "deleteResponse_1"
        ]
    );
    assert_eq!(
        spec.operations,
        vec![OperationStanza {
            op_name: "delete".into(),
            input_gen: "delete_1".into(),
            output_type: "deleteResponse_1".into(),
        }]
    );
    let text = spec.to_text("header");
    assert!(text.contains("gen delete_1_c = list(0, inf, int(32, 127))\n"), "{text}");
    assert!(text.contains("operation delete input=delete_1 output=deleteResponse_1\n"));
}

#[test]
fn scalar_wire_is_spelled_by_text_of() {
    let price = leaf(
        "price",
        &["Order_1", "products_ProductType"],
        None,
        TypeIr::integer(Bound::Finite(1), Bound::Infinite, Wire::Text),
    );
    let pay = leaf(
        "paymentInfo",
        &["Order_1"],
        Some("PaymentType"),
        TypeIr::Enumeration(vec!["visa".into(), "paypal".into(), "deposit".into()]),
    );
    let root = NamedIr {
        local_name: "Order".into(),
        ancestor_path: vec![],
        namespace: "http://bar".into(),
        type_name: None,
        part: Some(1),
        ir: TypeIr::TupleOf(vec![price, pay]),
    };
    let spec = GenSpec::from_lowered(&[LoweredOperation {
        name: "order",
        input: &root,
        output: &root,
    }]);
    let text = spec.to_text("");
    assert!(
        text.contains("gen Order_1_products_ProductType_price = text_of(int(1, inf))\n"),
        "{text}"
    );
    assert!(text.contains("gen Order_1_paymentInfo_PaymentType = enum(\"visa\", \"paypal\", \"deposit\")\n"));
}

#[test]
fn empty_operation_list_gives_header_only() {
    let spec = GenSpec::from_lowered(&[]);
    assert_eq!(spec.to_text("generated"), "# generated\n");
    assert_eq!(GenSpec::parse("# generated\n"), Ok(GenSpec::default()));
}

#[test]
fn emitted_text_round_trips() {
    let spec = delete_spec();
    let text = spec.to_text("a\nb");
    assert_eq!(GenSpec::parse(&text), Ok(spec.clone()));
    let root = delete_root();
    assert_eq!(spec.to_ir("delete_1"), Ok(root.ir));
}

#[test]
fn narrowed_list_parses() {
    let spec = GenSpec::parse("gen c = list(1, 1, int(32, 127))").unwrap();
    assert_eq!(
        spec.to_ir("c"),
        Ok(TypeIr::list(
            1,
            Bound::Finite(1),
            TypeIr::integer(Bound::Finite(32), Bound::Finite(127), Wire::Native)
        ))
    );
}

#[test]
fn text_of_selects_text_wire() {
    let spec = GenSpec::parse("gen a = int(1, inf)\ngen b = text_of(int(1, inf))\n").unwrap();
    assert_eq!(
        spec.to_ir("a"),
        Ok(TypeIr::integer(Bound::Finite(1), Bound::Infinite, Wire::Native))
    );
    assert_eq!(
        spec.to_ir("b"),
        Ok(TypeIr::integer(Bound::Finite(1), Bound::Infinite, Wire::Text))
    );
    assert!(matches!(
        GenSpec::parse("gen a = text_of(list(0, 1, bool))"),
        Err(GenSpecError::Invalid { .. })
    ));
    assert!(matches!(
        GenSpec::parse("gen a = text_of(text_of(bool))"),
        Err(GenSpecError::Invalid { .. })
    ));
}

#[test]
fn dangling_reference_is_unknown_name() {
    assert_eq!(
        GenSpec::parse("\ngen a = ref(b)\n"),
        Err(GenSpecError::UnknownName {
            name: "b".into(),
            line: Some(2)
        })
    );
    assert!(matches!(
        GenSpec::parse("gen a = bool\noperation op input=a output=zz"),
        Err(GenSpecError::UnknownName { name, line: Some(2) }) if name == "zz"
    ));
}

#[test]
fn forward_references_are_reordered() {
    let spec = GenSpec::parse("gen a = list(0, 2, ref(b))\ngen b = bool\n").unwrap();
    let names: Vec<&str> = spec.definitions.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["b", "a"]);
}

#[test]
fn cycles_are_rejected() {
    assert!(matches!(
        GenSpec::parse("gen a = list(0, 2, ref(b))\ngen b = tuple(x: ref(a))"),
        Err(GenSpecError::CycleError(_))
    ));
    assert!(matches!(
        GenSpec::parse("gen a = ref(a)"),
        Err(GenSpecError::CycleError(_))
    ));
}

#[test]
fn syntax_errors_carry_lines() {
    let err = GenSpec::parse("gen a = bool\n\ngen b = int(1 2)\n").unwrap_err();
    assert!(matches!(err, GenSpecError::SyntaxError { line: 3, .. }), "{err:?}");
    let err = GenSpec::parse("gen a = bool\ngen a = bool").unwrap_err();
    assert!(matches!(err, GenSpecError::SyntaxError { line: 2, .. }), "{err:?}");
    let err = GenSpec::parse("gen a = tuple(\n  x: bool,\n  y: wat\n)").unwrap_err();
    assert!(matches!(err, GenSpecError::SyntaxError { line: 3, .. }), "{err:?}");
    assert!(GenSpec::parse("gen a = float(>inf, 1.0)").is_err());
    assert!(GenSpec::parse("gen a = int(0.5, 1)").is_err());
}

#[test]
fn literal_contradictions_are_invalid() {
    for text in [
        "gen a = int(3, 2)",
        "gen a = enum(\"x\", \"x\")",
        "gen a = choice()",
        "gen a = list(3, 2, bool)",
        "gen a = float(>1.0, 1.0)",
        "gen a = tuple(x: bool, x: bool)",
    ] {
        assert!(GenSpec::parse(text).is_err(), "{text}");
    }
}

#[test]
fn multi_line_statements_and_escapes() {
    let text = "# c\ngen e = enum(\"a\\\"b\", \"\\u{e9}t\u{e9}\", \"x\\ny\") # trailing\n\
                gen t = tuple(\n    {urn:x}a as A: ref(e),\n    b: float(>-1.5, <2e3)\n)\n";
    let spec = GenSpec::parse(text).unwrap();
    assert_eq!(
        spec.get("e"),
        Some(&GenExpr::Enum(vec![
            "a\"b".into(),
            "\u{e9}t\u{e9}".into(),
            "x\ny".into()
        ]))
    );
    let Some(GenExpr::Tuple(fields)) = spec.get("t") else {
        panic!()
    };
    assert_eq!(fields[0].namespace, "urn:x");
    assert_eq!(fields[0].type_name.as_deref(), Some("A"));
    assert_eq!(
        fields[1].expr,
        GenExpr::Float {
            lo: Bound::Finite(-1.5),
            hi: Bound::Finite(2000.0),
            lo_open: true,
            hi_open: true
        }
    );
    assert_eq!(GenSpec::parse(&spec.to_text("")), Ok(spec));
}

#[test]
fn overrides_replace_definitions() {
    let base = delete_spec();
    let overrides = GenSpec::parse_unchecked("gen delete_1_c = list(1, 1, int(32, 127))").unwrap();
    let merged = base.merge_overrides(&overrides).unwrap();
    let ir = merged.to_ir("delete_1").unwrap();
    let TypeIr::TupleOf(fields) = ir else { panic!() };
    assert_eq!(path_id(&fields[1]), "delete_1_c");
    assert_eq!(
        fields[1].ir,
        TypeIr::list(
            1,
            Bound::Finite(1),
            TypeIr::integer(Bound::Finite(32), Bound::Finite(127), Wire::Native)
        )
    );
    assert_eq!(merged.merge_overrides(&overrides), Ok(merged.clone()));
    assert_eq!(base.merge_overrides(&GenSpec::default()), Ok(base.clone()));
}

#[test]
fn bad_overrides_are_rejected() {
    let base = delete_spec();
    let missing = GenSpec::parse_unchecked("gen nope = bool").unwrap();
    assert!(matches!(
        base.merge_overrides(&missing),
        Err(GenSpecError::UnknownName { name, .. }) if name == "nope"
    ));
    let cyclic = GenSpec::parse_unchecked("gen delete_1_c = list(0, 1, ref(delete_1))").unwrap();
    assert!(matches!(
        base.merge_overrides(&cyclic),
        Err(GenSpecError::CycleError(_))
    ));
}

#[test]
fn root_name_clash_gets_a_suffix() {
    let a = leaf("x", &[], None, TypeIr::Scalar(Scalar::Boolean { wire: Wire::Native }));
    let a = NamedIr { part: Some(1), ..a };
    let b = NamedIr {
        ir: TypeIr::string(),
        ..a.clone()
    };
    let spec = GenSpec::from_lowered(&[
        LoweredOperation {
            name: "one",
            input: &a,
            output: &a,
        },
        LoweredOperation {
            name: "two",
            input: &b,
            output: &a,
        },
    ]);
    assert_eq!(spec.operations[0].input_gen, "x_1");
    assert_eq!(spec.operations[1].input_gen, "x_1_2");
    assert_eq!(spec.operations[1].output_type, "x_1");
}
