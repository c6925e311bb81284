#![allow(dead_code)]

use proptest::prelude::*;
use wsprop_core::schema::{anonymous_type_name, ComplexTypeDef};
use wsprop_core::*;

pub const BAR: &str = "http://bar";

pub fn bar(local: &str) -> QName {
    QName::new(BAR, local)
}

fn el(local: &str, ty: TypeRef, min: u64, max: MaxOccurs) -> ElementDecl {
    ElementDecl {
        name: bar(local),
        type_ref: ty,
        min_occurs: min,
        max_occurs: max,
    }
}

fn one(local: &str, ty: TypeRef) -> ElementDecl {
    el(local, ty, 1, MaxOccurs::Bounded(1))
}

/// The product-order schema with qualified local elements.
pub fn order_schema() -> XsdSchema {
    let mut s = XsdSchema {
        target_namespace: BAR.into(),
        ..XsdSchema::default()
    };
    let named = |q: QName| TypeRef::Named(q);
    s.complex_types.insert(
        bar("ProductType"),
        ComplexTypeDef::new(
            Combinator::Sequence,
            vec![
                one("name", named(QName::xsd("string"))),
                one("price", named(QName::xsd("positiveInteger"))),
                one("shipInfo", named(bar("ShipInfo"))),
            ],
        ),
    );
    s.simple_types.insert(
        bar("PaymentType"),
        SimpleTypeDef {
            base: QName::xsd("string"),
            derivation: SimpleDerivation::Restriction,
            facets: FacetSet {
                enumeration: Some(vec!["visa".into(), "paypal".into(), "deposit".into()]),
                ..FacetSet::default()
            },
        },
    );
    s.complex_types.insert(
        bar("ShipInfo"),
        ComplexTypeDef::new(
            Combinator::Sequence,
            vec![
                one("paymentInfo", named(bar("PaymentType"))),
                one("address", named(QName::xsd("string"))),
            ],
        ),
    );
    let order_type = anonymous_type_name(BAR, "Order");
    s.complex_types.insert(
        order_type.clone(),
        ComplexTypeDef::new(
            Combinator::Sequence,
            vec![el("products", named(bar("ProductType")), 1, MaxOccurs::Unbounded)],
        ),
    );
    s.elements
        .insert(bar("Order"), one("Order", TypeRef::Anonymous(order_type)));
    s.elements
        .insert(bar("Product"), one("Product", named(bar("ProductType"))));
    s
}

pub fn node(local: &str, path: &[&str], ty: Option<&str>, ir: TypeIr) -> NamedIr {
    NamedIr {
        local_name: local.into(),
        ancestor_path: path.iter().map(|s| s.to_string()).collect(),
        namespace: BAR.into(),
        type_name: ty.map(Into::into),
        part: None,
        ir,
    }
}

// ---- random IR trees ----

fn int_bound() -> impl Strategy<Value = Bound<i128>> {
    prop_oneof![
        1 => Just(Bound::Infinite),
        3 => (-1000i128..1000).prop_map(Bound::Finite),
        1 => prop_oneof![Just(i128::from(i64::MIN)), Just(i128::from(u64::MAX)), Just(1_000_000_007)]
            .prop_map(Bound::Finite),
    ]
}

fn float_bound() -> impl Strategy<Value = Bound<f64>> {
    prop_oneof![
        1 => Just(Bound::Infinite),
        3 => (-1000.0f64..1000.0).prop_map(Bound::Finite),
        1 => prop_oneof![Just(-1e300), Just(1e300), Just(0.0), Just(1e-9)].prop_map(Bound::Finite),
    ]
}

fn wire() -> impl Strategy<Value = Wire> {
    prop_oneof![Just(Wire::Native), Just(Wire::Text)]
}

fn ordered<T: PartialOrd + Copy>(a: Bound<T>, b: Bound<T>) -> (Bound<T>, Bound<T>) {
    match (a, b) {
        (Bound::Finite(x), Bound::Finite(y)) if x > y => (b, a),
        _ => (a, b),
    }
}

pub fn leaf_ir() -> impl Strategy<Value = TypeIr> {
    prop_oneof![
        (int_bound(), int_bound(), wire()).prop_map(|(a, b, w)| {
            let (lo, hi) = ordered(a, b);
            TypeIr::integer(lo, hi, w)
        }),
        (float_bound(), float_bound(), any::<bool>(), any::<bool>(), wire()).prop_map(|(a, b, lo_open, hi_open, w)| {
            let (min, max) = ordered(a, b);
            let degenerate = matches!((min, max), (Bound::Finite(x), Bound::Finite(y)) if x == y);
            TypeIr::Scalar(Scalar::Float {
                min,
                max,
                min_open: lo_open && min != Bound::Infinite && !degenerate,
                max_open: hi_open && max != Bound::Infinite && !degenerate,
                wire: w,
            })
        }),
        wire().prop_map(|w| TypeIr::Scalar(Scalar::Boolean { wire: w })),
        prop::collection::btree_set("[a-z\u{e9}\u{4e2d} \"\\\\]{0,6}", 1..5)
            .prop_map(|s| TypeIr::Enumeration(s.into_iter().collect())),
        (0u64..4, prop::option::of(0u64..6)).prop_map(|(min, extra)| {
            let max = extra.map_or(Bound::Infinite, |e| Bound::Finite(min + e));
            TypeIr::list(
                min,
                max,
                TypeIr::integer(Bound::Finite(32), Bound::Finite(127), Wire::Native),
            )
        }),
    ]
}

fn named_children(kids: Vec<(Option<u8>, TypeIr)>) -> Vec<NamedIr> {
    kids.into_iter()
        .enumerate()
        .map(|(i, (ty, ir))| NamedIr {
            local_name: format!("f{i}"),
            ancestor_path: Vec::new(),
            namespace: if i % 2 == 0 { BAR.into() } else { String::new() },
            type_name: ty.map(|t| format!("T{t}")),
            part: None,
            ir,
        })
        .collect()
}

pub fn type_ir() -> impl Strategy<Value = TypeIr> {
    leaf_ir().prop_recursive(4, 40, 4, |inner| {
        let kid = (prop::option::of(0u8..3), inner.clone());
        prop_oneof![
            (0u64..3, prop::option::of(0u64..4), inner.clone()).prop_map(|(min, extra, ir)| {
                let max = extra.map_or(Bound::Infinite, |e| Bound::Finite(min + e));
                TypeIr::list(min, max, ir)
            }),
            prop::collection::vec(kid.clone(), 0..4).prop_map(|k| TypeIr::TupleOf(named_children(k))),
            prop::collection::vec(kid, 1..4).prop_map(|k| TypeIr::ChoiceOf(named_children(k))),
        ]
    })
}

/// Rewrites ancestor paths the way lowering assigns them.
pub fn fix_paths(node: &mut NamedIr) {
    let path = node.child_path();
    fix_content(&mut node.ir, &path);
}

fn fix_content(ir: &mut TypeIr, path: &[String]) {
    match ir {
        TypeIr::ListOf { inner, .. } => fix_content(inner, path),
        TypeIr::TupleOf(fields) | TypeIr::ChoiceOf(fields) => {
            for f in fields {
                f.ancestor_path = path.to_vec();
                fix_paths(f);
            }
        }
        _ => {}
    }
}

/// An operation root named `op` around a random tree.
pub fn root_ir() -> impl Strategy<Value = NamedIr> {
    (type_ir(), prop::option::of(0u8..2)).prop_map(|(ir, ty)| {
        let mut root = NamedIr {
            local_name: "op".into(),
            ancestor_path: Vec::new(),
            namespace: BAR.into(),
            type_name: ty.map(|t| format!("Root{t}")),
            part: Some(1),
            ir,
        };
        fix_paths(&mut root);
        root
    })
}
