use crate::ir::{Bound, NamedIr, Scalar, TypeIr};
use crate::value::Value;

/// Structural and bounds check of `v` against `ir`. Total: never panics.
pub fn conforms(ir: &TypeIr, v: &Value) -> bool {
    match (ir, v) {
        (TypeIr::Scalar(Scalar::Integer { min, max, .. }), Value::Int(x)) => {
            min.finite().is_none_or(|lo| *x >= lo) && max.finite().is_none_or(|hi| *x <= hi)
        }
        (
            TypeIr::Scalar(Scalar::Float {
                min,
                max,
                min_open,
                max_open,
                ..
            }),
            Value::Float(x),
        ) => x.is_finite() && float_in_range(*x, *min, *max, *min_open, *max_open),
        (TypeIr::Scalar(Scalar::Boolean { .. }), Value::Bool(_)) => true,
        (TypeIr::Enumeration(values), Value::Text(s)) => values.iter().any(|e| e == s),
        (
            TypeIr::ListOf {
                min_len,
                max_len,
                inner,
            },
            Value::List(items),
        ) => {
            let n = items.len() as u64;
            n >= *min_len && max_len.finite().is_none_or(|hi| n <= hi) && items.iter().all(|item| conforms(inner, item))
        }
        (TypeIr::TupleOf(fields), Value::Tuple(values)) => {
            fields.len() == values.len()
                && fields
                    .iter()
                    .zip(values)
                    .all(|(f, (name, v))| f.local_name == *name && conforms(&f.ir, v))
        }
        (TypeIr::ChoiceOf(alts), Value::Choice(idx, inner)) => {
            alts.get(*idx).is_some_and(|alt| conforms(&alt.ir, inner))
        }
        _ => false,
    }
}

pub fn conforms_named(ir: &NamedIr, v: &Value) -> bool {
    conforms(&ir.ir, v)
}

pub(crate) fn float_in_range(x: f64, min: Bound<f64>, max: Bound<f64>, min_open: bool, max_open: bool) -> bool {
    let above = match min {
        Bound::Finite(lo) => x > lo || (!min_open && x == lo),
        Bound::Infinite => true,
    };
    let below = match max {
        Bound::Finite(hi) => x < hi || (!max_open && x == hi),
        Bound::Infinite => true,
    };
    above && below
}
