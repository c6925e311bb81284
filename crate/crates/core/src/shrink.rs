//! Shrinking: candidate simplifications of a value and the greedy descent
//! that turns a failing value into a locally minimal one.
//!
//! Size order: integers and floats by distance to the in-range point nearest
//! zero; booleans `false < true`; enumeration members by position; lists by
//! length, then elementwise; tuples elementwise; choices by alternative
//! index, then inner value. Every candidate is strictly smaller, so any
//! shrink chain terminates.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::conform::{conforms, float_in_range};
use crate::hooks::TransformHooks;
use crate::ir::{Bound, NamedIr, Scalar, TypeIr};
use crate::value::Value;

/// Candidates strictly smaller than `v`, most aggressive first. Empty iff
/// `v` is minimal.
pub fn shrink_candidates(ir: &TypeIr, v: &Value) -> Vec<Value> {
    let mut out = Vec::new();
    match (ir, v) {
        (TypeIr::Scalar(Scalar::Integer { min, max, .. }), Value::Int(x)) => {
            let t = int_target(*min, *max);
            let x = *x;
            if x == t {
                return out;
            }
            let halfway = x - (x - t) / 2;
            let step = if x > t { x - 1 } else { x + 1 };
            for c in [t, halfway, step] {
                if c != x && !out.contains(&Value::Int(c)) {
                    out.push(Value::Int(c));
                }
            }
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
        ) => {
            let t = float_target(*min, *max);
            let x = *x;
            let dist = abs(x - t);
            let nearest = admissible_float_target(*min, *max, *min_open, *max_open).unwrap_or(t);
            for c in [nearest, trunc(x), x + (t - x) / 2.0] {
                let admissible = float_in_range(c, *min, *max, *min_open, *max_open);
                if admissible && abs(c - t) < dist && !out.contains(&Value::Float(c)) {
                    out.push(Value::Float(c));
                }
            }
        }
        (TypeIr::Scalar(Scalar::Boolean { .. }), Value::Bool(true)) => out.push(Value::Bool(false)),
        (TypeIr::Enumeration(values), Value::Text(s)) => {
            if let Some(idx) = values.iter().position(|e| e == s) {
                out.extend(values[..idx].iter().cloned().map(Value::Text));
            }
        }
        (TypeIr::ListOf { min_len, inner, .. }, Value::List(items)) => {
            let n = items.len();
            let m = (*min_len as usize).min(n);
            if n > m {
                out.push(Value::List(items[..m].to_vec()));
                let k = (n - m) / 2;
                if k >= 1 && k < n - m {
                    out.push(Value::List(items[k..].to_vec()));
                    out.push(Value::List(items[..n - k].to_vec()));
                }
                if n - 1 > m {
                    for i in 0..n {
                        let mut fewer = items.clone();
                        fewer.remove(i);
                        out.push(Value::List(fewer));
                    }
                }
            }
            for (i, item) in items.iter().enumerate() {
                for c in shrink_candidates(inner, item) {
                    let mut replaced = items.clone();
                    replaced[i] = c;
                    out.push(Value::List(replaced));
                }
            }
            dedup(&mut out);
        }
        (TypeIr::TupleOf(fields), Value::Tuple(values)) if fields.len() == values.len() => {
            for (i, (field, (_, fv))) in fields.iter().zip(values).enumerate() {
                for c in shrink_candidates(&field.ir, fv) {
                    let mut replaced = values.clone();
                    replaced[i].1 = c;
                    out.push(Value::Tuple(replaced));
                }
            }
        }
        (TypeIr::ChoiceOf(alts), Value::Choice(idx, inner)) if *idx < alts.len() => {
            for (j, alt) in alts[..*idx].iter().enumerate() {
                if let Some(s) = simplest(&alt.ir) {
                    out.push(Value::Choice(j, Box::new(s)));
                }
            }
            for c in shrink_candidates(&alts[*idx].ir, inner) {
                out.push(Value::Choice(*idx, Box::new(c)));
            }
        }
        _ => {}
    }
    out
}

/// The smallest value of `ir` under the size order, if one exists.
pub fn simplest(ir: &TypeIr) -> Option<Value> {
    let v = match ir {
        TypeIr::Scalar(Scalar::Integer { min, max, .. }) => Value::Int(int_target(*min, *max)),
        TypeIr::Scalar(Scalar::Float {
            min,
            max,
            min_open,
            max_open,
            ..
        }) => {
            let t = admissible_float_target(*min, *max, *min_open, *max_open).unwrap_or(0.0);
            let ok = |x: f64| float_in_range(x, *min, *max, *min_open, *max_open);
            let fallback = match (min.finite(), max.finite()) {
                (Some(lo), Some(hi)) => lo + (hi - lo) / 2.0,
                (Some(lo), None) => lo + 1.0,
                (None, Some(hi)) => hi - 1.0,
                (None, None) => 0.0,
            };
            Value::Float([t, fallback].into_iter().find(|x| ok(*x))?)
        }
        TypeIr::Scalar(Scalar::Boolean { .. }) => Value::Bool(false),
        TypeIr::Enumeration(values) => Value::Text(values.first()?.clone()),
        TypeIr::ListOf { min_len, inner, .. } => {
            let item = if *min_len > 0 { Some(simplest(inner)?) } else { None };
            Value::List(item.map_or_else(Vec::new, |i| vec![i; *min_len as usize]))
        }
        TypeIr::TupleOf(fields) => Value::Tuple(
            fields
                .iter()
                .map(|f| Some((f.local_name.clone(), simplest(&f.ir)?)))
                .collect::<Option<Vec<_>>>()?,
        ),
        TypeIr::ChoiceOf(alts) => Value::Choice(0, Box::new(simplest(&alts.first()?.ir)?)),
    };
    conforms(ir, &v).then_some(v)
}

/// Total order used by the shrinker; `Less` means simpler. Values that do
/// not conform to `ir` compare by their variant shape only.
pub fn compare_size(ir: &TypeIr, a: &Value, b: &Value) -> Ordering {
    match (ir, a, b) {
        (TypeIr::Scalar(Scalar::Integer { min, max, .. }), Value::Int(x), Value::Int(y)) => {
            let t = int_target(*min, *max);
            x.abs_diff(t).cmp(&y.abs_diff(t))
        }
        (TypeIr::Scalar(Scalar::Float { min, max, .. }), Value::Float(x), Value::Float(y)) => {
            let t = float_target(*min, *max);
            abs(x - t).partial_cmp(&abs(y - t)).unwrap_or(Ordering::Equal)
        }
        (TypeIr::Scalar(Scalar::Boolean { .. }), Value::Bool(x), Value::Bool(y)) => x.cmp(y),
        (TypeIr::Enumeration(values), Value::Text(x), Value::Text(y)) => {
            let pos = |s: &str| values.iter().position(|e| e == s);
            pos(x).cmp(&pos(y))
        }
        (TypeIr::ListOf { inner, .. }, Value::List(xs), Value::List(ys)) => xs.len().cmp(&ys.len()).then_with(|| {
            xs.iter()
                .zip(ys)
                .map(|(x, y)| compare_size(inner, x, y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        }),
        (TypeIr::TupleOf(fields), Value::Tuple(xs), Value::Tuple(ys)) => fields
            .iter()
            .zip(xs.iter().zip(ys))
            .map(|(f, ((_, x), (_, y)))| compare_size(&f.ir, x, y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal),
        (TypeIr::ChoiceOf(alts), Value::Choice(i, x), Value::Choice(j, y)) => {
            i.cmp(j).then_with(|| match alts.get(*i) {
                Some(alt) if i == j => compare_size(&alt.ir, x, y),
                _ => Ordering::Equal,
            })
        }
        _ => Ordering::Equal,
    }
}

/// Result of greedy shrinking.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkOutcome {
    pub value: Value,
    /// Successful descents (a candidate that still failed was adopted).
    pub steps: usize,
    /// Property evaluations performed while shrinking.
    pub evaluations: usize,
    /// The step limit was hit before a local minimum was reached.
    pub exhausted: bool,
}

/// Greedy first-failing-candidate descent: repeatedly adopt the first
/// candidate (after hooks) for which `still_fails` holds, until none does
/// or `max_steps` descents have been made.
pub fn shrink_to_minimum(
    root: &NamedIr,
    failing: Value,
    hooks: &TransformHooks,
    max_steps: usize,
    mut still_fails: impl FnMut(&Value) -> bool,
) -> ShrinkOutcome {
    let mut current = failing;
    let mut steps = 0;
    let mut evaluations = 0;
    'descend: while steps < max_steps {
        for candidate in shrink_candidates(&root.ir, &current) {
            let candidate = hooks.apply(root, candidate);
            if candidate == current || !conforms(&root.ir, &candidate) {
                continue;
            }
            evaluations += 1;
            if still_fails(&candidate) {
                current = candidate;
                steps += 1;
                continue 'descend;
            }
        }
        return ShrinkOutcome {
            value: current,
            steps,
            evaluations,
            exhausted: false,
        };
    }
    ShrinkOutcome {
        value: current,
        steps,
        evaluations,
        exhausted: true,
    }
}

fn int_target(min: Bound<i128>, max: Bound<i128>) -> i128 {
    let mut t = 0;
    if let Bound::Finite(lo) = min {
        t = t.max(lo);
    }
    if let Bound::Finite(hi) = max {
        t = t.min(hi);
    }
    t
}

fn float_target(min: Bound<f64>, max: Bound<f64>) -> f64 {
    let mut t = 0.0f64;
    if let Bound::Finite(lo) = min {
        if lo > t {
            t = lo;
        }
    }
    if let Bound::Finite(hi) = max {
        if hi < t {
            t = hi;
        }
    }
    t
}

/// The admissible float nearest zero: the target itself, or its neighbour
/// inside the range when the target is an exclusive bound.
fn admissible_float_target(min: Bound<f64>, max: Bound<f64>, min_open: bool, max_open: bool) -> Option<f64> {
    let t = float_target(min, max);
    let ok = |x: f64| float_in_range(x, min, max, min_open, max_open);
    if ok(t) {
        return Some(t);
    }
    let inside = if min.finite() == Some(t) {
        t.next_up()
    } else {
        t.next_down()
    };
    ok(inside).then_some(inside)
}

fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

/// Rounds toward zero; values beyond 2^52 are already integral.
fn trunc(x: f64) -> f64 {
    if abs(x) < 4_503_599_627_370_496.0 {
        (x as i64) as f64
    } else {
        x
    }
}

fn dedup(values: &mut Vec<Value>) {
    let mut kept: Vec<Value> = Vec::with_capacity(values.len());
    for v in values.drain(..) {
        if !kept.contains(&v) {
            kept.push(v);
        }
    }
    *values = kept;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Wire;
    use alloc::string::String;

    #[test]
    fn single_char_string_shrinks_to_empty_first() {
        let cands = shrink_candidates(&TypeIr::string(), &Value::List(vec![Value::Int(46)]));
        assert_eq!(cands.first(), Some(&Value::List(vec![])));
    }

    #[test]
    fn integer_at_its_bound_is_minimal() {
        let ir = TypeIr::integer(Bound::Finite(1), Bound::Infinite, Wire::Text);
        assert!(shrink_candidates(&ir, &Value::Int(1)).is_empty());
    }

    #[test]
    fn unbounded_integer_halves_toward_zero() {
        let ir = TypeIr::integer(Bound::Infinite, Bound::Infinite, Wire::Text);
        let cands = shrink_candidates(&ir, &Value::Int(37));
        assert_eq!(cands[0], Value::Int(0));
        assert!(cands.contains(&Value::Int(19)) || cands.contains(&Value::Int(18)));
        let neg = shrink_candidates(&ir, &Value::Int(-37));
        assert_eq!(neg[0], Value::Int(0));
        assert!(neg.contains(&Value::Int(-19)));
    }

    #[test]
    fn enumeration_prefers_earlier_members() {
        let ir = TypeIr::Enumeration(vec!["visa".into(), "paypal".into(), "deposit".into()]);
        assert_eq!(
            shrink_candidates(&ir, &Value::Text("deposit".into())),
            vec![Value::Text("visa".into()), Value::Text("paypal".into())]
        );
        assert!(shrink_candidates(&ir, &Value::Text("visa".into())).is_empty());
    }

    #[test]
    fn choice_prefers_lower_alternative() {
        let alt = |name: &str, ir: TypeIr| NamedIr {
            local_name: name.into(),
            ancestor_path: vec![],
            namespace: String::new(),
            type_name: None,
            part: None,
            ir,
        };
        let ir = TypeIr::ChoiceOf(vec![
            alt("a", TypeIr::Scalar(Scalar::Boolean { wire: Wire::Native })),
            alt("b", TypeIr::string()),
        ]);
        let v = Value::Choice(1, Box::new(Value::chars("x")));
        let cands = shrink_candidates(&ir, &v);
        assert_eq!(cands[0], Value::Choice(0, Box::new(Value::Bool(false))));
        assert!(cands.contains(&Value::Choice(1, Box::new(Value::List(vec![])))));
    }

    #[test]
    fn greedy_descent_counts_successful_steps() {
        let root = NamedIr {
            local_name: "delete".into(),
            ancestor_path: vec![],
            namespace: String::new(),
            type_name: None,
            part: Some(1),
            ir: TypeIr::TupleOf(vec![
                NamedIr {
                    local_name: "in".into(),
                    ancestor_path: vec!["delete_1".into()],
                    namespace: String::new(),
                    type_name: None,
                    part: None,
                    ir: TypeIr::string(),
                },
                NamedIr {
                    local_name: "c".into(),
                    ancestor_path: vec!["delete_1".into()],
                    namespace: String::new(),
                    type_name: None,
                    part: None,
                    ir: TypeIr::string(),
                },
            ]),
        };
        let failing = Value::tuple([("in", Value::chars(".")), ("c", Value::chars(""))]);
        let fails = |v: &Value| v.field("c").is_some_and(|c| c == &Value::List(vec![]));
        let out = shrink_to_minimum(&root, failing, &TransformHooks::new(), 10_000, fails);
        assert_eq!(
            out.value,
            Value::tuple([("in", Value::chars("")), ("c", Value::chars(""))])
        );
        assert_eq!(out.steps, 1);
        assert!(!out.exhausted);
    }
}
