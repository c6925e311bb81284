//! Post-generation transforms attached to generator paths.
//!
//! A hook receives the value generated (or shrunk) for the node whose
//! [`path_id`] it is registered under and returns a replacement, e.g. fixing
//! a check digit so an identifier is semantically valid. Hooks run bottom-up
//! after generation and after every shrink step. They are code, so they are
//! registered here rather than written into a genspec file.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ir::{path_id, NamedIr, TypeIr};
use crate::value::Value;

type Hook = Box<dyn Fn(Value) -> Value + Send + Sync>;

#[derive(Default)]
pub struct TransformHooks {
    hooks: BTreeMap<String, Hook>,
}

impl fmt::Debug for TransformHooks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.hooks.keys()).finish()
    }
}

impl TransformHooks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, path: impl Into<String>, hook: impl Fn(Value) -> Value + Send + Sync + 'static) {
        self.hooks.insert(path.into(), Box::new(hook));
    }

    pub fn is_empty(&self) -> bool {
        self.hooks.is_empty()
    }

    /// Applies every matching hook in the tree rooted at `root`, children
    /// before parents.
    pub fn apply(&self, root: &NamedIr, value: Value) -> Value {
        if self.hooks.is_empty() {
            return value;
        }
        self.named(root, value)
    }

    fn named(&self, node: &NamedIr, value: Value) -> Value {
        let value = self.content(&node.ir, value);
        match self.hooks.get(&path_id(node)) {
            Some(hook) => hook(value),
            None => value,
        }
    }

    fn content(&self, ir: &TypeIr, value: Value) -> Value {
        match (ir, value) {
            (TypeIr::ListOf { inner, .. }, Value::List(items)) => {
                Value::List(items.into_iter().map(|v| self.content(inner, v)).collect())
            }
            (TypeIr::TupleOf(fields), Value::Tuple(values)) if fields.len() == values.len() => Value::Tuple(
                fields
                    .iter()
                    .zip(values)
                    .map(|(f, (name, v))| (name, self.named(f, v)))
                    .collect::<Vec<_>>(),
            ),
            (TypeIr::ChoiceOf(alts), Value::Choice(i, inner)) if i < alts.len() => {
                Value::Choice(i, Box::new(self.named(&alts[i], *inner)))
            }
            (_, other) => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Bound, Wire};
    use alloc::vec;

    #[test]
    fn isbn_style_check_digit_hook() {
        let digit = TypeIr::integer(Bound::Finite(0), Bound::Finite(9), Wire::Text);
        let isbn = NamedIr {
            local_name: "ISBN".into(),
            ancestor_path: vec!["opName_1".into()],
            namespace: String::new(),
            type_name: None,
            part: None,
            ir: TypeIr::list(10, Bound::Finite(10), digit),
        };
        let root = NamedIr {
            local_name: "opName".into(),
            ancestor_path: vec![],
            namespace: String::new(),
            type_name: None,
            part: Some(1),
            ir: TypeIr::TupleOf(vec![isbn]),
        };
        // Adjust the first digit so the weighted sum is 0 mod 11.
        let mut hooks = TransformHooks::new();
        hooks.register("opName_1_ISBN", |v| {
            let Value::List(mut ds) = v else { return v };
            let digits: Vec<i128> = ds.iter().map(|d| if let Value::Int(x) = d { *x } else { 0 }).collect();
            let rest: i128 = digits
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, d)| (10 - i as i128) * d)
                .sum();
            let first = (0..10).find(|f| (10 * f + rest) % 11 == 0).unwrap_or(0);
            ds[0] = Value::Int(first);
            Value::List(ds)
        });
        let v = Value::tuple([("ISBN", Value::List((0..10).map(|_| Value::Int(1)).collect()))]);
        let fixed = hooks.apply(&root, v);
        let Some(Value::List(ds)) = fixed.field("ISBN") else {
            panic!()
        };
        let sum: i128 = ds
            .iter()
            .enumerate()
            .map(|(i, d)| if let Value::Int(x) = d { (10 - i as i128) * x } else { 0 })
            .sum();
        assert_eq!(sum % 11, 0);
    }
}
