//! Tree-shaped intermediate representation of message types. Each node maps
//! one-to-one onto a generator: scalars and enumerations are the leaves;
//! lists, tuples and choices are the only interior nodes.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// One end of a range. Which infinity `Infinite` stands for depends on the
/// side it sits on: negative for a lower bound, positive for an upper one.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Bound<T> {
    Finite(T),
    Infinite,
}

impl<T: Copy> Bound<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Bound<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => v.fmt(f),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

/// Whether a scalar is converted to text before it is placed on the wire
/// (`Text`) or handed over as-is (`Native`). A list of native integers is a
/// character string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wire {
    Native,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Integer {
        min: Bound<i128>,
        max: Bound<i128>,
        wire: Wire,
    },
    Float {
        min: Bound<f64>,
        max: Bound<f64>,
        min_open: bool,
        max_open: bool,
        wire: Wire,
    },
    Boolean {
        wire: Wire,
    },
}

impl Scalar {
    pub fn wire(&self) -> Wire {
        match self {
            Scalar::Integer { wire, .. } | Scalar::Float { wire, .. } | Scalar::Boolean { wire } => *wire,
        }
    }

    pub fn with_wire(mut self, new: Wire) -> Self {
        match &mut self {
            Scalar::Integer { wire, .. } | Scalar::Float { wire, .. } | Scalar::Boolean { wire } => *wire = new,
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeIr {
    Scalar(Scalar),
    Enumeration(Vec<String>),
    ListOf {
        min_len: u64,
        max_len: Bound<u64>,
        inner: Box<TypeIr>,
    },
    TupleOf(Vec<NamedIr>),
    ChoiceOf(Vec<NamedIr>),
}

/// A node together with the element naming information it was lowered from.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedIr {
    pub local_name: String,
    /// Path components from the operation root down to the enclosing node.
    pub ancestor_path: Vec<String>,
    /// Namespace the element is serialized in; empty when unqualified.
    pub namespace: String,
    /// Name of the user-defined schema type of the element, if it has one.
    pub type_name: Option<String>,
    /// Message part position for operation roots (the `_1` in `Order_1`).
    pub part: Option<u32>,
    pub ir: TypeIr,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IrError {
    #[error("empty range at {0}")]
    EmptyRange(String),
    #[error("enumeration at {0} is empty or has duplicate values")]
    BadEnumeration(String),
    #[error("choice at {0} has no alternatives")]
    EmptyChoice(String),
}

impl TypeIr {
    pub fn integer(min: Bound<i128>, max: Bound<i128>, wire: Wire) -> Self {
        TypeIr::Scalar(Scalar::Integer { min, max, wire })
    }

    pub fn float(min: Bound<f64>, max: Bound<f64>, wire: Wire) -> Self {
        TypeIr::Scalar(Scalar::Float {
            min,
            max,
            min_open: false,
            max_open: false,
            wire,
        })
    }

    pub fn list(min_len: u64, max_len: Bound<u64>, inner: TypeIr) -> Self {
        TypeIr::ListOf {
            min_len,
            max_len,
            inner: Box::new(inner),
        }
    }

    /// The string mapping: any number of printable ASCII character codes.
    pub fn string() -> Self {
        TypeIr::list(
            0,
            Bound::Infinite,
            TypeIr::integer(Bound::Finite(32), Bound::Finite(127), Wire::Native),
        )
    }

    /// A list of native integers travels as one character string rather
    /// than as repeated elements.
    pub fn is_char_list(&self) -> bool {
        matches!(
            self,
            TypeIr::ListOf { inner, .. }
                if matches!(**inner, TypeIr::Scalar(Scalar::Integer { wire: Wire::Native, .. }))
        )
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TypeIr::Scalar(_) | TypeIr::Enumeration(_))
    }

    /// Checks the structural invariants: non-empty ranges, distinct
    /// non-empty enumerations, non-empty choices.
    pub fn check(&self) -> Result<(), IrError> {
        self.check_at("root")
    }

    fn check_at(&self, at: &str) -> Result<(), IrError> {
        match self {
            TypeIr::Scalar(Scalar::Integer { min, max, .. }) => {
                if let (Bound::Finite(lo), Bound::Finite(hi)) = (min, max) {
                    if lo > hi {
                        return Err(IrError::EmptyRange(at.to_string()));
                    }
                }
                Ok(())
            }
            TypeIr::Scalar(Scalar::Float {
                min,
                max,
                min_open,
                max_open,
                ..
            }) => {
                let bad_end = |b: &Bound<f64>| matches!(b, Bound::Finite(v) if !v.is_finite());
                if bad_end(min) || bad_end(max) {
                    return Err(IrError::EmptyRange(at.to_string()));
                }
                if let (Bound::Finite(lo), Bound::Finite(hi)) = (min, max) {
                    if lo > hi || (lo == hi && (*min_open || *max_open)) {
                        return Err(IrError::EmptyRange(at.to_string()));
                    }
                }
                Ok(())
            }
            TypeIr::Scalar(Scalar::Boolean { .. }) => Ok(()),
            TypeIr::Enumeration(values) => {
                let distinct = values.iter().enumerate().all(|(i, v)| !values[..i].contains(v));
                if values.is_empty() || !distinct {
                    return Err(IrError::BadEnumeration(at.to_string()));
                }
                Ok(())
            }
            TypeIr::ListOf {
                min_len,
                max_len,
                inner,
            } => {
                if let Bound::Finite(hi) = max_len {
                    if min_len > hi {
                        return Err(IrError::EmptyRange(at.to_string()));
                    }
                }
                inner.check_at(at)
            }
            TypeIr::TupleOf(fields) => fields.iter().try_for_each(|f| f.ir.check_at(&path_id(f))),
            TypeIr::ChoiceOf(alts) => {
                if alts.is_empty() {
                    return Err(IrError::EmptyChoice(at.to_string()));
                }
                alts.iter().try_for_each(|a| a.ir.check_at(&path_id(a)))
            }
        }
    }
}

impl NamedIr {
    /// This node's own path component, including the part suffix of roots.
    pub fn label(&self) -> String {
        match self.part {
            Some(p) => format!("{}_{}", self.local_name, p),
            None => self.local_name.clone(),
        }
    }

    /// This node's label followed by its user-defined type name, if any,
    /// e.g. `shipInfo_ShipInfo`.
    pub fn content_label(&self) -> String {
        match &self.type_name {
            Some(t) => format!("{}_{}", self.label(), t),
            None => self.label(),
        }
    }

    /// Ancestor path handed down to this node's children: one component
    /// per ancestor node.
    pub fn child_path(&self) -> Vec<String> {
        let mut path = self.ancestor_path.clone();
        path.push(self.content_label());
        path
    }

    /// Name of the generator for this node's type content: the path id,
    /// followed by the type name for user-defined types.
    pub fn content_id(&self) -> String {
        self.child_path().join("_")
    }

    /// Every node of the tree in depth-first pre-order, the root included.
    pub fn walk(&self) -> Vec<&NamedIr> {
        let mut out = Vec::new();
        fn go<'a>(n: &'a NamedIr, out: &mut Vec<&'a NamedIr>) {
            out.push(n);
            n.ir.for_each_child(&mut |c| go(c, out));
        }
        go(self, &mut out);
        out
    }
}

impl TypeIr {
    /// Visits the named children reachable without crossing another named
    /// node (looks through list wrappers).
    pub fn for_each_child<'a>(&'a self, f: &mut dyn FnMut(&'a NamedIr)) {
        match self {
            TypeIr::ListOf { inner, .. } => inner.for_each_child(f),
            TypeIr::TupleOf(fields) | TypeIr::ChoiceOf(fields) => fields.iter().for_each(f),
            TypeIr::Scalar(_) | TypeIr::Enumeration(_) => {}
        }
    }
}

/// Unique generator name of a node: its ancestor path and label joined with
/// underscores, e.g. `Order_1_products_ProductType_price`.
pub fn path_id(n: &NamedIr) -> String {
    let mut parts: Vec<String> = n.ancestor_path.clone();
    parts.push(n.label());
    parts.join("_")
}
