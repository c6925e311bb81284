//! Named-generator specifications: the editable counterpart of a lowered
//! schema.
//!
//! A [`GenSpec`] holds one definition per IR node, named after the node
//! (see [`NamedIr::content_id`]), plus one stanza per operation naming the
//! definitions of its request and response roots. The text form is read by
//! [`GenSpec::parse`] and written by [`GenSpec::to_text`]:
//!
//! ```text
//! # comment
//! gen delete_1_c = list(0, inf, int(32, 127))
//! gen delete_1 = tuple(
//!     in: ref(delete_1_in),
//!     c: ref(delete_1_c)
//! )
//! operation delete input=delete_1 output=deleteResponse_1
//! ```
//!
//! Expressions: `int(lo, hi)`, `float(lo, hi)` (a `>` before the lower bound
//! or a `<` before the upper bound makes it exclusive), `bool`,
//! `enum("a", ...)`, `list(min, max, expr)`, `tuple(field: expr, ...)`,
//! `choice(field: expr, ...)`, `text_of(expr)` and `ref(name)`. Bounds are
//! numbers or `inf`. A field label is `[{namespace}]name[ as TypeName]`.
//! Scalars are passed to the encoder natively unless wrapped in `text_of`.

mod text;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ir::{path_id, Bound, NamedIr, Scalar, TypeIr, Wire};

#[derive(Debug, Clone, PartialEq)]
pub enum GenExpr {
    Int {
        lo: Bound<i128>,
        hi: Bound<i128>,
    },
    Float {
        lo: Bound<f64>,
        hi: Bound<f64>,
        lo_open: bool,
        hi_open: bool,
    },
    Bool,
    Enum(Vec<String>),
    List {
        min: u64,
        max: Bound<u64>,
        inner: Box<GenExpr>,
    },
    Tuple(Vec<Field>),
    Choice(Vec<Field>),
    TextOf(Box<GenExpr>),
    Ref(String),
}

/// A labelled member of a tuple or choice.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub name: String,
    /// Namespace the element is serialized in; empty when unqualified.
    pub namespace: String,
    pub type_name: Option<String>,
    pub expr: GenExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationStanza {
    pub op_name: String,
    pub input_gen: String,
    pub output_type: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GenSpec {
    /// In dependency order: every `ref` names an earlier definition.
    pub definitions: Vec<(String, GenExpr)>,
    pub operations: Vec<OperationStanza>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenSpecError {
    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("unknown generator `{name}`{}", at_line(*.line))]
    UnknownName { name: String, line: Option<usize> },
    #[error("generator cycle: {0}")]
    CycleError(String),
    #[error("generator `{name}`: {message}")]
    Invalid { name: String, message: String },
}

fn at_line(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}

/// Request and response roots of one successfully lowered operation.
#[derive(Debug, Clone, Copy)]
pub struct LoweredOperation<'a> {
    pub name: &'a str,
    pub input: &'a NamedIr,
    pub output: &'a NamedIr,
}

impl GenSpec {
    pub fn get(&self, name: &str) -> Option<&GenExpr> {
        self.definitions.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn operation(&self, op_name: &str) -> Option<&OperationStanza> {
        self.operations.iter().find(|o| o.op_name == op_name)
    }

    /// One definition per IR node, children before parents, and one stanza
    /// per operation.
    pub fn from_lowered(ops: &[LoweredOperation<'_>]) -> GenSpec {
        let mut emitter = Emitter::default();
        let mut operations = Vec::new();
        for op in ops {
            let input_gen = emitter.root(op.input);
            let output_type = emitter.root(op.output);
            operations.push(OperationStanza {
                op_name: op.name.to_string(),
                input_gen,
                output_type,
            });
        }
        GenSpec {
            definitions: emitter.defs,
            operations,
        }
    }

    /// Text form, starting with `header` as `#` comment lines.
    pub fn to_text(&self, header: &str) -> String {
        text::print(self, header)
    }

    /// Parses and validates a complete spec. Definitions may appear in any
    /// order; they are put in dependency order.
    pub fn parse(input: &str) -> Result<GenSpec, GenSpecError> {
        let (spec, lines) = text::parse(input)?;
        spec.validated(&lines)
    }

    /// Parses without resolving references, for override files that refer
    /// to definitions of the spec they are merged into.
    pub fn parse_unchecked(input: &str) -> Result<GenSpec, GenSpecError> {
        text::parse(input).map(|(spec, _)| spec)
    }

    /// Replaces definitions and operation stanzas of `self` by the
    /// same-named ones in `overrides`, then validates the result.
    pub fn merge_overrides(&self, overrides: &GenSpec) -> Result<GenSpec, GenSpecError> {
        let mut merged = self.clone();
        for (name, expr) in &overrides.definitions {
            let slot =
                merged
                    .definitions
                    .iter_mut()
                    .find(|(n, _)| n == name)
                    .ok_or_else(|| GenSpecError::UnknownName {
                        name: name.clone(),
                        line: None,
                    })?;
            slot.1 = expr.clone();
        }
        for op in &overrides.operations {
            let slot = merged
                .operations
                .iter_mut()
                .find(|o| o.op_name == op.op_name)
                .ok_or_else(|| GenSpecError::UnknownName {
                    name: op.op_name.clone(),
                    line: None,
                })?;
            *slot = op.clone();
        }
        merged.validated(&BTreeMap::new())
    }

    /// The IR of definition `name` with references inlined. Field paths are
    /// rebuilt from the labels, starting from `[name]`.
    pub fn to_ir(&self, name: &str) -> Result<TypeIr, GenSpecError> {
        let expr = self.get(name).ok_or_else(|| GenSpecError::UnknownName {
            name: name.to_string(),
            line: None,
        })?;
        let mut seen = BTreeSet::new();
        seen.insert(name.to_string());
        let ir = self.expr_ir(expr, &[name.to_string()], name, &mut seen)?;
        ir.check().map_err(|e| GenSpecError::Invalid {
            name: name.to_string(),
            message: e.to_string(),
        })?;
        Ok(ir)
    }

    fn expr_ir(
        &self,
        expr: &GenExpr,
        path: &[String],
        def: &str,
        active: &mut BTreeSet<String>,
    ) -> Result<TypeIr, GenSpecError> {
        let invalid = |message: &str| GenSpecError::Invalid {
            name: def.to_string(),
            message: message.to_string(),
        };
        Ok(match expr {
            GenExpr::Int { lo, hi } => TypeIr::integer(*lo, *hi, Wire::Native),
            GenExpr::Float {
                lo,
                hi,
                lo_open,
                hi_open,
            } => TypeIr::Scalar(Scalar::Float {
                min: *lo,
                max: *hi,
                min_open: *lo_open,
                max_open: *hi_open,
                wire: Wire::Native,
            }),
            GenExpr::Bool => TypeIr::Scalar(Scalar::Boolean { wire: Wire::Native }),
            GenExpr::Enum(values) => TypeIr::Enumeration(values.clone()),
            GenExpr::List { min, max, inner } => TypeIr::list(*min, *max, self.expr_ir(inner, path, def, active)?),
            GenExpr::Tuple(fields) => TypeIr::TupleOf(self.fields_ir(fields, path, def, active)?),
            GenExpr::Choice(fields) => TypeIr::ChoiceOf(self.fields_ir(fields, path, def, active)?),
            GenExpr::TextOf(inner) => match self.expr_ir(inner, path, def, active)? {
                TypeIr::Scalar(s) if s.wire() == Wire::Native => TypeIr::Scalar(s.with_wire(Wire::Text)),
                _ => return Err(invalid("text_of applies to a plain int, float or bool only")),
            },
            GenExpr::Ref(target) => {
                let inner = self.get(target).ok_or_else(|| GenSpecError::UnknownName {
                    name: target.clone(),
                    line: None,
                })?;
                if !active.insert(target.clone()) {
                    return Err(GenSpecError::CycleError(format!("{def} -> {target}")));
                }
                let ir = self.expr_ir(inner, path, target, active);
                active.remove(target);
                ir?
            }
        })
    }

    fn fields_ir(
        &self,
        fields: &[Field],
        path: &[String],
        def: &str,
        active: &mut BTreeSet<String>,
    ) -> Result<Vec<NamedIr>, GenSpecError> {
        let mut out: Vec<NamedIr> = Vec::with_capacity(fields.len());
        for f in fields {
            if out.iter().any(|o| o.local_name == f.name) {
                return Err(GenSpecError::Invalid {
                    name: def.to_string(),
                    message: format!("duplicate field `{}`", f.name),
                });
            }
            let mut node = NamedIr {
                local_name: f.name.clone(),
                ancestor_path: path.to_vec(),
                namespace: f.namespace.clone(),
                type_name: f.type_name.clone(),
                part: None,
                ir: TypeIr::TupleOf(Vec::new()),
            };
            node.ir = self.expr_ir(&f.expr, &node.child_path(), def, active)?;
            out.push(node);
        }
        Ok(out)
    }

    /// Checks references, cycles and literals, and puts definitions in
    /// dependency order (stable for specs already in that order).
    fn validated(self, lines: &BTreeMap<String, usize>) -> Result<GenSpec, GenSpecError> {
        let index: BTreeMap<&str, usize> = self
            .definitions
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.as_str(), i))
            .collect();
        let unknown = |name: &str, from: &str| GenSpecError::UnknownName {
            name: name.to_string(),
            line: lines.get(from).copied(),
        };
        for (name, expr) in &self.definitions {
            let mut refs = Vec::new();
            expr.refs(&mut refs);
            if let Some(missing) = refs.iter().find(|r| !index.contains_key(r.as_str())) {
                return Err(unknown(missing, name));
            }
        }
        for op in &self.operations {
            for target in [&op.input_gen, &op.output_type] {
                if !index.contains_key(target.as_str()) {
                    return Err(GenSpecError::UnknownName {
                        name: target.clone(),
                        line: lines.get(&format!("operation {}", op.op_name)).copied(),
                    });
                }
            }
        }

        // Post-order DFS; grey nodes on the stack reveal cycles.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let n = self.definitions.len();
        let mut marks = alloc::vec![Mark::White; n];
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for start in 0..n {
            if marks[start] != Mark::White {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
            let deps = |i: usize| -> Vec<usize> {
                let mut refs = Vec::new();
                self.definitions[i].1.refs(&mut refs);
                refs.iter().map(|r| index[r.as_str()]).collect()
            };
            marks[start] = Mark::Grey;
            stack.push((start, deps(start), 0));
            while let Some((node, children, next)) = stack.last_mut() {
                if *next < children.len() {
                    let child = children[*next];
                    *next += 1;
                    match marks[child] {
                        Mark::White => {
                            marks[child] = Mark::Grey;
                            let d = deps(child);
                            stack.push((child, d, 0));
                        }
                        Mark::Grey => {
                            let from = stack.iter().position(|(i, _, _)| *i == child).unwrap_or(0);
                            let mut names: Vec<&str> = stack[from..]
                                .iter()
                                .map(|(i, _, _)| self.definitions[*i].0.as_str())
                                .collect();
                            names.push(self.definitions[child].0.as_str());
                            return Err(GenSpecError::CycleError(names.join(" -> ")));
                        }
                        Mark::Black => {}
                    }
                } else {
                    let node = *node;
                    marks[node] = Mark::Black;
                    order.push(node);
                    stack.pop();
                }
            }
        }

        let mut slots: Vec<Option<(String, GenExpr)>> = self.definitions.into_iter().map(Some).collect();
        let spec = GenSpec {
            definitions: order.into_iter().filter_map(|i| slots[i].take()).collect(),
            operations: self.operations,
        };
        for (name, _) in &spec.definitions {
            spec.to_ir(name)?;
        }
        Ok(spec)
    }
}

impl GenExpr {
    /// Names referenced directly by this expression, in order of appearance.
    pub fn refs(&self, out: &mut Vec<String>) {
        match self {
            GenExpr::Ref(name) => out.push(name.clone()),
            GenExpr::List { inner, .. } | GenExpr::TextOf(inner) => inner.refs(out),
            GenExpr::Tuple(fields) | GenExpr::Choice(fields) => fields.iter().for_each(|f| f.expr.refs(out)),
            GenExpr::Int { .. } | GenExpr::Float { .. } | GenExpr::Bool | GenExpr::Enum(_) => {}
        }
    }
}

#[derive(Default)]
struct Emitter {
    defs: Vec<(String, GenExpr)>,
}

impl Emitter {
    fn lookup(&self, name: &str) -> Option<&GenExpr> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// Defines a root and returns its name, suffixed if the natural name is
    /// taken by a different definition.
    fn root(&mut self, node: &NamedIr) -> String {
        let expr = self.content(&node.ir);
        let base = node.content_id();
        let mut name = base.clone();
        let mut k = 2;
        loop {
            match self.lookup(&name) {
                None => {
                    self.defs.push((name.clone(), expr));
                    return name;
                }
                Some(existing) if *existing == expr => return name,
                Some(_) => {
                    name = format!("{base}_{k}");
                    k += 1;
                }
            }
        }
    }

    /// Defines a non-root node and returns how its parent refers to it:
    /// by reference, or inline when its name is taken. A repeated element
    /// of a named type gets two definitions, the list under its path id and
    /// the type content under its content id.
    fn node(&mut self, node: &NamedIr) -> GenExpr {
        match &node.ir {
            TypeIr::ListOf {
                min_len,
                max_len,
                inner,
            } if node.type_name.is_some() && !node.ir.is_char_list() => {
                let content = self.content(inner);
                let item = self.define(node.content_id(), content);
                let list = GenExpr::List {
                    min: *min_len,
                    max: *max_len,
                    inner: Box::new(item),
                };
                self.define(path_id(node), list)
            }
            _ => {
                let content = self.content(&node.ir);
                self.define(node.content_id(), content)
            }
        }
    }

    fn define(&mut self, name: String, expr: GenExpr) -> GenExpr {
        match self.lookup(&name) {
            None => {
                self.defs.push((name.clone(), expr));
                GenExpr::Ref(name)
            }
            Some(existing) if *existing == expr => GenExpr::Ref(name),
            Some(_) => expr,
        }
    }

    fn content(&mut self, ir: &TypeIr) -> GenExpr {
        let scalar = |e: GenExpr, wire: Wire| match wire {
            Wire::Native => e,
            Wire::Text => GenExpr::TextOf(Box::new(e)),
        };
        match ir {
            TypeIr::Scalar(Scalar::Integer { min, max, wire }) => scalar(GenExpr::Int { lo: *min, hi: *max }, *wire),
            TypeIr::Scalar(Scalar::Float {
                min,
                max,
                min_open,
                max_open,
                wire,
            }) => scalar(
                GenExpr::Float {
                    lo: *min,
                    hi: *max,
                    lo_open: *min_open,
                    hi_open: *max_open,
                },
                *wire,
            ),
            TypeIr::Scalar(Scalar::Boolean { wire }) => scalar(GenExpr::Bool, *wire),
            TypeIr::Enumeration(values) => GenExpr::Enum(values.clone()),
            TypeIr::ListOf {
                min_len,
                max_len,
                inner,
            } => GenExpr::List {
                min: *min_len,
                max: *max_len,
                inner: Box::new(self.content(inner)),
            },
            TypeIr::TupleOf(fields) => GenExpr::Tuple(self.fields(fields)),
            TypeIr::ChoiceOf(alts) => GenExpr::Choice(self.fields(alts)),
        }
    }

    fn fields(&mut self, nodes: &[NamedIr]) -> Vec<Field> {
        nodes
            .iter()
            .map(|n| Field {
                name: n.local_name.clone(),
                namespace: n.namespace.clone(),
                type_name: n.type_name.clone(),
                expr: self.node(n),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests;
