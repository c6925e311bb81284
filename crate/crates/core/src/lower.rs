//! Depth-first lowering of schema declarations into [`TypeIr`] trees.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ir::{path_id, Bound, NamedIr, Scalar, TypeIr, Wire};
use crate::qname::QName;
use crate::schema::{
    Combinator, ComplexTypeDef, ElementDecl, FacetSet, MaxOccurs, OperationDef, SimpleDerivation, SimpleTypeDef,
    TypeRef, XsdSchema,
};

/// Nesting limit; schemas from the WSDL parser are already checked acyclic.
const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LowerError {
    #[error("unsupported built-in type xsd:{0}")]
    UnsupportedBuiltin(String),
    #[error("unsupported facet `{facet}` on {at}")]
    UnsupportedFacet { facet: String, at: String },
    #[error("contradictory facets on {0}: the value set is empty")]
    ContradictoryFacets(String),
    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),
    #[error("unsupported schema construct at {at}: {what}")]
    UnsupportedConstruct { what: String, at: String },
    #[error("type nesting too deep (recursive definition?) at {0}")]
    Recursive(String),
    #[error("two sibling elements share the generator name {0}")]
    DuplicatePath(String),
}

/// The built-in simple type table. Integer-family bounds are the exact
/// two's-complement limits of each type.
pub fn builtin_ir(name: &QName) -> Result<TypeIr, LowerError> {
    use Bound::{Finite, Infinite};
    let signed = |bits: u32| {
        TypeIr::integer(
            Finite(-(1i128 << (bits - 1))),
            Finite((1i128 << (bits - 1)) - 1),
            Wire::Text,
        )
    };
    let unsigned = |bits: u32| TypeIr::integer(Finite(0), Finite((1i128 << bits) - 1), Wire::Text);
    if !name.is_builtin() {
        return Err(LowerError::UnsupportedBuiltin(name.to_string()));
    }
    let ir = match name.local.as_str() {
        "boolean" => TypeIr::Scalar(Scalar::Boolean { wire: Wire::Native }),
        "float" | "double" => TypeIr::float(Infinite, Infinite, Wire::Text),
        "integer" | "decimal" => TypeIr::integer(Infinite, Infinite, Wire::Text),
        "nonPositiveInteger" => TypeIr::integer(Infinite, Finite(0), Wire::Text),
        "negativeInteger" => TypeIr::integer(Infinite, Finite(-1), Wire::Text),
        "long" => signed(64),
        "int" => signed(32).native(),
        "short" => signed(16),
        "byte" => signed(8),
        "nonNegativeInteger" => TypeIr::integer(Finite(0), Infinite, Wire::Text),
        "positiveInteger" => TypeIr::integer(Finite(1), Infinite, Wire::Text),
        "unsignedLong" => unsigned(64),
        "unsignedInt" => unsigned(32),
        "unsignedShort" => unsigned(16),
        "unsignedByte" => unsigned(8),
        "string" => TypeIr::string(),
        other => return Err(LowerError::UnsupportedBuiltin(other.to_string())),
    };
    Ok(ir)
}

impl TypeIr {
    fn native(self) -> TypeIr {
        match self {
            TypeIr::Scalar(s) => TypeIr::Scalar(s.with_wire(Wire::Native)),
            other => other,
        }
    }
}

/// Lowers a global element as message part 1 of an operation.
pub fn lower_element(schema: &XsdSchema, element: &QName) -> Result<NamedIr, LowerError> {
    lower_part(schema, element, 1)
}

/// Lowers a global element as the `part`-th message part (numbered from 1).
pub fn lower_part(schema: &XsdSchema, element: &QName, part: u32) -> Result<NamedIr, LowerError> {
    let decl = schema
        .element(element)
        .ok_or_else(|| LowerError::UnresolvedReference(format!("element {element}")))?;
    let mut lowering = Lowering { schema, depth: 0 };
    let root = lowering.element(decl, Vec::new(), Some(part))?;
    let mut seen = BTreeSet::new();
    for node in root.walk() {
        if !seen.insert(path_id(node)) {
            return Err(LowerError::DuplicatePath(path_id(node)));
        }
    }
    Ok(root)
}

/// Lowers a global type on its own, as a node labelled by the type name, so
/// its children's paths start at the type.
pub fn lower_type(schema: &XsdSchema, name: &QName) -> Result<NamedIr, LowerError> {
    let mut node = NamedIr {
        local_name: name.local.clone(),
        ancestor_path: Vec::new(),
        namespace: name.namespace.clone(),
        type_name: None,
        part: None,
        ir: TypeIr::TupleOf(Vec::new()),
    };
    let mut lowering = Lowering { schema, depth: 0 };
    node.ir = lowering.type_ref(name, node.child_path(), &path_id(&node))?;
    node.ir
        .check()
        .map_err(|_| LowerError::ContradictoryFacets(path_id(&node)))?;
    Ok(node)
}

pub fn lower_operation_input(schema: &XsdSchema, op: &OperationDef) -> Result<NamedIr, LowerError> {
    lower_element(schema, &op.input_element)
}

pub fn lower_operation_output(schema: &XsdSchema, op: &OperationDef) -> Result<NamedIr, LowerError> {
    lower_element(schema, &op.output_element)
}

/// Narrows the base type's IR by the facets of `def`.
pub fn lower_simple_type(schema: &XsdSchema, def: &SimpleTypeDef) -> Result<TypeIr, LowerError> {
    Lowering { schema, depth: 0 }.simple(def, &def.base.to_string())
}

struct Lowering<'a> {
    schema: &'a XsdSchema,
    depth: usize,
}

impl<'a> Lowering<'a> {
    fn element(
        &mut self,
        decl: &ElementDecl,
        ancestor_path: Vec<String>,
        part: Option<u32>,
    ) -> Result<NamedIr, LowerError> {
        let type_name = match &decl.type_ref {
            TypeRef::Named(q) if !q.is_builtin() => Some(q.local.clone()),
            _ => None,
        };
        let mut node = NamedIr {
            local_name: decl.name.local.clone(),
            ancestor_path,
            namespace: decl.name.namespace.clone(),
            type_name,
            part,
            ir: TypeIr::TupleOf(Vec::new()),
        };
        let content = self.type_ref(decl.type_ref.qname(), node.child_path(), &path_id(&node))?;
        node.ir = if decl.is_single() {
            content
        } else {
            // Repeated native integers would read as a character string.
            let inner = match content {
                TypeIr::Scalar(s @ Scalar::Integer { .. }) => TypeIr::Scalar(s.with_wire(Wire::Text)),
                other => other,
            };
            let max_len = match decl.max_occurs {
                MaxOccurs::Bounded(n) => Bound::Finite(n),
                MaxOccurs::Unbounded => Bound::Infinite,
            };
            TypeIr::list(decl.min_occurs, max_len, inner)
        };
        node.ir
            .check()
            .map_err(|_| LowerError::ContradictoryFacets(path_id(&node)))?;
        Ok(node)
    }

    fn type_ref(&mut self, name: &QName, child_path: Vec<String>, at: &str) -> Result<TypeIr, LowerError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(LowerError::Recursive(at.to_string()));
        }
        let result = if name.is_builtin() {
            builtin_ir(name)
        } else if let Some(st) = self.schema.simple_types.get(name) {
            self.simple(st, at)
        } else if let Some(ct) = self.schema.complex_types.get(name) {
            self.complex(ct, child_path, at)
        } else {
            Err(LowerError::UnresolvedReference(format!("type {name}")))
        };
        self.depth -= 1;
        result
    }

    fn simple(&mut self, def: &SimpleTypeDef, at: &str) -> Result<TypeIr, LowerError> {
        match def.derivation {
            SimpleDerivation::Restriction => {}
            SimpleDerivation::List => return Err(unsupported("list-derived simple type", at)),
            SimpleDerivation::Union => return Err(unsupported("union-derived simple type", at)),
        }
        let base = self.type_ref(&def.base, Vec::new(), at)?;
        apply_facets(base, &def.facets, at)
    }

    fn complex(&mut self, ct: &ComplexTypeDef, child_path: Vec<String>, at: &str) -> Result<TypeIr, LowerError> {
        if let Some(what) = &ct.unsupported {
            return Err(unsupported(what, at));
        }
        if let Some(base) = &ct.simple_content {
            return self.type_ref(base, child_path, at);
        }
        let mut decls: Vec<&ElementDecl> = Vec::new();
        self.collect_children(ct, &mut decls, at, 0)?;
        let fields = decls
            .into_iter()
            .map(|d| self.element(d, child_path.clone(), None))
            .collect::<Result<Vec<_>, _>>()?;
        match ct.combinator {
            Combinator::All | Combinator::Sequence => Ok(TypeIr::TupleOf(fields)),
            Combinator::Choice if fields.is_empty() => Err(unsupported("empty choice", at)),
            Combinator::Choice => Ok(TypeIr::ChoiceOf(fields)),
        }
    }

    fn collect_children(
        &self,
        ct: &'a ComplexTypeDef,
        out: &mut Vec<&'a ElementDecl>,
        at: &str,
        depth: usize,
    ) -> Result<(), LowerError> {
        if depth > MAX_DEPTH {
            return Err(LowerError::Recursive(at.to_string()));
        }
        if let Some(base) = &ct.extends {
            if !base.is_builtin() {
                let base_ct = self
                    .schema
                    .complex_types
                    .get(base)
                    .ok_or_else(|| LowerError::UnresolvedReference(format!("type {base}")))?;
                if let Some(what) = &base_ct.unsupported {
                    return Err(unsupported(what, at));
                }
                self.collect_children(base_ct, out, at, depth + 1)?;
            }
        }
        out.extend(ct.children.iter());
        Ok(())
    }
}

fn unsupported(what: &str, at: &str) -> LowerError {
    LowerError::UnsupportedConstruct {
        what: what.to_string(),
        at: at.to_string(),
    }
}

fn apply_facets(base: TypeIr, facets: &FacetSet, at: &str) -> Result<TypeIr, LowerError> {
    let facet_err = |facet: &str| LowerError::UnsupportedFacet {
        facet: facet.to_string(),
        at: at.to_string(),
    };
    let contradictory = || LowerError::ContradictoryFacets(at.to_string());
    if !facets.pattern.is_empty() {
        return Err(facet_err("pattern"));
    }
    if facets.min_inclusive.is_some() && facets.min_exclusive.is_some()
        || facets.max_inclusive.is_some() && facets.max_exclusive.is_some()
    {
        return Err(contradictory());
    }
    let has_bounds = facets.min_inclusive.is_some()
        || facets.min_exclusive.is_some()
        || facets.max_inclusive.is_some()
        || facets.max_exclusive.is_some();
    let has_length = facets.min_length.is_some() || facets.max_length.is_some();

    let mut ir = base;
    if has_bounds {
        ir = match ir {
            TypeIr::Scalar(Scalar::Integer { min, max, wire }) => {
                let (mut min, mut max) = (min, max);
                if let Some(v) = &facets.min_inclusive {
                    min = tighten_min(min, decimal_ceil(v).ok_or_else(|| facet_err("minInclusive"))?);
                }
                if let Some(v) = &facets.min_exclusive {
                    let d = parse_decimal(v).ok_or_else(|| facet_err("minExclusive"))?;
                    min = tighten_min(min, d.floor() + 1);
                }
                if let Some(v) = &facets.max_inclusive {
                    max = tighten_max(max, decimal_floor(v).ok_or_else(|| facet_err("maxInclusive"))?);
                }
                if let Some(v) = &facets.max_exclusive {
                    let d = parse_decimal(v).ok_or_else(|| facet_err("maxExclusive"))?;
                    max = tighten_max(max, d.ceil() - 1);
                }
                TypeIr::Scalar(Scalar::Integer { min, max, wire })
            }
            TypeIr::Scalar(Scalar::Float {
                mut min,
                mut max,
                mut min_open,
                mut max_open,
                wire,
            }) => {
                let num = |v: &String, f: &str| parse_float(v).ok_or_else(|| facet_err(f));
                if let Some(v) = &facets.min_inclusive {
                    (min, min_open) = tighten_float_min((min, min_open), num(v, "minInclusive")?, false);
                }
                if let Some(v) = &facets.min_exclusive {
                    (min, min_open) = tighten_float_min((min, min_open), num(v, "minExclusive")?, true);
                }
                if let Some(v) = &facets.max_inclusive {
                    (max, max_open) = tighten_float_max((max, max_open), num(v, "maxInclusive")?, false);
                }
                if let Some(v) = &facets.max_exclusive {
                    (max, max_open) = tighten_float_max((max, max_open), num(v, "maxExclusive")?, true);
                }
                TypeIr::Scalar(Scalar::Float {
                    min,
                    max,
                    min_open,
                    max_open,
                    wire,
                })
            }
            _ => return Err(facet_err("min/max bound")),
        };
    }
    if has_length {
        ir = match ir {
            TypeIr::ListOf {
                min_len,
                max_len,
                inner,
            } => {
                let min_len = facets.min_length.map_or(min_len, |m| m.max(min_len));
                let max_len = match (facets.max_length, max_len) {
                    (Some(m), Bound::Finite(old)) => Bound::Finite(m.min(old)),
                    (Some(m), Bound::Infinite) => Bound::Finite(m),
                    (None, old) => old,
                };
                TypeIr::ListOf {
                    min_len,
                    max_len,
                    inner,
                }
            }
            TypeIr::Enumeration(values) => TypeIr::Enumeration(
                values
                    .into_iter()
                    .filter(|v| {
                        let n = v.chars().count() as u64;
                        facets.min_length.is_none_or(|m| n >= m) && facets.max_length.is_none_or(|m| n <= m)
                    })
                    .collect(),
            ),
            _ => return Err(facet_err("length")),
        };
    }
    if let Some(values) = &facets.enumeration {
        let mut kept: Vec<String> = Vec::new();
        for v in values {
            if enum_admissible(&ir, v) && !kept.contains(v) {
                kept.push(v.clone());
            }
        }
        if kept.is_empty() {
            return Err(contradictory());
        }
        ir = TypeIr::Enumeration(kept);
    }
    ir.check().map_err(|_| contradictory())?;
    Ok(ir)
}

/// Whether an enumeration literal belongs to the value set of `base`.
/// Character ranges are not applied to string literals: they restrict what
/// the generator invents, not what a schema may enumerate.
fn enum_admissible(base: &TypeIr, literal: &str) -> bool {
    match base {
        TypeIr::Scalar(Scalar::Integer { min, max, .. }) => {
            let Some(v) = literal.trim().parse::<i128>().ok() else {
                return false;
            };
            min.finite().is_none_or(|lo| v >= lo) && max.finite().is_none_or(|hi| v <= hi)
        }
        TypeIr::Scalar(Scalar::Float {
            min,
            max,
            min_open,
            max_open,
            ..
        }) => {
            let Some(v) = parse_float(literal) else {
                return false;
            };
            let above = match min {
                Bound::Finite(lo) => v > *lo || (!min_open && v == *lo),
                Bound::Infinite => true,
            };
            let below = match max {
                Bound::Finite(hi) => v < *hi || (!max_open && v == *hi),
                Bound::Infinite => true,
            };
            above && below
        }
        TypeIr::Scalar(Scalar::Boolean { .. }) => matches!(literal.trim(), "true" | "false" | "1" | "0"),
        TypeIr::Enumeration(values) => values.iter().any(|v| v == literal),
        TypeIr::ListOf { min_len, max_len, .. } => {
            let n = literal.chars().count() as u64;
            n >= *min_len && max_len.finite().is_none_or(|hi| n <= hi)
        }
        TypeIr::TupleOf(_) | TypeIr::ChoiceOf(_) => false,
    }
}

fn tighten_min(old: Bound<i128>, new: i128) -> Bound<i128> {
    match old {
        Bound::Finite(o) if o >= new => old,
        _ => Bound::Finite(new),
    }
}

fn tighten_max(old: Bound<i128>, new: i128) -> Bound<i128> {
    match old {
        Bound::Finite(o) if o <= new => old,
        _ => Bound::Finite(new),
    }
}

fn tighten_float_min(old: (Bound<f64>, bool), v: f64, open: bool) -> (Bound<f64>, bool) {
    match old.0 {
        Bound::Finite(o) if o > v => old,
        Bound::Finite(o) if o == v => (old.0, old.1 || open),
        _ => (Bound::Finite(v), open),
    }
}

fn tighten_float_max(old: (Bound<f64>, bool), v: f64, open: bool) -> (Bound<f64>, bool) {
    match old.0 {
        Bound::Finite(o) if o < v => old,
        Bound::Finite(o) if o == v => (old.0, old.1 || open),
        _ => (Bound::Finite(v), open),
    }
}

/// An exact decimal literal split into its truncated integer part and
/// whether a non-zero fraction was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Decimal {
    truncated: i128,
    negative: bool,
    has_fraction: bool,
}

impl Decimal {
    fn floor(self) -> i128 {
        if self.has_fraction && self.negative {
            self.truncated - 1
        } else {
            self.truncated
        }
    }

    fn ceil(self) -> i128 {
        if self.has_fraction && !self.negative {
            self.truncated + 1
        } else {
            self.truncated
        }
    }
}

fn parse_decimal(text: &str) -> Option<Decimal> {
    let text = text.trim();
    let (negative, digits) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let magnitude: i128 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    Some(Decimal {
        truncated: if negative { -magnitude } else { magnitude },
        negative,
        has_fraction: frac_part.bytes().any(|b| b != b'0'),
    })
}

fn decimal_ceil(text: &str) -> Option<i128> {
    parse_decimal(text).map(Decimal::ceil)
}

fn decimal_floor(text: &str) -> Option<i128> {
    parse_decimal(text).map(Decimal::floor)
}

/// XSD float/double lexical form restricted to finite values.
pub(crate) fn parse_float(text: &str) -> Option<f64> {
    let t = text.trim();
    if t.is_empty() || t.contains(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}
