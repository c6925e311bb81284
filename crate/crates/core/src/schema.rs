//! Parsed service description: operations, endpoint and the XSD type
//! definitions their messages reference.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::qname::QName;

#[derive(Debug, Clone, PartialEq)]
pub struct WsdlModel {
    pub service_name: String,
    pub endpoint_url: String,
    pub operations: Vec<OperationDef>,
    pub schema: XsdSchema,
}

impl WsdlModel {
    pub fn operation(&self, name: &str) -> Option<&OperationDef> {
        self.operations.iter().find(|op| op.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoapStyle {
    DocumentLiteral,
    RpcLiteral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationDef {
    pub name: String,
    /// May be empty; sent quoted in the SOAPAction header either way.
    pub soap_action: String,
    pub input_element: QName,
    pub output_element: QName,
    pub style: SoapStyle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxOccurs {
    Bounded(u64),
    Unbounded,
}

/// How an element names its content type. Anonymous inline types are stored
/// in the schema maps under a synthetic name derived from the element path
/// (see [`anonymous_type_name`]); they never contribute to generator names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeRef {
    Named(QName),
    Anonymous(QName),
}

impl TypeRef {
    pub fn qname(&self) -> &QName {
        match self {
            TypeRef::Named(q) | TypeRef::Anonymous(q) => q,
        }
    }
}

/// Synthetic type name for an anonymous type nested under `element_path`.
/// `#` cannot occur in an NCName, so these never clash with declared types.
pub fn anonymous_type_name(namespace: &str, element_path: &str) -> QName {
    QName::new(namespace, format!("{element_path}#type"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementDecl {
    /// Name as serialized on the wire: the namespace is empty for
    /// unqualified local elements.
    pub name: QName,
    pub type_ref: TypeRef,
    pub min_occurs: u64,
    pub max_occurs: MaxOccurs,
}

impl ElementDecl {
    pub fn is_single(&self) -> bool {
        self.min_occurs == 1 && self.max_occurs == MaxOccurs::Bounded(1)
    }
}

/// Facet values are kept as lexical text and interpreted against the base
/// type during lowering, so integer bounds stay exact.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FacetSet {
    pub min_inclusive: Option<String>,
    pub max_inclusive: Option<String>,
    pub min_exclusive: Option<String>,
    pub max_exclusive: Option<String>,
    pub enumeration: Option<Vec<String>>,
    pub min_length: Option<u64>,
    pub max_length: Option<u64>,
    pub pattern: Vec<String>,
}

impl FacetSet {
    pub fn is_empty(&self) -> bool {
        *self == FacetSet::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimpleDerivation {
    Restriction,
    List,
    Union,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleTypeDef {
    pub base: QName,
    pub derivation: SimpleDerivation,
    pub facets: FacetSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combinator {
    All,
    Sequence,
    Choice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexTypeDef {
    pub combinator: Combinator,
    pub children: Vec<ElementDecl>,
    /// complexContent extension base; its children precede ours.
    pub extends: Option<QName>,
    /// simpleContent: the element carries text of this simple type.
    pub simple_content: Option<QName>,
    /// Content the lowering cannot express (nested groups, `any`, ...).
    pub unsupported: Option<String>,
}

impl ComplexTypeDef {
    pub fn new(combinator: Combinator, children: Vec<ElementDecl>) -> Self {
        ComplexTypeDef {
            combinator,
            children,
            extends: None,
            simple_content: None,
            unsupported: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct XsdSchema {
    pub target_namespace: String,
    pub elements: BTreeMap<QName, ElementDecl>,
    pub simple_types: BTreeMap<QName, SimpleTypeDef>,
    pub complex_types: BTreeMap<QName, ComplexTypeDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("unresolved reference to {kind} {name} (from {from})")]
    UnresolvedReference {
        kind: &'static str,
        name: String,
        from: String,
    },
    #[error("recursive type definition: {0}")]
    Recursive(String),
    #[error("{0} is declared both as a simple and a complex type")]
    DuplicateType(String),
}

impl XsdSchema {
    pub fn element(&self, name: &QName) -> Option<&ElementDecl> {
        self.elements.get(name)
    }

    /// Every type name used by a declaration must resolve to a built-in or
    /// a declared type, and no name may be both simple and complex.
    pub fn check_references(&self) -> Result<(), SchemaError> {
        for name in self.simple_types.keys() {
            if self.complex_types.contains_key(name) {
                return Err(SchemaError::DuplicateType(format!("{name}")));
            }
        }
        let resolves =
            |q: &QName| q.is_builtin() || self.simple_types.contains_key(q) || self.complex_types.contains_key(q);
        let unresolved = |name: &QName, from: &dyn core::fmt::Display| SchemaError::UnresolvedReference {
            kind: "type",
            name: format!("{name}"),
            from: format!("{from}"),
        };
        for (name, el) in &self.elements {
            if !resolves(el.type_ref.qname()) {
                return Err(unresolved(el.type_ref.qname(), name));
            }
        }
        for (name, st) in &self.simple_types {
            if !resolves(&st.base) || self.complex_types.contains_key(&st.base) {
                return Err(unresolved(&st.base, name));
            }
        }
        for (name, ct) in &self.complex_types {
            for child in &ct.children {
                if !resolves(child.type_ref.qname()) {
                    return Err(unresolved(child.type_ref.qname(), name));
                }
            }
            if let Some(base) = &ct.extends {
                if !self.complex_types.contains_key(base) && !base.is_builtin() {
                    return Err(unresolved(base, name));
                }
            }
            if let Some(base) = &ct.simple_content {
                if !resolves(base) {
                    return Err(unresolved(base, name));
                }
            }
        }
        Ok(())
    }

    /// Rejects complex types reachable from themselves, through child
    /// elements or extension bases, and simple types derived from themselves.
    pub fn check_acyclic(&self) -> Result<(), SchemaError> {
        let mut done = BTreeSet::new();
        for name in self.complex_types.keys() {
            let mut stack = Vec::new();
            self.visit_complex(name, &mut stack, &mut done)?;
        }
        for start in self.simple_types.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = start;
            while let Some(st) = self.simple_types.get(cur) {
                if !seen.insert(cur) {
                    return Err(SchemaError::Recursive(format!("{start}")));
                }
                cur = &st.base;
            }
        }
        Ok(())
    }

    fn visit_complex<'a>(
        &'a self,
        name: &'a QName,
        stack: &mut Vec<&'a QName>,
        done: &mut BTreeSet<&'a QName>,
    ) -> Result<(), SchemaError> {
        if done.contains(name) {
            return Ok(());
        }
        if stack.contains(&name) {
            let mut path: Vec<String> = stack.iter().map(|q| q.local.clone()).collect();
            path.push(name.local.clone());
            return Err(SchemaError::Recursive(path.join(" -> ")));
        }
        let Some(ct) = self.complex_types.get(name) else {
            return Ok(());
        };
        stack.push(name);
        let children = ct.children.iter().map(|c| c.type_ref.qname());
        for next in children.chain(ct.extends.iter()) {
            if self.complex_types.contains_key(next) {
                self.visit_complex(next, stack, done)?;
            }
        }
        stack.pop();
        done.insert(name);
        Ok(())
    }
}
