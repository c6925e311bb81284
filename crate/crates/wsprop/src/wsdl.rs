//! WSDL 1.1 documents into a [`WsdlModel`].
//!
//! Inline schemas and everything reachable through `wsdl:import`,
//! `xsd:import` and `xsd:include` are merged into one [`XsdSchema`]. Only
//! the first SOAP 1.1 port of the first service that has one is used; SOAP
//! 1.2 and HTTP bindings are ignored.

use std::collections::{BTreeMap, BTreeSet};

use roxmltree::{Document, Node, ParsingOptions};
use wsprop_core::schema::{anonymous_type_name, SchemaError};
use wsprop_core::{
    Combinator, ComplexTypeDef, ElementDecl, FacetSet, MaxOccurs, OperationDef, QName, SimpleDerivation, SimpleTypeDef,
    SoapStyle, TypeRef, WsdlModel, XsdSchema, XSD_NS,
};

use crate::transport::{Endpoint, TransportError};

pub const WSDL_NS: &str = "http://schemas.xmlsoap.org/wsdl/";
pub const WSDL2_NS: &str = "http://www.w3.org/ns/wsdl";
pub const SOAP11_BINDING_NS: &str = "http://schemas.xmlsoap.org/wsdl/soap/";
const SOAP_ENC_NS: &str = "http://schemas.xmlsoap.org/soap/encoding/";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WsdlError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("unsupported WSDL: {0}")]
    UnsupportedWsdl(String),
    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),
    #[error("import cycle: {0}")]
    ImportCycle(String),
    #[error("fetching {url}: {source}")]
    Transport { url: String, source: TransportError },
}

/// An operation of the chosen binding that the model leaves out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedOperation {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedWsdl {
    pub model: WsdlModel,
    pub skipped: Vec<SkippedOperation>,
}

/// Parses a WSDL document given as text. Imports are fetched through `ep`,
/// resolved against `base_url`.
pub fn parse_wsdl(document: &str, base_url: &str, ep: &mut dyn Endpoint) -> Result<WsdlModel, WsdlError> {
    parse_wsdl_bytes(document.as_bytes(), base_url, ep).map(|p| p.model)
}

/// Parses raw document bytes (UTF-8 or UTF-16, with or without a BOM).
pub fn parse_wsdl_bytes(bytes: &[u8], base_url: &str, ep: &mut dyn Endpoint) -> Result<ParsedWsdl, WsdlError> {
    let mut loader = Loader {
        ep,
        done: BTreeSet::new(),
        in_progress: Vec::new(),
        defs: Definitions::default(),
    };
    loader.load_bytes(bytes, base_url, None)?;
    loader.defs.finish()
}

/// Decodes document bytes to text. UTF-16 is recognised by its byte order
/// mark or by the byte pattern of a leading `<?`; a declared encoding other
/// than UTF-8 or UTF-16 is rejected.
pub fn decode_document(bytes: &[u8]) -> Result<String, WsdlError> {
    let utf16 = |bytes: &[u8], le: bool| -> Result<String, WsdlError> {
        if !bytes.len().is_multiple_of(2) {
            return Err(WsdlError::MalformedXml("odd number of bytes in UTF-16 document".into()));
        }
        let units = bytes.chunks_exact(2).map(|c| {
            if le {
                u16::from_le_bytes([c[0], c[1]])
            } else {
                u16::from_be_bytes([c[0], c[1]])
            }
        });
        char::decode_utf16(units)
            .collect::<Result<String, _>>()
            .map_err(|e| WsdlError::MalformedXml(format!("invalid UTF-16: {e}")))
    };
    let text = match bytes {
        [0xEF, 0xBB, 0xBF, rest @ ..] => utf8(rest)?,
        [0xFF, 0xFE, rest @ ..] => utf16(rest, true)?,
        [0xFE, 0xFF, rest @ ..] => utf16(rest, false)?,
        [b'<', 0, b'?', 0, ..] => utf16(bytes, true)?,
        [0, b'<', 0, b'?', ..] => utf16(bytes, false)?,
        _ => utf8(bytes)?,
    };
    if let Some(enc) = declared_encoding(&text) {
        let enc = enc.to_ascii_lowercase();
        if !matches!(
            enc.as_str(),
            "utf-8" | "utf8" | "utf-16" | "utf16" | "utf-16le" | "utf-16be"
        ) {
            return Err(WsdlError::MalformedXml(format!("unsupported document encoding {enc}")));
        }
    }
    Ok(text)
}

fn utf8(bytes: &[u8]) -> Result<String, WsdlError> {
    String::from_utf8(bytes.to_vec()).map_err(|e| WsdlError::MalformedXml(format!("invalid UTF-8: {e}")))
}

fn declared_encoding(text: &str) -> Option<&str> {
    let decl = text.strip_prefix("<?xml")?;
    let decl = &decl[..decl.find("?>")?];
    let at = decl.find("encoding")?;
    let rest = decl[at + "encoding".len()..]
        .trim_start()
        .strip_prefix('=')?
        .trim_start();
    let quote = rest.chars().next().filter(|c| *c == '"' || *c == '\'')?;
    let rest = &rest[1..];
    Some(&rest[..rest.find(quote)?])
}

/// Resolves an import location against the importing document's URL or path.
pub fn resolve_location(base: &str, location: &str) -> String {
    let is_url = |s: &str| url::Url::parse(s).is_ok_and(|u| u.scheme().len() > 1);
    if is_url(location) {
        return location.to_string();
    }
    if is_url(base) {
        if let Ok(joined) = url::Url::parse(base).and_then(|b| b.join(location)) {
            return joined.to_string();
        }
    }
    let parent = std::path::Path::new(base).parent().unwrap_or(std::path::Path::new(""));
    parent.join(location).to_string_lossy().into_owned()
}

#[derive(Debug, Default)]
struct Part {
    name: String,
    element: Option<QName>,
    type_: Option<QName>,
}

#[derive(Debug, Default)]
struct PortTypeOp {
    name: String,
    input: Option<QName>,
    output: Option<QName>,
}

#[derive(Debug, Default)]
struct BodyUse {
    encoded: bool,
    namespace: Option<String>,
}

#[derive(Debug, Default)]
struct BindingOp {
    name: String,
    soap_action: String,
    style: Option<SoapStyle>,
    input: BodyUse,
    output: BodyUse,
}

#[derive(Debug)]
struct Binding {
    port_type: QName,
    /// `Some` for SOAP 1.1 bindings, with the binding-level default style.
    soap_style: Option<SoapStyle>,
    ops: Vec<BindingOp>,
}

#[derive(Debug)]
struct Port {
    binding: QName,
    soap_address: Option<String>,
}

#[derive(Debug)]
struct Service {
    name: String,
    ports: Vec<Port>,
    /// URL of the document declaring the service, for relative addresses.
    base_url: String,
}

/// Namespace of the placeholder type given to `<element ref=...>` children
/// until every document is loaded; the local part is the target in Clark
/// notation.
const ELEMENT_REF_NS: &str = "urn:wsprop:element-ref";

#[derive(Debug, Default)]
struct Definitions {
    target_namespace: Option<String>,
    messages: BTreeMap<QName, Vec<Part>>,
    port_types: BTreeMap<QName, Vec<PortTypeOp>>,
    bindings: BTreeMap<QName, Binding>,
    services: Vec<Service>,
    schema: XsdSchema,
    schema_namespace_set: bool,
    element_refs: BTreeMap<String, QName>,
}

struct Loader<'e> {
    ep: &'e mut dyn Endpoint,
    done: BTreeSet<String>,
    in_progress: Vec<String>,
    defs: Definitions,
}

fn is(node: &Node, ns: &str, local: &str) -> bool {
    node.is_element() && node.tag_name().name() == local && node.tag_name().namespace() == Some(ns)
}

fn elements<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|n| n.is_element())
}

fn xsd_children<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    elements(node).filter(|n| n.tag_name().namespace() == Some(XSD_NS))
}

/// Resolves a prefixed name against the namespace bindings in scope at `node`.
fn qname_at(node: &Node, value: &str) -> Result<QName, WsdlError> {
    let value = value.trim();
    let (prefix, local) = match value.split_once(':') {
        Some((p, l)) => (Some(p), l),
        None => (None, value),
    };
    let ns = match prefix {
        Some(p) => node
            .lookup_namespace_uri(Some(p))
            .ok_or_else(|| WsdlError::UnresolvedReference(format!("undeclared namespace prefix `{p}` in `{value}`")))?,
        None => node.lookup_namespace_uri(None).unwrap_or(""),
    };
    Ok(QName::new(ns, local))
}

fn qname_attr(node: &Node, attr: &str) -> Result<Option<QName>, WsdlError> {
    node.attribute(attr).map(|v| qname_at(node, v)).transpose()
}

fn required<'a>(node: &Node<'a, '_>, attr: &str) -> Result<&'a str, WsdlError> {
    node.attribute(attr)
        .ok_or_else(|| WsdlError::UnsupportedWsdl(format!("<{}> without a `{attr}` attribute", node.tag_name().name())))
}

impl Loader<'_> {
    fn load_bytes(&mut self, bytes: &[u8], url: &str, chameleon_ns: Option<&str>) -> Result<(), WsdlError> {
        let text = decode_document(bytes)?;
        crate::xml::check_nesting(&text, crate::xml::MAX_NESTING).map_err(WsdlError::MalformedXml)?;
        let options = ParsingOptions {
            allow_dtd: true,
            ..ParsingOptions::default()
        };
        let doc = Document::parse_with_options(&text, options).map_err(|e| WsdlError::MalformedXml(e.to_string()))?;
        let root = doc.root_element();
        self.in_progress.push(url.to_string());
        let result = if is(&root, WSDL_NS, "definitions") {
            self.definitions(root, url)
        } else if is(&root, XSD_NS, "schema") {
            self.schema(root, url, chameleon_ns)
        } else if root.tag_name().namespace() == Some(WSDL2_NS) {
            Err(WsdlError::UnsupportedWsdl(
                "WSDL 2.0 descriptions are not supported".into(),
            ))
        } else {
            Err(WsdlError::UnsupportedWsdl(format!(
                "root element <{}> is neither wsdl:definitions nor xsd:schema",
                root.tag_name().name()
            )))
        };
        self.in_progress.pop();
        self.done.insert(url.to_string());
        result
    }

    fn import(&mut self, base: &str, location: &str, chameleon_ns: Option<&str>) -> Result<(), WsdlError> {
        let url = resolve_location(base, location);
        if self.in_progress.contains(&url) {
            let mut chain = self.in_progress.clone();
            chain.push(url);
            return Err(WsdlError::ImportCycle(chain.join(" -> ")));
        }
        if self.done.contains(&url) {
            return Ok(());
        }
        let bytes = self.ep.fetch(&url).map_err(|source| WsdlError::Transport {
            url: url.clone(),
            source,
        })?;
        self.load_bytes(&bytes, &url, chameleon_ns)
    }

    fn definitions(&mut self, root: Node, url: &str) -> Result<(), WsdlError> {
        let tns = root.attribute("targetNamespace").unwrap_or("").to_string();
        self.defs.target_namespace.get_or_insert_with(|| tns.clone());
        let qualify = |local: &str| QName::new(tns.clone(), local);
        for child in elements(root) {
            if child.tag_name().namespace() == Some(XSD_NS) && child.tag_name().name() == "schema" {
                self.schema(child, url, None)?;
                continue;
            }
            if child.tag_name().namespace() != Some(WSDL_NS) {
                continue;
            }
            match child.tag_name().name() {
                "import" => {
                    if let Some(loc) = child.attribute("location") {
                        self.import(url, loc, None)?;
                    }
                }
                "types" => {
                    for schema in xsd_children(child).filter(|n| n.tag_name().name() == "schema") {
                        self.schema(schema, url, None)?;
                    }
                }
                "message" => {
                    let mut parts = Vec::new();
                    for p in elements(child).filter(|n| is(n, WSDL_NS, "part")) {
                        parts.push(Part {
                            name: required(&p, "name")?.to_string(),
                            element: qname_attr(&p, "element")?,
                            type_: qname_attr(&p, "type")?,
                        });
                    }
                    self.defs
                        .messages
                        .entry(qualify(required(&child, "name")?))
                        .or_insert(parts);
                }
                "portType" => {
                    let mut ops = Vec::new();
                    for op in elements(child).filter(|n| is(n, WSDL_NS, "operation")) {
                        let msg = |tag: &str| -> Result<Option<QName>, WsdlError> {
                            match elements(op).find(|n| is(n, WSDL_NS, tag)) {
                                Some(n) => Ok(Some(qname_at(&n, required(&n, "message")?)?)),
                                None => Ok(None),
                            }
                        };
                        ops.push(PortTypeOp {
                            name: required(&op, "name")?.to_string(),
                            input: msg("input")?,
                            output: msg("output")?,
                        });
                    }
                    self.defs
                        .port_types
                        .entry(qualify(required(&child, "name")?))
                        .or_insert(ops);
                }
                "binding" => {
                    let binding = self.binding(child)?;
                    self.defs
                        .bindings
                        .entry(qualify(required(&child, "name")?))
                        .or_insert(binding);
                }
                "service" => {
                    let mut ports = Vec::new();
                    for port in elements(child).filter(|n| is(n, WSDL_NS, "port")) {
                        let soap_address = elements(port)
                            .find(|n| is(n, SOAP11_BINDING_NS, "address"))
                            .and_then(|n| n.attribute("location"))
                            .map(str::to_string);
                        ports.push(Port {
                            binding: qname_at(&port, required(&port, "binding")?)?,
                            soap_address,
                        });
                    }
                    self.defs.services.push(Service {
                        name: required(&child, "name")?.to_string(),
                        ports,
                        base_url: url.to_string(),
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn binding(&mut self, node: Node) -> Result<Binding, WsdlError> {
        let style_of = |n: &Node| match n.attribute("style") {
            Some("rpc") => Some(SoapStyle::RpcLiteral),
            Some(_) => Some(SoapStyle::DocumentLiteral),
            None => None,
        };
        let soap_style = elements(node)
            .find(|n| is(n, SOAP11_BINDING_NS, "binding"))
            .map(|n| style_of(&n).unwrap_or(SoapStyle::DocumentLiteral));
        let mut ops = Vec::new();
        for op in elements(node).filter(|n| is(n, WSDL_NS, "operation")) {
            let soap_op = elements(op).find(|n| is(n, SOAP11_BINDING_NS, "operation"));
            let body = |tag: &str| {
                let body = elements(op)
                    .find(|n| is(n, WSDL_NS, tag))
                    .and_then(|io| elements(io).find(|n| is(n, SOAP11_BINDING_NS, "body")));
                BodyUse {
                    encoded: body.is_some_and(|b| b.attribute("use") == Some("encoded")),
                    namespace: body.and_then(|b| b.attribute("namespace")).map(str::to_string),
                }
            };
            ops.push(BindingOp {
                name: required(&op, "name")?.to_string(),
                soap_action: soap_op
                    .and_then(|n| n.attribute("soapAction"))
                    .unwrap_or("")
                    .to_string(),
                style: soap_op.as_ref().and_then(style_of),
                input: body("input"),
                output: body("output"),
            });
        }
        Ok(Binding {
            port_type: qname_at(&node, required(&node, "type")?)?,
            soap_style,
            ops,
        })
    }

    fn schema(&mut self, node: Node, url: &str, chameleon_ns: Option<&str>) -> Result<(), WsdlError> {
        let tns = node
            .attribute("targetNamespace")
            .or(chameleon_ns)
            .unwrap_or("")
            .to_string();
        if !self.defs.schema_namespace_set {
            self.defs.schema.target_namespace = tns.clone();
            self.defs.schema_namespace_set = true;
        }
        let mut ctx = SchemaCtx {
            tns: tns.clone(),
            qualified: node.attribute("elementFormDefault") == Some("qualified"),
            defs: &mut self.defs,
        };
        let mut imports = Vec::new();
        for child in xsd_children(node) {
            match child.tag_name().name() {
                "import" => {
                    if let Some(loc) = child.attribute("schemaLocation") {
                        imports.push((loc.to_string(), None));
                    }
                }
                "include" | "redefine" => {
                    if let Some(loc) = child.attribute("schemaLocation") {
                        imports.push((loc.to_string(), Some(tns.clone())));
                    }
                }
                "element" => {
                    let decl = ctx.element(child, "", true)?;
                    ctx.defs.schema.elements.entry(decl.name.clone()).or_insert(decl);
                }
                "complexType" => {
                    let name = QName::new(tns.clone(), required(&child, "name")?);
                    let def = ctx.complex(child, &format!("@{}", name.local))?;
                    ctx.defs.schema.complex_types.entry(name).or_insert(def);
                }
                "simpleType" => {
                    let name = QName::new(tns.clone(), required(&child, "name")?);
                    let def = ctx.simple(child, &format!("@{}", name.local))?;
                    ctx.defs.schema.simple_types.entry(name).or_insert(def);
                }
                _ => {}
            }
        }
        for (loc, chameleon) in imports {
            self.import(url, &loc, chameleon.as_deref())?;
        }
        Ok(())
    }
}

struct SchemaCtx<'d> {
    tns: String,
    qualified: bool,
    defs: &'d mut Definitions,
}

fn parse_occurs(node: &Node, attr: &str) -> Result<Option<MaxOccurs>, WsdlError> {
    match node.attribute(attr).map(str::trim) {
        None => Ok(None),
        Some("unbounded") => Ok(Some(MaxOccurs::Unbounded)),
        Some(v) => v
            .parse::<u64>()
            .map(|n| Some(MaxOccurs::Bounded(n)))
            .map_err(|_| WsdlError::UnsupportedWsdl(format!("bad {attr} value `{v}`"))),
    }
}

fn occurs(node: &Node) -> Result<(u64, MaxOccurs), WsdlError> {
    let min = match parse_occurs(node, "minOccurs")? {
        None => 1,
        Some(MaxOccurs::Bounded(n)) => n,
        Some(MaxOccurs::Unbounded) => return Err(WsdlError::UnsupportedWsdl("minOccurs=\"unbounded\"".into())),
    };
    let max = parse_occurs(node, "maxOccurs")?.unwrap_or(MaxOccurs::Bounded(1));
    if let MaxOccurs::Bounded(hi) = max {
        if min > hi {
            return Err(WsdlError::UnsupportedWsdl(format!(
                "minOccurs {min} exceeds maxOccurs {hi}"
            )));
        }
    }
    Ok((min, max))
}

fn unsupported(what: &str) -> ComplexTypeDef {
    ComplexTypeDef {
        unsupported: Some(what.to_string()),
        ..ComplexTypeDef::new(Combinator::Sequence, Vec::new())
    }
}

impl SchemaCtx<'_> {
    /// `path` names the enclosing element or type, for anonymous type names.
    fn element(&mut self, node: Node, path: &str, global: bool) -> Result<ElementDecl, WsdlError> {
        let (min_occurs, max_occurs) = if global {
            (1, MaxOccurs::Bounded(1))
        } else {
            occurs(&node)?
        };
        if let Some(target) = qname_attr(&node, "ref")? {
            let key = target.to_string();
            self.defs.element_refs.insert(key.clone(), target.clone());
            return Ok(ElementDecl {
                name: target,
                type_ref: TypeRef::Named(QName::new(ELEMENT_REF_NS, key)),
                min_occurs,
                max_occurs,
            });
        }
        let local = required(&node, "name")?;
        let qualified = global
            || match node.attribute("form") {
                Some(form) => form == "qualified",
                None => self.qualified,
            };
        let name = QName::new(if qualified { self.tns.as_str() } else { "" }, local);
        let path = if path.is_empty() {
            local.to_string()
        } else {
            format!("{path}/{local}")
        };
        let type_ref = if let Some(t) = qname_attr(&node, "type")? {
            TypeRef::Named(t)
        } else if let Some(ct) = xsd_children(node).find(|n| n.tag_name().name() == "complexType") {
            let anon = anonymous_type_name(&self.tns, &path);
            let def = self.complex(ct, &path)?;
            self.defs.schema.complex_types.insert(anon.clone(), def);
            TypeRef::Anonymous(anon)
        } else if let Some(st) = xsd_children(node).find(|n| n.tag_name().name() == "simpleType") {
            let anon = anonymous_type_name(&self.tns, &path);
            let def = self.simple(st, &path)?;
            self.defs.schema.simple_types.insert(anon.clone(), def);
            TypeRef::Anonymous(anon)
        } else {
            TypeRef::Named(QName::xsd("anyType"))
        };
        Ok(ElementDecl {
            name,
            type_ref,
            min_occurs,
            max_occurs,
        })
    }

    fn complex(&mut self, node: Node, path: &str) -> Result<ComplexTypeDef, WsdlError> {
        if node.attribute("mixed") == Some("true") {
            return Ok(unsupported("mixed content"));
        }
        for child in xsd_children(node) {
            match child.tag_name().name() {
                "sequence" | "all" | "choice" => return self.group(child, path, None),
                "group" => return Ok(unsupported("model group reference")),
                "simpleContent" => {
                    let Some(derivation) = xsd_children(child).find(|n| n.attribute("base").is_some()) else {
                        return Ok(unsupported("simpleContent without a base type"));
                    };
                    let base = qname_at(&derivation, required(&derivation, "base")?)?;
                    return Ok(ComplexTypeDef {
                        simple_content: Some(base),
                        ..ComplexTypeDef::new(Combinator::Sequence, Vec::new())
                    });
                }
                "complexContent" => {
                    if child.attribute("mixed") == Some("true") {
                        return Ok(unsupported("mixed content"));
                    }
                    let Some(derivation) = xsd_children(child).find(|n| n.attribute("base").is_some()) else {
                        return Ok(unsupported("complexContent without a base type"));
                    };
                    let base = qname_at(&derivation, required(&derivation, "base")?)?;
                    if derivation.tag_name().name() != "extension" {
                        return Ok(if base.namespace == SOAP_ENC_NS {
                            unsupported("SOAP-encoded array")
                        } else {
                            unsupported("complexContent restriction")
                        });
                    }
                    let group = xsd_children(derivation).find(|n| n.tag_name().name() != "annotation");
                    let mut def = match group {
                        Some(g) if matches!(g.tag_name().name(), "sequence" | "all" | "choice") => {
                            self.group(g, path, None)?
                        }
                        Some(g) if g.tag_name().name() == "group" => unsupported("model group reference"),
                        _ => ComplexTypeDef::new(Combinator::Sequence, Vec::new()),
                    };
                    if !(base.namespace == XSD_NS && base.local == "anyType") {
                        def.extends = Some(base);
                    }
                    return Ok(def);
                }
                _ => {}
            }
        }
        Ok(ComplexTypeDef::new(Combinator::Sequence, Vec::new()))
    }

    /// A model group. A nested single-occurrence sequence inside a sequence
    /// is flattened into its parent; other nesting is unsupported.
    fn group(
        &mut self,
        node: Node,
        path: &str,
        into: Option<&mut Vec<ElementDecl>>,
    ) -> Result<ComplexTypeDef, WsdlError> {
        let combinator = match node.tag_name().name() {
            "all" => Combinator::All,
            "choice" => Combinator::Choice,
            _ => Combinator::Sequence,
        };
        if occurs(&node)? != (1, MaxOccurs::Bounded(1)) {
            return Ok(unsupported("repeated model group"));
        }
        let mut own = Vec::new();
        let top = into.is_none();
        let children = match into {
            Some(v) => v,
            None => &mut own,
        };
        let mut flagged = None;
        for child in xsd_children(node) {
            match child.tag_name().name() {
                "element" => children.push(self.element(child, path, false)?),
                "sequence" if combinator == Combinator::Sequence && occurs(&child)? == (1, MaxOccurs::Bounded(1)) => {
                    let nested = self.group(child, path, Some(children))?;
                    if nested.unsupported.is_some() {
                        flagged = nested.unsupported;
                    }
                }
                "sequence" | "choice" | "all" => flagged = Some("nested model group".to_string()),
                "any" => flagged = Some("element wildcard (xsd:any)".to_string()),
                "group" => flagged = Some("model group reference".to_string()),
                _ => {}
            }
        }
        if let Some(what) = flagged {
            return Ok(unsupported(&what));
        }
        if !top {
            return Ok(ComplexTypeDef::new(combinator, Vec::new()));
        }
        Ok(ComplexTypeDef::new(combinator, own))
    }

    fn simple(&mut self, node: Node, path: &str) -> Result<SimpleTypeDef, WsdlError> {
        let any_simple = QName::xsd("anySimpleType");
        for child in xsd_children(node) {
            match child.tag_name().name() {
                "restriction" => {
                    let base = match qname_attr(&child, "base")? {
                        Some(b) => b,
                        None => match xsd_children(child).find(|n| n.tag_name().name() == "simpleType") {
                            Some(inner) => {
                                let inner_path = format!("{path}^base");
                                let anon = anonymous_type_name(&self.tns, &inner_path);
                                let def = self.simple(inner, &inner_path)?;
                                self.defs.schema.simple_types.insert(anon.clone(), def);
                                anon
                            }
                            None => any_simple.clone(),
                        },
                    };
                    return Ok(SimpleTypeDef {
                        base,
                        derivation: SimpleDerivation::Restriction,
                        facets: facets(child)?,
                    });
                }
                "list" => {
                    return Ok(SimpleTypeDef {
                        base: qname_attr(&child, "itemType")?.unwrap_or(any_simple),
                        derivation: SimpleDerivation::List,
                        facets: FacetSet::default(),
                    })
                }
                "union" => {
                    return Ok(SimpleTypeDef {
                        base: any_simple,
                        derivation: SimpleDerivation::Union,
                        facets: FacetSet::default(),
                    })
                }
                _ => {}
            }
        }
        Err(WsdlError::UnsupportedWsdl(format!(
            "simple type {path} has no derivation"
        )))
    }
}

fn facets(restriction: Node) -> Result<FacetSet, WsdlError> {
    let mut f = FacetSet::default();
    for facet in xsd_children(restriction) {
        let value = || required(&facet, "value").map(str::to_string);
        let length = || -> Result<u64, WsdlError> {
            let v = required(&facet, "value")?;
            v.trim()
                .parse()
                .map_err(|_| WsdlError::UnsupportedWsdl(format!("bad length facet `{v}`")))
        };
        match facet.tag_name().name() {
            "minInclusive" => f.min_inclusive = Some(value()?),
            "maxInclusive" => f.max_inclusive = Some(value()?),
            "minExclusive" => f.min_exclusive = Some(value()?),
            "maxExclusive" => f.max_exclusive = Some(value()?),
            "enumeration" => f.enumeration.get_or_insert_with(Vec::new).push(value()?),
            "pattern" => f.pattern.push(value()?),
            "length" => {
                let n = length()?;
                f.min_length = Some(n);
                f.max_length = Some(n);
            }
            "minLength" => f.min_length = Some(length()?),
            "maxLength" => f.max_length = Some(length()?),
            // whiteSpace, totalDigits, fractionDigits do not narrow what we generate.
            _ => {}
        }
    }
    Ok(f)
}

fn schema_error(e: SchemaError) -> WsdlError {
    WsdlError::UnresolvedReference(e.to_string())
}

impl Definitions {
    fn finish(mut self) -> Result<ParsedWsdl, WsdlError> {
        self.resolve_element_refs()?;

        let (service, port, binding) = self.soap_port()?;
        let service_name = service.name.clone();
        let address = port.soap_address.clone().unwrap_or_default();
        let endpoint_url = resolve_location(&service.base_url, &address);
        let binding_name = port.binding.clone();

        let port_type = self
            .port_types
            .get(&binding.port_type)
            .ok_or_else(|| WsdlError::UnresolvedReference(format!("portType {}", binding.port_type)))?;
        let mut operations: Vec<OperationDef> = Vec::new();
        let mut skipped = Vec::new();
        let mut rpc_wrappers: Vec<(ElementDecl, ComplexTypeDef)> = Vec::new();
        let tns = self.target_namespace.clone().unwrap_or_default();
        for bop in &binding.ops {
            let skip = |reason: &str| SkippedOperation {
                name: bop.name.clone(),
                reason: reason.to_string(),
            };
            if operations.iter().any(|o| o.name == bop.name) {
                skipped.push(skip("duplicate operation name"));
                continue;
            }
            let Some(pop) = port_type.iter().find(|o| o.name == bop.name) else {
                return Err(WsdlError::UnresolvedReference(format!(
                    "operation {} of binding {binding_name} is not in its portType",
                    bop.name
                )));
            };
            let (Some(in_msg), Some(out_msg)) = (&pop.input, &pop.output) else {
                skipped.push(skip("not a request-response operation"));
                continue;
            };
            if bop.input.encoded || bop.output.encoded {
                skipped.push(skip("SOAP-encoded body"));
                continue;
            }
            let message = |q: &QName| {
                self.messages
                    .get(q)
                    .ok_or_else(|| WsdlError::UnresolvedReference(format!("message {q}")))
            };
            let (in_parts, out_parts) = (message(in_msg)?, message(out_msg)?);
            let style = bop.style.or(binding.soap_style).unwrap_or(SoapStyle::DocumentLiteral);
            let (input_element, output_element) = match style {
                SoapStyle::DocumentLiteral => {
                    let single = |parts: &[Part]| match parts {
                        [Part { element: Some(e), .. }] => Some(e.clone()),
                        _ => None,
                    };
                    match (single(in_parts), single(out_parts)) {
                        (Some(i), Some(o)) => (i, o),
                        _ => {
                            skipped.push(skip("document-style message is not a single element part"));
                            continue;
                        }
                    }
                }
                SoapStyle::RpcLiteral => {
                    let in_ns = bop.input.namespace.clone().unwrap_or_else(|| tns.clone());
                    let out_ns = bop.output.namespace.clone().unwrap_or_else(|| tns.clone());
                    let input = QName::new(in_ns, bop.name.clone());
                    let output = QName::new(out_ns, format!("{}Response", bop.name));
                    for (name, parts) in [(&input, in_parts), (&output, out_parts)] {
                        let wrapper = self.rpc_wrapper(name, parts)?;
                        rpc_wrappers.push(wrapper);
                    }
                    (input, output)
                }
            };
            for el in [&input_element, &output_element] {
                let declared = self.schema.elements.contains_key(el) || rpc_wrappers.iter().any(|(d, _)| &d.name == el);
                if !declared {
                    return Err(WsdlError::UnresolvedReference(format!("element {el}")));
                }
            }
            operations.push(OperationDef {
                name: bop.name.clone(),
                soap_action: bop.soap_action.clone(),
                input_element,
                output_element,
                style,
            });
        }
        for (decl, def) in rpc_wrappers {
            self.schema
                .complex_types
                .entry(decl.type_ref.qname().clone())
                .or_insert(def);
            self.schema.elements.entry(decl.name.clone()).or_insert(decl);
        }
        self.schema.check_references().map_err(schema_error)?;
        self.schema.check_acyclic().map_err(schema_error)?;
        Ok(ParsedWsdl {
            model: WsdlModel {
                service_name,
                endpoint_url,
                operations,
                schema: self.schema,
            },
            skipped,
        })
    }

    fn soap_port(&self) -> Result<(&Service, &Port, &Binding), WsdlError> {
        for service in &self.services {
            for port in &service.ports {
                let Some(binding) = self.bindings.get(&port.binding) else {
                    continue;
                };
                if binding.soap_style.is_some() && port.soap_address.is_some() {
                    return Ok((service, port, binding));
                }
            }
        }
        Err(WsdlError::UnsupportedWsdl(
            "no service port with a SOAP 1.1 binding".into(),
        ))
    }

    /// The synthetic wrapper element of an rpc/literal message: named after
    /// the operation, one unqualified child per part.
    fn rpc_wrapper(&self, name: &QName, parts: &[Part]) -> Result<(ElementDecl, ComplexTypeDef), WsdlError> {
        let mut children = Vec::new();
        for part in parts {
            let child = match (&part.element, &part.type_) {
                (Some(el), _) => {
                    let decl = self
                        .schema
                        .elements
                        .get(el)
                        .ok_or_else(|| WsdlError::UnresolvedReference(format!("element {el}")))?;
                    decl.clone()
                }
                (None, Some(t)) => ElementDecl {
                    name: QName::new("", part.name.clone()),
                    type_ref: TypeRef::Named(t.clone()),
                    min_occurs: 1,
                    max_occurs: MaxOccurs::Bounded(1),
                },
                (None, None) => {
                    return Err(WsdlError::UnsupportedWsdl(format!(
                        "message part {} has neither element nor type",
                        part.name
                    )))
                }
            };
            children.push(child);
        }
        let anon = anonymous_type_name(&name.namespace, &format!("rpc:{}", name.local));
        Ok((
            ElementDecl {
                name: name.clone(),
                type_ref: TypeRef::Anonymous(anon),
                min_occurs: 1,
                max_occurs: MaxOccurs::Bounded(1),
            },
            ComplexTypeDef::new(Combinator::Sequence, children),
        ))
    }

    /// Gives each `ref=` child the type of the global element it names.
    fn resolve_element_refs(&mut self) -> Result<(), WsdlError> {
        let elements = &self.schema.elements;
        for ct in self.schema.complex_types.values_mut() {
            for child in &mut ct.children {
                let q = child.type_ref.qname();
                if q.namespace != ELEMENT_REF_NS {
                    continue;
                }
                let target = &self.element_refs[&q.local];
                child.type_ref = elements
                    .get(target)
                    .ok_or_else(|| WsdlError::UnresolvedReference(format!("element {target}")))?
                    .type_ref
                    .clone();
            }
        }
        Ok(())
    }
}
