//! SOAP 1.1 envelopes: encoding generated values as request bodies and
//! classifying whatever comes back.
//!
//! Encoding is directed by the schema-lowered IR of the message, not by the
//! generator that produced the value, so an edited generator may produce
//! out-of-range values on purpose. Only the shape is checked.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use wsprop_core::{conforms, path_id, Bound, NamedIr, QName, Scalar, TypeIr, Value};

pub const SOAP_ENV_NS: &str = "http://schemas.xmlsoap.org/soap/envelope/";

use crate::xml::{check_nesting, MAX_NESTING};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("value does not fit the message shape at {at}: {message}")]
    ShapeMismatch { at: String, message: String },
    #[error("value cannot be written as XML at {at}: {message}")]
    Unencodable { at: String, message: String },
    #[error("cannot decode {at}: {message}")]
    Decode { at: String, message: String },
}

/// An element of a decoded envelope. `text` is the concatenation of the
/// element's own text nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlElement {
    pub name: QName,
    pub text: String,
    pub children: Vec<XmlElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SoapResponseKind {
    Ok {
        body_element: XmlElement,
    },
    Fault {
        code: String,
        string: String,
        detail: Option<String>,
    },
    Malformed {
        reason: String,
    },
}

/// Serializes `value` as the body of a request for the message rooted at
/// `root`.
pub fn encode_request(root: &NamedIr, value: &Value) -> Result<String, CodecError> {
    encode_envelope(root, value)
}

/// A complete envelope whose Body holds the element for `root`.
pub fn encode_envelope(root: &NamedIr, value: &Value) -> Result<String, CodecError> {
    let mut prefixes = BTreeMap::new();
    let mut declared = String::new();
    for node in root.walk() {
        if node.namespace.is_empty() || prefixes.contains_key(&node.namespace) {
            continue;
        }
        let prefix = if prefixes.is_empty() {
            "tns".to_string()
        } else {
            format!("ns{}", prefixes.len())
        };
        write!(declared, " xmlns:{prefix}=\"{}\"", escape_attr(&node.namespace)).unwrap();
        prefixes.insert(node.namespace.clone(), prefix);
    }
    let mut body = String::new();
    Encoder {
        prefixes: &prefixes,
        out: &mut body,
    }
    .node(root, value)?;
    Ok(format!(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\
         <soap:Envelope xmlns:soap=\"{SOAP_ENV_NS}\"{declared}><soap:Body>{body}</soap:Body></soap:Envelope>"
    ))
}

/// A Fault envelope, as a service would return with HTTP 500.
pub fn fault_envelope(code: &str, string: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\
         <soap:Envelope xmlns:soap=\"{SOAP_ENV_NS}\"><soap:Body><soap:Fault>\
         <faultcode>{}</faultcode><faultstring>{}</faultstring>\
         </soap:Fault></soap:Body></soap:Envelope>",
        escape_text(code),
        escape_text(string)
    )
}

fn escape_attr(s: &str) -> String {
    escape_text(s).replace('"', "&quot;")
}

/// Escapes markup characters. A carriage return is written as a character
/// reference, since a literal one would be normalized away by the reader.
fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

/// Characters allowed in an XML 1.0 document.
fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..)
}

struct Encoder<'a> {
    prefixes: &'a BTreeMap<String, String>,
    out: &'a mut String,
}

fn mismatch(node: &NamedIr, message: impl Into<String>) -> CodecError {
    CodecError::ShapeMismatch {
        at: path_id(node),
        message: message.into(),
    }
}

impl Encoder<'_> {
    fn tag(&self, node: &NamedIr) -> String {
        match self.prefixes.get(&node.namespace) {
            Some(p) => format!("{p}:{}", node.local_name),
            None => node.local_name.clone(),
        }
    }

    /// One element per occurrence: a repeated element is a list of values.
    fn node(&mut self, node: &NamedIr, value: &Value) -> Result<(), CodecError> {
        let tag = self.tag(node);
        match &node.ir {
            TypeIr::ListOf { inner, .. } if !node.ir.is_char_list() => {
                let Value::List(items) = value else {
                    return Err(mismatch(node, "expected a list of repeated elements"));
                };
                for item in items {
                    write!(self.out, "<{tag}>").unwrap();
                    self.content(node, inner, item)?;
                    write!(self.out, "</{tag}>").unwrap();
                }
                Ok(())
            }
            ir => {
                write!(self.out, "<{tag}>").unwrap();
                self.content(node, ir, value)?;
                write!(self.out, "</{tag}>").unwrap();
                Ok(())
            }
        }
    }

    fn content(&mut self, node: &NamedIr, ir: &TypeIr, value: &Value) -> Result<(), CodecError> {
        match (ir, value) {
            (TypeIr::Scalar(Scalar::Integer { .. } | Scalar::Float { .. }), Value::Int(v)) => {
                write!(self.out, "{v}").unwrap();
            }
            (TypeIr::Scalar(Scalar::Float { .. }), Value::Float(v)) => {
                if !v.is_finite() {
                    return Err(CodecError::Unencodable {
                        at: path_id(node),
                        message: format!("non-finite float {v}"),
                    });
                }
                write!(self.out, "{v:?}").unwrap();
            }
            (TypeIr::Scalar(Scalar::Boolean { .. }), Value::Bool(b)) => write!(self.out, "{b}").unwrap(),
            (TypeIr::Enumeration(_), Value::Text(s)) => self.text(node, s)?,
            (ir, Value::Text(s)) if ir.is_char_list() => self.text(node, s)?,
            (ir, v @ Value::List(_)) if ir.is_char_list() => {
                let s = v.as_char_string().ok_or_else(|| CodecError::Unencodable {
                    at: path_id(node),
                    message: "character code outside the Unicode scalar range".into(),
                })?;
                self.text(node, &s)?;
            }
            (TypeIr::TupleOf(fields), Value::Tuple(values)) => {
                if fields.len() != values.len() {
                    return Err(mismatch(
                        node,
                        format!("expected {} fields, got {}", fields.len(), values.len()),
                    ));
                }
                for (field, (name, v)) in fields.iter().zip(values) {
                    if *name != field.local_name {
                        return Err(mismatch(
                            node,
                            format!("expected field {}, got {name}", field.local_name),
                        ));
                    }
                    self.node(field, v)?;
                }
            }
            (TypeIr::ChoiceOf(alts), Value::Choice(i, v)) => {
                let alt = alts
                    .get(*i)
                    .ok_or_else(|| mismatch(node, format!("no alternative {i}")))?;
                self.node(alt, v)?;
            }
            (_, v) => return Err(mismatch(node, format!("value {v} has the wrong shape"))),
        }
        Ok(())
    }

    fn text(&mut self, node: &NamedIr, s: &str) -> Result<(), CodecError> {
        if let Some(c) = s.chars().find(|c| !is_xml_char(*c)) {
            return Err(CodecError::Unencodable {
                at: path_id(node),
                message: format!("character U+{:04X} is not allowed in XML", c as u32),
            });
        }
        self.out.push_str(&escape_text(s));
        Ok(())
    }
}

/// Classifies a response body. Total: any input gives one of the three
/// kinds.
pub fn decode_response(body: &str) -> SoapResponseKind {
    let malformed = |reason: String| SoapResponseKind::Malformed { reason };
    if let Err(reason) = check_nesting(body, MAX_NESTING) {
        return malformed(reason);
    }
    let doc = match roxmltree::Document::parse(body) {
        Ok(doc) => doc,
        Err(e) => return malformed(format!("not well-formed XML: {e}")),
    };
    let root = doc.root_element();
    let in_env = |n: &roxmltree::Node, local: &str| {
        n.is_element() && n.tag_name().name() == local && n.tag_name().namespace() == Some(SOAP_ENV_NS)
    };
    if !in_env(&root, "Envelope") {
        return malformed(format!(
            "root element <{}> is not a SOAP 1.1 Envelope",
            root.tag_name().name()
        ));
    }
    let Some(body) = root.children().find(|n| in_env(n, "Body")) else {
        return malformed("Envelope has no Body".into());
    };
    let Some(first) = body.children().find(|n| n.is_element()) else {
        return malformed("Body is empty".into());
    };
    if in_env(&first, "Fault") {
        let field = |name: &str| {
            first
                .children()
                .find(|n| n.is_element() && n.tag_name().name() == name)
                .map(|n| {
                    n.descendants()
                        .filter(|d| d.is_text())
                        .filter_map(|d| d.text())
                        .collect::<String>()
                })
        };
        return SoapResponseKind::Fault {
            code: field("faultcode").unwrap_or_default().trim().to_string(),
            string: field("faultstring").unwrap_or_default(),
            detail: field("detail"),
        };
    }
    SoapResponseKind::Ok {
        body_element: element(first),
    }
}

fn element(node: roxmltree::Node) -> XmlElement {
    let mut text = String::new();
    let mut children = Vec::new();
    for child in node.children() {
        if child.is_element() {
            children.push(element(child));
        } else if let Some(t) = child.text().filter(|_| child.is_text()) {
            text.push_str(t);
        }
    }
    let tag = node.tag_name();
    XmlElement {
        name: QName::new(tag.namespace().unwrap_or(""), tag.name()),
        text,
        children,
    }
}

fn decode_err(node: &NamedIr, message: impl Into<String>) -> CodecError {
    CodecError::Decode {
        at: path_id(node),
        message: message.into(),
    }
}

fn wire_name(node: &NamedIr) -> QName {
    QName::new(node.namespace.clone(), node.local_name.clone())
}

/// Reads the element for `root` back into a [`Value`] shaped by its IR.
/// Bounds are not checked; see [`validate_response_type`].
pub fn decode_value(root: &NamedIr, el: &XmlElement) -> Result<Value, CodecError> {
    if el.name != wire_name(root) {
        return Err(decode_err(
            root,
            format!("expected element {}, found {}", wire_name(root), el.name),
        ));
    }
    if let TypeIr::ListOf { inner, .. } = &root.ir {
        if !root.ir.is_char_list() {
            return Ok(Value::List(vec![decode_content(root, inner, el)?]));
        }
    }
    decode_content(root, &root.ir, el)
}

fn decode_content(node: &NamedIr, ir: &TypeIr, el: &XmlElement) -> Result<Value, CodecError> {
    let text = el.text.as_str();
    let leaf = |what: &str| {
        if el.children.is_empty() {
            Ok(())
        } else {
            Err(decode_err(node, format!("{what} content has child elements")))
        }
    };
    match ir {
        TypeIr::Scalar(Scalar::Integer { .. }) => {
            leaf("integer")?;
            let t = text.trim();
            t.strip_prefix('+')
                .unwrap_or(t)
                .parse::<i128>()
                .map(Value::Int)
                .map_err(|_| decode_err(node, format!("`{t}` is not an integer")))
        }
        TypeIr::Scalar(Scalar::Float { .. }) => {
            leaf("float")?;
            let t = text.trim();
            match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Value::Float(v)),
                _ => Err(decode_err(node, format!("`{t}` is not a finite number"))),
            }
        }
        TypeIr::Scalar(Scalar::Boolean { .. }) => {
            leaf("boolean")?;
            match text.trim() {
                "true" | "1" => Ok(Value::Bool(true)),
                "false" | "0" => Ok(Value::Bool(false)),
                t => Err(decode_err(node, format!("`{t}` is not a boolean"))),
            }
        }
        TypeIr::Enumeration(_) => {
            leaf("enumeration")?;
            Ok(Value::Text(text.to_string()))
        }
        ir if ir.is_char_list() => {
            leaf("string")?;
            Ok(Value::chars(text))
        }
        TypeIr::ListOf { .. } => Err(decode_err(node, "list without an element name")),
        TypeIr::TupleOf(fields) => {
            let mut rest: Vec<Option<&XmlElement>> = el.children.iter().map(Some).collect();
            let mut values = Vec::with_capacity(fields.len());
            for field in fields {
                let name = wire_name(field);
                let mut matching = rest.iter_mut().filter(|c| c.is_some_and(|c| c.name == name));
                let v = match &field.ir {
                    TypeIr::ListOf { inner, .. } if !field.ir.is_char_list() => {
                        let mut items = Vec::new();
                        for slot in matching {
                            items.push(decode_content(field, inner, slot.take().unwrap())?);
                        }
                        Value::List(items)
                    }
                    ir => {
                        let Some(slot) = matching.next() else {
                            return Err(decode_err(node, format!("missing element {name}")));
                        };
                        decode_content(field, ir, slot.take().unwrap())?
                    }
                };
                values.push((field.local_name.clone(), v));
            }
            if let Some(extra) = rest.into_iter().flatten().next() {
                return Err(decode_err(node, format!("unexpected element {}", extra.name)));
            }
            Ok(Value::Tuple(values))
        }
        TypeIr::ChoiceOf(alts) => {
            let first = el.children.first();
            for (i, alt) in alts.iter().enumerate() {
                let repeated = matches!(alt.ir, TypeIr::ListOf { .. }) && !alt.ir.is_char_list();
                let v = match (first, &alt.ir) {
                    (Some(c), TypeIr::ListOf { inner, .. }) if repeated && c.name == wire_name(alt) => {
                        if let Some(other) = el.children.iter().find(|c| c.name != wire_name(alt)) {
                            return Err(decode_err(node, format!("unexpected element {}", other.name)));
                        }
                        let items = el
                            .children
                            .iter()
                            .map(|c| decode_content(alt, inner, c))
                            .collect::<Result<_, _>>()?;
                        Value::List(items)
                    }
                    (None, TypeIr::ListOf { .. }) if repeated => Value::List(Vec::new()),
                    (Some(c), ir) if !repeated && c.name == wire_name(alt) => {
                        if el.children.len() > 1 {
                            return Err(decode_err(node, format!("unexpected element {}", el.children[1].name)));
                        }
                        decode_content(alt, ir, c)?
                    }
                    _ => continue,
                };
                return Ok(Value::Choice(i, Box::new(v)));
            }
            Err(decode_err(node, "content matches no alternative"))
        }
    }
}

/// Whether a response body element decodes to a value of the declared
/// output type. Strings in responses may use any character.
pub fn validate_response_type(root: &NamedIr, el: &XmlElement) -> Result<(), String> {
    let value = decode_value(root, el).map_err(|e| e.to_string())?;
    let ir = widen_chars(&root.ir);
    if conforms(&ir, &value) {
        Ok(())
    } else {
        Err(format!(
            "response value {value} is outside the declared type of {}",
            path_id(root)
        ))
    }
}

fn widen_chars(ir: &TypeIr) -> TypeIr {
    let named = |fields: &[NamedIr]| -> Vec<NamedIr> {
        fields
            .iter()
            .map(|f| NamedIr {
                ir: widen_chars(&f.ir),
                ..f.clone()
            })
            .collect()
    };
    match ir {
        TypeIr::ListOf { min_len, max_len, .. } if ir.is_char_list() => TypeIr::list(
            *min_len,
            *max_len,
            TypeIr::integer(
                Bound::Finite(0),
                Bound::Finite(char::MAX as i128),
                wsprop_core::Wire::Native,
            ),
        ),
        TypeIr::ListOf {
            min_len,
            max_len,
            inner,
        } => TypeIr::list(*min_len, *max_len, widen_chars(inner)),
        TypeIr::TupleOf(fields) => TypeIr::TupleOf(named(fields)),
        TypeIr::ChoiceOf(alts) => TypeIr::ChoiceOf(named(alts)),
        other => other.clone(),
    }
}
