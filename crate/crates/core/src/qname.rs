use alloc::string::String;
use core::fmt;

/// The XML Schema namespace; built-in type names live here.
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema";

/// SOAP 1.1 encoding namespace. Its simple type names mirror the XSD built-ins.
pub const SOAP_ENC_NS: &str = "http://schemas.xmlsoap.org/soap/encoding/";

/// An expanded XML name. Equality is on (namespace URI, local name); the
/// prefix used in the source document is not retained.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QName {
    pub namespace: String,
    pub local: String,
}

impl QName {
    pub fn new(namespace: impl Into<String>, local: impl Into<String>) -> Self {
        QName {
            namespace: namespace.into(),
            local: local.into(),
        }
    }

    pub fn xsd(local: impl Into<String>) -> Self {
        QName::new(XSD_NS, local)
    }

    pub fn is_builtin(&self) -> bool {
        self.namespace == XSD_NS || self.namespace == SOAP_ENC_NS
    }
}

/// Clark notation: `{namespace}local`, or just `local` without a namespace.
impl fmt::Display for QName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.namespace.is_empty() {
            f.write_str(&self.local)
        } else {
            write!(f, "{{{}}}{}", self.namespace, self.local)
        }
    }
}
