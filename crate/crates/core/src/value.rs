use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A generated test datum, shaped by the [`TypeIr`](crate::TypeIr) it was
/// drawn from. Strings are lists of character codes; enumeration members
/// are carried verbatim as `Text`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Value {
    Int(i128),
    /// Always finite.
    Float(f64),
    Bool(bool),
    Text(String),
    List(Vec<Value>),
    Tuple(Vec<(String, Value)>),
    /// Index of the chosen alternative and its value.
    Choice(usize, Box<Value>),
}

impl Value {
    /// A character string as a list of code points.
    pub fn chars(s: &str) -> Value {
        Value::List(s.chars().map(|c| Value::Int(c as i128)).collect())
    }

    /// Reads a list of code points back as a string.
    pub fn as_char_string(&self) -> Option<String> {
        let Value::List(items) = self else {
            return None;
        };
        items
            .iter()
            .map(|v| match v {
                Value::Int(c) => u32::try_from(*c).ok().and_then(char::from_u32),
                _ => None,
            })
            .collect()
    }

    pub fn tuple<I, S>(fields: I) -> Value
    where
        I: IntoIterator<Item = (S, Value)>,
        S: Into<String>,
    {
        Value::Tuple(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn field(&self, name: &str) -> Option<&Value> {
        match self {
            Value::Tuple(fields) => fields.iter().find(|(k, _)| k == name).map(|(_, v)| v),
            _ => None,
        }
    }
}

/// Term-style rendering used in test reports: tuples and lists both print as
/// `[a,b]`, strings as their character codes, e.g. `[[46],[]]`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<'a>(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = &'a Value>) -> fmt::Result {
            f.write_str("[")?;
            for (i, v) in items.enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")
        }
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => write!(f, "{s:?}"),
            Value::List(items) => list(f, items.iter()),
            Value::Tuple(fields) => list(f, fields.iter().map(|(_, v)| v)),
            Value::Choice(_, v) => write!(f, "{v}"),
        }
    }
}
