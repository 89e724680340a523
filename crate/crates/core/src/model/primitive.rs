use std::fmt;
use std::str::FromStr;

use super::{ModelError, Value};

/// The catalog of read-modify-write primitives a TM may apply to a base
/// object. Each primitive is a pair `<g, h>`: [`Primitive::update`] is the
/// update function and [`Primitive::respond`] the response function, both
/// evaluated on the state of the base object before the application.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Primitive {
    Read,
    Write(Value),
    /// Compare-and-swap: responds 1 on success, 0 on failure.
    Cas {
        expected: Value,
        new: Value,
    },
    FetchInc,
    FetchAdd(Value),
}

impl Primitive {
    /// `g`: the state of the base object after the primitive is applied.
    pub fn update(&self, state: Value) -> Value {
        match *self {
            Primitive::Read => state,
            Primitive::Write(v) => v,
            Primitive::Cas { expected, new } => {
                if state == expected {
                    new
                } else {
                    state
                }
            }
            Primitive::FetchInc => state.wrapping_add(1),
            Primitive::FetchAdd(d) => state.wrapping_add(d),
        }
    }

    /// `h`: the response returned to the applying process.
    pub fn respond(&self, state: Value) -> Value {
        match *self {
            Primitive::Read | Primitive::FetchInc | Primitive::FetchAdd(_) => state,
            Primitive::Write(_) => 0,
            Primitive::Cas { expected, .. } => Value::from(state == expected),
        }
    }

    /// A primitive is trivial if `g(s) = s` for every state `s`.
    pub fn is_trivial(&self) -> bool {
        match *self {
            Primitive::Read => true,
            Primitive::Write(_) | Primitive::FetchInc => false,
            Primitive::Cas { expected, new } => expected == new,
            Primitive::FetchAdd(d) => d == 0,
        }
    }

    /// Whether the response function depends on the pre-state, i.e. the
    /// primitive reads the base object.
    pub fn reads_base(&self) -> bool {
        !matches!(self, Primitive::Write(_))
    }

    /// Atomic-write-after-read shape: nontrivial and reading its base object.
    pub fn is_awar(&self) -> bool {
        !self.is_trivial() && self.reads_base()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Primitive::Read => "read",
            Primitive::Write(_) => "write",
            Primitive::Cas { .. } => "cas",
            Primitive::FetchInc => "fai",
            Primitive::FetchAdd(_) => "faa",
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Primitive::Read => f.write_str("read()"),
            Primitive::Write(v) => write!(f, "write({v})"),
            Primitive::Cas { expected, new } => write!(f, "cas({expected},{new})"),
            Primitive::FetchInc => f.write_str("fai()"),
            Primitive::FetchAdd(d) => write!(f, "faa({d})"),
        }
    }
}

/// Splits `name(a,b,...)` into the name and its argument tokens.
pub(crate) fn split_call(s: &str) -> Result<(&str, Vec<&str>), ModelError> {
    let open = s
        .find('(')
        .ok_or_else(|| ModelError::Parse(format!("expected `name(args)`, got `{s}`")))?;
    let inner = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| ModelError::Parse(format!("unterminated argument list in `{s}`")))?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Ok((&s[..open], args))
}

fn int(s: &str) -> Result<Value, ModelError> {
    s.parse()
        .map_err(|_| ModelError::Parse(format!("invalid integer `{s}`")))
}

impl FromStr for Primitive {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = split_call(s)?;
        match (name, args.as_slice()) {
            ("read", []) => Ok(Primitive::Read),
            ("write", [v]) => Ok(Primitive::Write(int(v)?)),
            ("cas", [a, b]) => Ok(Primitive::Cas {
                expected: int(a)?,
                new: int(b)?,
            }),
            ("fai", []) => Ok(Primitive::FetchInc),
            ("faa", [d]) => Ok(Primitive::FetchAdd(int(d)?)),
            _ => Err(ModelError::UnknownPrimitive(s.to_string())),
        }
    }
}
