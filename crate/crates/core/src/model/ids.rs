use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::ModelError;

/// Identifier of a transaction `T_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TxnId(pub u32);

/// Identifier of a process `p_i`, numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcessId(pub u32);

/// A transactional data item `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TObjectId(pub u32);

/// Name of a shared base object. Names are single whitespace-free tokens
/// such as `clock` or `X3.ann.p2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseObjectId(Arc<str>);

impl BaseObjectId {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        BaseObjectId(name.into())
    }

    /// Base object holding field `field` of t-object `x`'s metadata.
    pub fn field(x: TObjectId, field: impl fmt::Display) -> Self {
        BaseObjectId(format!("{x}.{field}").into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The t-object whose metadata this base object belongs to, if it was
    /// named with [`BaseObjectId::field`].
    pub fn owner(&self) -> Option<TObjectId> {
        let (head, _) = self.0.split_once('.')?;
        head.parse().ok()
    }
}

impl fmt::Display for TxnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl fmt::Display for TObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

impl fmt::Display for BaseObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn parse_prefixed(s: &str, prefix: char, what: &'static str) -> Result<u32, ModelError> {
    s.strip_prefix(prefix)
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| ModelError::Parse(format!("invalid {what} `{s}`")))
}

impl FromStr for TxnId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_prefixed(s, 'T', "transaction id").map(TxnId)
    }
}

impl FromStr for ProcessId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_prefixed(s, 'p', "process id").map(ProcessId)
    }
}

impl FromStr for TObjectId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_prefixed(s, 'X', "t-object id").map(TObjectId)
    }
}

impl FromStr for BaseObjectId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ok = !s.is_empty()
            && s.chars()
                .all(|c| !c.is_whitespace() && c != '(' && c != ')' && c != ',');
        if ok {
            Ok(BaseObjectId::new(s))
        } else {
            Err(ModelError::Parse(format!("invalid base object name `{s}`")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip_through_text() {
        assert_eq!("T12".parse::<TxnId>().unwrap(), TxnId(12));
        assert_eq!("X3".parse::<TObjectId>().unwrap().to_string(), "X3");
        assert_eq!("p2".parse::<ProcessId>().unwrap(), ProcessId(2));
        assert!("12".parse::<TxnId>().is_err());
        assert!("X".parse::<TObjectId>().is_err());
    }

    #[test]
    fn field_bases_know_their_owner() {
        let b = BaseObjectId::field(TObjectId(4), "ann.p1");
        assert_eq!(b.as_str(), "X4.ann.p1");
        assert_eq!(b.owner(), Some(TObjectId(4)));
        assert_eq!(BaseObjectId::new("clock").owner(), None);
        assert!("a b".parse::<BaseObjectId>().is_err());
    }
}
