use std::fmt;
use std::str::FromStr;

use super::primitive::split_call;
use super::{BaseObjectId, ModelError, Primitive, TObjectId, TxnId, Value};

/// A t-operation of a transaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TOp {
    Read(TObjectId),
    Write(TObjectId, Value),
    TryCommit,
}

impl TOp {
    pub fn tobject(&self) -> Option<TObjectId> {
        match *self {
            TOp::Read(x) | TOp::Write(x, _) => Some(x),
            TOp::TryCommit => None,
        }
    }

    /// Whether `response` is a legal outcome of this operation.
    pub fn admits(&self, response: OpResponse) -> bool {
        matches!(
            (self, response),
            (_, OpResponse::Abort)
                | (TOp::Read(_), OpResponse::Value(_))
                | (TOp::Write(..), OpResponse::Ok)
                | (TOp::TryCommit, OpResponse::Commit)
        )
    }
}

impl fmt::Display for TOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TOp::Read(x) => write!(f, "read({x})"),
            TOp::Write(x, v) => write!(f, "write({x},{v})"),
            TOp::TryCommit => f.write_str("tryC()"),
        }
    }
}

impl FromStr for TOp {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = split_call(s)?;
        match (name, args.as_slice()) {
            ("read", [x]) => Ok(TOp::Read(x.parse()?)),
            ("write", [x, v]) => Ok(TOp::Write(
                x.parse()?,
                v.parse()
                    .map_err(|_| ModelError::Parse(format!("invalid integer `{v}`")))?,
            )),
            ("tryC", []) => Ok(TOp::TryCommit),
            _ => Err(ModelError::Parse(format!("unknown t-operation `{s}`"))),
        }
    }
}

/// Response of a t-operation: a domain value, or one of the reserved
/// markers `ok`, `A_k`, `C_k`. The markers are tagged variants and never
/// compare equal to a domain value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpResponse {
    Value(Value),
    Ok,
    Abort,
    Commit,
}

impl fmt::Display for OpResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpResponse::Value(v) => write!(f, "{v}"),
            OpResponse::Ok => f.write_str("ok"),
            OpResponse::Abort => f.write_str("A"),
            OpResponse::Commit => f.write_str("C"),
        }
    }
}

impl FromStr for OpResponse {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(OpResponse::Ok),
            "A" => Ok(OpResponse::Abort),
            "C" => Ok(OpResponse::Commit),
            _ => s
                .parse()
                .map(OpResponse::Value)
                .map_err(|_| ModelError::Parse(format!("invalid response `{s}`"))),
        }
    }
}

/// `(b, <g,h>, r, k)`: transaction `txn` applied `prim` to `base` and got
/// `response`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RmwEvent {
    pub txn: TxnId,
    pub base: BaseObjectId,
    pub prim: Primitive,
    pub response: Value,
}

impl RmwEvent {
    pub fn is_trivial(&self) -> bool {
        self.prim.is_trivial()
    }
}

/// Invocation (`response == None`) or response of a t-operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TOpEvent {
    pub txn: TxnId,
    pub op: TOp,
    pub response: Option<OpResponse>,
}

impl TOpEvent {
    pub fn invoke(txn: TxnId, op: TOp) -> Self {
        TOpEvent {
            txn,
            op,
            response: None,
        }
    }

    pub fn respond(txn: TxnId, op: TOp, response: OpResponse) -> Self {
        TOpEvent {
            txn,
            op,
            response: Some(response),
        }
    }

    pub fn is_invocation(&self) -> bool {
        self.response.is_none()
    }

    /// `A_k` or `C_k`.
    pub fn is_terminal(&self) -> bool {
        matches!(
            self.response,
            Some(OpResponse::Abort) | Some(OpResponse::Commit)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Event {
    Rmw(RmwEvent),
    TOp(TOpEvent),
}

impl Event {
    pub fn txn(&self) -> TxnId {
        match self {
            Event::Rmw(e) => e.txn,
            Event::TOp(e) => e.txn,
        }
    }

    pub fn as_rmw(&self) -> Option<&RmwEvent> {
        match self {
            Event::Rmw(e) => Some(e),
            Event::TOp(_) => None,
        }
    }

    pub fn as_top(&self) -> Option<&TOpEvent> {
        match self {
            Event::TOp(e) => Some(e),
            Event::Rmw(_) => None,
        }
    }
}

impl From<RmwEvent> for Event {
    fn from(e: RmwEvent) -> Self {
        Event::Rmw(e)
    }
}

impl From<TOpEvent> for Event {
    fn from(e: TOpEvent) -> Self {
        Event::TOp(e)
    }
}
