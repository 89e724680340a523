//! Base objects, primitives, events, executions, histories and
//! configurations, with the order and contention predicates built on them.

mod config;
mod event;
mod execution;
mod history;
mod ids;
mod primitive;
pub mod trace;

use thiserror::Error;

pub use config::{apply_primitive, Configuration, SnapshotStore, SnapshotToken};
pub use event::{Event, OpResponse, RmwEvent, TOp, TOpEvent};
pub use execution::{ContentionFlags, Execution, OpSpan, Scope};
pub use history::{History, TxnRecord, TxnStatus};
pub use ids::{BaseObjectId, ProcessId, TObjectId, TxnId};
pub use primitive::Primitive;
pub use trace::INITIAL_VALUE;

/// Element of the value domain `V`.
pub type Value = i64;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown base object `{0}`")]
    UnknownBaseObject(BaseObjectId),
    #[error("unknown primitive `{0}`")]
    UnknownPrimitive(String),
    #[error("unknown transaction {0}")]
    UnknownTxn(TxnId),
    #[error("malformed at event {index}: {reason}")]
    Malformed { index: usize, reason: String },
    #[error("event {index}: recorded response {recorded} but replay yields {expected}")]
    ReplayMismatch {
        index: usize,
        recorded: Value,
        expected: Value,
    },
    #[error("stale snapshot token")]
    StaleSnapshot,
    #[error("{0}")]
    Parse(String),
}
