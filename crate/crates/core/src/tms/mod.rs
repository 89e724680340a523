//! The pluggable TM interface and the reference implementations driven by
//! the harness.
//!
//! A TM is a step machine: after a t-operation is invoked, the transaction's
//! private state determines its single enabled event, either a primitive
//! applied to a base object or the operation's response. The scheduler
//! applies the primitive and feeds the response back.

mod mv_invisible;
mod strict_dap;
mod visible_read;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::model::{BaseObjectId, OpResponse, Primitive, ProcessId, TObjectId, TOp, TxnId, Value};

pub use mv_invisible::{MvInvisibleTm, MvTxn};
pub use strict_dap::{StrictDapTm, StrictDapTxn};
pub use visible_read::{VisibleReadTm, VisibleReadTxn};

/// Default number of processes.
pub const DEFAULT_PROCESSES: u32 = 4;

/// The enabled event of a transaction with a pending t-operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Apply { base: BaseObjectId, prim: Primitive },
    Respond(OpResponse),
}

pub trait Tm: Clone + fmt::Debug {
    type TxnState: Clone + fmt::Debug + PartialEq;

    fn name(&self) -> &'static str;

    fn begin(&self, txn: TxnId, process: ProcessId) -> Self::TxnState;

    fn invoke(&self, state: &mut Self::TxnState, op: TOp);

    /// The next event of the pending operation. Must be a pure function of
    /// the private state.
    fn next_action(&self, state: &Self::TxnState) -> Action;

    /// Feeds back the response of the primitive announced by `next_action`.
    fn on_applied(&self, state: &mut Self::TxnState, response: Value);

    /// Called once the operation's response event has been emitted.
    fn on_responded(&self, state: &mut Self::TxnState);

    /// Initial value of `base` if it belongs to this TM's layout.
    fn initial_value(&self, base: &BaseObjectId) -> Option<Value>;

    /// Number of versions kept for `x`, for TMs that keep several.
    fn version_count(
        &self,
        _memory: &BTreeMap<BaseObjectId, Value>,
        _x: TObjectId,
    ) -> Option<usize> {
        None
    }
}

/// Pending work of one t-operation: primitives still to apply, then the
/// response.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Plan<S> {
    pub steps: VecDeque<S>,
    pub outcome: Option<OpResponse>,
}

impl<S> Default for Plan<S> {
    fn default() -> Self {
        Plan {
            steps: VecDeque::new(),
            outcome: None,
        }
    }
}

impl<S> Plan<S> {
    pub fn respond(r: OpResponse) -> Self {
        Plan {
            steps: VecDeque::new(),
            outcome: Some(r),
        }
    }

    pub fn then(steps: impl IntoIterator<Item = S>, r: OpResponse) -> Self {
        Plan {
            steps: steps.into_iter().collect(),
            outcome: Some(r),
        }
    }

    pub fn action(&self, target: impl FnOnce(&S) -> (BaseObjectId, Primitive)) -> Action {
        match self.steps.front() {
            Some(s) => {
                let (base, prim) = target(s);
                Action::Apply { base, prim }
            }
            None => Action::Respond(self.outcome.expect("no t-operation pending")),
        }
    }

    pub fn pop(&mut self) -> S {
        self.steps.pop_front().expect("no primitive was enabled")
    }

    pub fn push_front_all(
        &mut self,
        steps: impl IntoIterator<Item = S, IntoIter: DoubleEndedIterator>,
    ) {
        for s in steps.into_iter().rev() {
            self.steps.push_front(s);
        }
    }
}

/// Lock word written by `txn`: never 0, which marks a free lock.
pub(crate) fn owner_word(txn: TxnId) -> Value {
    Value::from(txn.0) + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TmKind {
    MvInvisible,
    VisibleRead,
    StrictDapAttempt,
}

impl TmKind {
    pub const ALL: [TmKind; 3] = [
        TmKind::MvInvisible,
        TmKind::VisibleRead,
        TmKind::StrictDapAttempt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TmKind::MvInvisible => "mv-invisible",
            TmKind::VisibleRead => "visible-read",
            TmKind::StrictDapAttempt => "strict-dap-attempt",
        }
    }
}

impl fmt::Display for TmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TmKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TmKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown TM `{s}` (expected mv-invisible, visible-read or strict-dap-attempt)"
                )
            })
    }
}

/// Any of the reference TMs, selected at run time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReferenceTm {
    MvInvisible(MvInvisibleTm),
    VisibleRead(VisibleReadTm),
    StrictDapAttempt(StrictDapTm),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReferenceTxn {
    MvInvisible(MvTxn),
    VisibleRead(VisibleReadTxn),
    StrictDapAttempt(StrictDapTxn),
}

impl ReferenceTm {
    pub fn new(kind: TmKind, processes: u32) -> Self {
        match kind {
            TmKind::MvInvisible => ReferenceTm::MvInvisible(MvInvisibleTm::new()),
            TmKind::VisibleRead => ReferenceTm::VisibleRead(VisibleReadTm::new(processes)),
            TmKind::StrictDapAttempt => ReferenceTm::StrictDapAttempt(StrictDapTm::new()),
        }
    }

    pub fn kind(&self) -> TmKind {
        match self {
            ReferenceTm::MvInvisible(_) => TmKind::MvInvisible,
            ReferenceTm::VisibleRead(_) => TmKind::VisibleRead,
            ReferenceTm::StrictDapAttempt(_) => TmKind::StrictDapAttempt,
        }
    }
}

macro_rules! dispatch {
    ($tm:expr, $state:expr, |$t:ident, $s:ident| $body:expr) => {
        match ($tm, $state) {
            (ReferenceTm::MvInvisible($t), ReferenceTxn::MvInvisible($s)) => $body,
            (ReferenceTm::VisibleRead($t), ReferenceTxn::VisibleRead($s)) => $body,
            (ReferenceTm::StrictDapAttempt($t), ReferenceTxn::StrictDapAttempt($s)) => $body,
            _ => panic!("transaction state belongs to a different TM"),
        }
    };
}

impl Tm for ReferenceTm {
    type TxnState = ReferenceTxn;

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    fn begin(&self, txn: TxnId, process: ProcessId) -> ReferenceTxn {
        match self {
            ReferenceTm::MvInvisible(t) => ReferenceTxn::MvInvisible(t.begin(txn, process)),
            ReferenceTm::VisibleRead(t) => ReferenceTxn::VisibleRead(t.begin(txn, process)),
            ReferenceTm::StrictDapAttempt(t) => {
                ReferenceTxn::StrictDapAttempt(t.begin(txn, process))
            }
        }
    }

    fn invoke(&self, state: &mut ReferenceTxn, op: TOp) {
        dispatch!(self, state, |t, s| t.invoke(s, op))
    }

    fn next_action(&self, state: &ReferenceTxn) -> Action {
        dispatch!(self, state, |t, s| t.next_action(s))
    }

    fn on_applied(&self, state: &mut ReferenceTxn, response: Value) {
        dispatch!(self, state, |t, s| t.on_applied(s, response))
    }

    fn on_responded(&self, state: &mut ReferenceTxn) {
        dispatch!(self, state, |t, s| t.on_responded(s))
    }

    fn initial_value(&self, base: &BaseObjectId) -> Option<Value> {
        match self {
            ReferenceTm::MvInvisible(t) => t.initial_value(base),
            ReferenceTm::VisibleRead(t) => t.initial_value(base),
            ReferenceTm::StrictDapAttempt(t) => t.initial_value(base),
        }
    }

    fn version_count(&self, memory: &BTreeMap<BaseObjectId, Value>, x: TObjectId) -> Option<usize> {
        match self {
            ReferenceTm::MvInvisible(t) => t.version_count(memory, x),
            ReferenceTm::VisibleRead(t) => t.version_count(memory, x),
            ReferenceTm::StrictDapAttempt(t) => t.version_count(memory, x),
        }
    }
}
