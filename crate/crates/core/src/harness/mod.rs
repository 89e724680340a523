//! Scripted step-granular scheduling of TMs and the scenario library.

mod prefix;
mod run;
pub mod scenarios;
mod scheduler;

use thiserror::Error;

use crate::model::{BaseObjectId, ModelError, ProcessId, TOp, TxnId};

pub use prefix::{longest_unobservable_prefix, PrefixProbe, UnobservablePrefix};
pub use run::{
    last_response, parse_sidecar, run_schedule, AnnotatedRun, Command, Fragment, LabeledSnapshot,
    Poised, ProbeResult, Schedule, Sidecar, StepCount,
};
pub use scheduler::{Fate, Scheduler, StepOutcome, DEFAULT_STEP_BUDGET};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0} was already started")]
    AlreadyStarted(TxnId),
    #[error("{process} still runs {live}")]
    ProcessBusy { process: ProcessId, live: TxnId },
    #[error("{0} was never started")]
    NotStarted(TxnId),
    #[error("{0} has already committed or aborted")]
    Finished(TxnId),
    #[error("{0} already has a pending t-operation")]
    OpPending(TxnId),
    #[error("{0} has no pending t-operation")]
    NoPendingOp(TxnId),
    #[error("{txn} accessed `{base}`, which is not part of the TM's layout")]
    UnknownBase { txn: TxnId, base: BaseObjectId },
    #[error("{txn}: {op} took more than {budget} steps")]
    StepBudget { txn: TxnId, op: TOp, budget: usize },
    #[error("{txn} aborted unexpectedly in fragment `{fragment}`")]
    UnexpectedAbort { txn: TxnId, fragment: String },
    #[error("read-only probe {0} did not commit")]
    ProbeAborted(TxnId),
    #[error("no qualifying prefix: {0}")]
    NoQualifyingPrefix(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
}
