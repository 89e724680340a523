//! Multi-version TM with invisible reads.
//!
//! Layout: a global `clock`, a global writer `lock`, and per t-object `X`
//! an append-only version list: `X.len` counts appended versions and
//! version `i >= 1` lives in `X.val.i` / `X.ts.i`. The initial version
//! (value 0, timestamp 0) is implicit.
//!
//! Read-only transactions read the clock once for a snapshot and then
//! return, for each object, the newest version with timestamp at most the
//! snapshot. They only ever apply `read`. Updating transactions take the
//! global lock at commit, abort if any object they read has a version newer
//! than their snapshot, append one version per written object, and bump
//! the clock before releasing the lock.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    BaseObjectId, OpResponse, Primitive, ProcessId, TObjectId, TOp, TxnId, Value, INITIAL_VALUE,
};

use super::{owner_word, Action, Plan, Tm};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MvInvisibleTm;

impl MvInvisibleTm {
    pub fn new() -> Self {
        MvInvisibleTm
    }

    fn clock() -> BaseObjectId {
        BaseObjectId::new("clock")
    }

    fn lock() -> BaseObjectId {
        BaseObjectId::new("lock")
    }

    fn len(x: TObjectId) -> BaseObjectId {
        BaseObjectId::field(x, "len")
    }

    fn val(x: TObjectId, i: Value) -> BaseObjectId {
        BaseObjectId::field(x, format_args!("val.{i}"))
    }

    fn ts(x: TObjectId, i: Value) -> BaseObjectId {
        BaseObjectId::field(x, format_args!("ts.{i}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    ReadClock,
    ReadLen(TObjectId),
    ReadTs(TObjectId, Value),
    ReadVal(TObjectId, Value),
    Lock,
    CommitClock,
    ValidateLen(TObjectId),
    ValidateTs(TObjectId, Value),
    InstallLen(TObjectId, Value),
    InstallVal(TObjectId, Value, Value),
    InstallTs(TObjectId, Value),
    InstallSetLen(TObjectId, Value),
    BumpClock,
    Unlock,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvTxn {
    txn: TxnId,
    snapshot: Option<Value>,
    rset: BTreeSet<TObjectId>,
    writes: BTreeMap<TObjectId, Value>,
    commit_ts: Value,
    plan: Plan<Step>,
}

impl Tm for MvInvisibleTm {
    type TxnState = MvTxn;

    fn name(&self) -> &'static str {
        "mv-invisible"
    }

    fn begin(&self, txn: TxnId, _process: ProcessId) -> MvTxn {
        MvTxn {
            txn,
            snapshot: None,
            rset: BTreeSet::new(),
            writes: BTreeMap::new(),
            commit_ts: 0,
            plan: Plan::default(),
        }
    }

    fn invoke(&self, st: &mut MvTxn, op: TOp) {
        st.plan = match op {
            TOp::Read(x) => match st.writes.get(&x) {
                Some(&v) => Plan::respond(OpResponse::Value(v)),
                None => {
                    st.rset.insert(x);
                    let mut plan = Plan::default();
                    if st.snapshot.is_none() {
                        plan.steps.push_back(Step::ReadClock);
                    }
                    plan.steps.push_back(Step::ReadLen(x));
                    plan
                }
            },
            TOp::Write(x, v) => {
                st.writes.insert(x, v);
                Plan::respond(OpResponse::Ok)
            }
            TOp::TryCommit if st.writes.is_empty() => Plan::respond(OpResponse::Commit),
            TOp::TryCommit => {
                let steps = [Step::Lock, Step::CommitClock]
                    .into_iter()
                    .chain(st.rset.iter().map(|&x| Step::ValidateLen(x)))
                    .chain(st.writes.iter().map(|(&x, &v)| Step::InstallLen(x, v)))
                    .chain([Step::BumpClock, Step::Unlock]);
                Plan::then(steps, OpResponse::Commit)
            }
        };
    }

    fn next_action(&self, st: &MvTxn) -> Action {
        st.plan.action(|step| match *step {
            Step::ReadClock | Step::CommitClock => (Self::clock(), Primitive::Read),
            Step::BumpClock => (Self::clock(), Primitive::FetchInc),
            Step::Lock => (
                Self::lock(),
                Primitive::Cas {
                    expected: 0,
                    new: owner_word(st.txn),
                },
            ),
            Step::Unlock => (Self::lock(), Primitive::Write(0)),
            Step::ReadLen(x) | Step::ValidateLen(x) | Step::InstallLen(x, _) => {
                (Self::len(x), Primitive::Read)
            }
            Step::ReadTs(x, i) | Step::ValidateTs(x, i) => (Self::ts(x, i), Primitive::Read),
            Step::ReadVal(x, i) => (Self::val(x, i), Primitive::Read),
            Step::InstallVal(x, i, v) => (Self::val(x, i), Primitive::Write(v)),
            Step::InstallTs(x, i) => (Self::ts(x, i), Primitive::Write(st.commit_ts)),
            Step::InstallSetLen(x, n) => (Self::len(x), Primitive::Write(n)),
        })
    }

    fn on_applied(&self, st: &mut MvTxn, r: Value) {
        let snapshot = st.snapshot.unwrap_or(0);
        match st.plan.pop() {
            Step::ReadClock => st.snapshot = Some(r),
            Step::ReadLen(x) => {
                if r == 0 {
                    st.plan.outcome = Some(OpResponse::Value(INITIAL_VALUE));
                } else {
                    st.plan.steps.push_front(Step::ReadTs(x, r));
                }
            }
            Step::ReadTs(x, i) => {
                if r <= snapshot {
                    st.plan.steps.push_front(Step::ReadVal(x, i));
                } else if i > 1 {
                    st.plan.steps.push_front(Step::ReadTs(x, i - 1));
                } else {
                    st.plan.outcome = Some(OpResponse::Value(INITIAL_VALUE));
                }
            }
            Step::ReadVal(_, _) => st.plan.outcome = Some(OpResponse::Value(r)),
            Step::Lock => {
                if r == 0 {
                    st.plan = Plan::respond(OpResponse::Abort);
                }
            }
            Step::CommitClock => st.commit_ts = r + 1,
            Step::ValidateLen(x) => {
                if r > 0 {
                    st.plan.steps.push_front(Step::ValidateTs(x, r));
                }
            }
            Step::ValidateTs(_, _) => {
                if r > snapshot {
                    st.plan = Plan::then([Step::Unlock], OpResponse::Abort);
                }
            }
            Step::InstallLen(x, v) => {
                let i = r + 1;
                st.plan.push_front_all([
                    Step::InstallVal(x, i, v),
                    Step::InstallTs(x, i),
                    Step::InstallSetLen(x, i),
                ]);
            }
            Step::InstallVal(..)
            | Step::InstallTs(..)
            | Step::InstallSetLen(..)
            | Step::BumpClock
            | Step::Unlock => {}
        }
    }

    fn on_responded(&self, st: &mut MvTxn) {
        st.plan = Plan::default();
    }

    fn initial_value(&self, base: &BaseObjectId) -> Option<Value> {
        let name = base.as_str();
        if name == "clock" || name == "lock" {
            return Some(0);
        }
        base.owner()?;
        let (_, field) = name.split_once('.')?;
        let ok = field == "len"
            || ["val.", "ts."].iter().any(|p| {
                field
                    .strip_prefix(p)
                    .and_then(|i| i.parse::<u64>().ok())
                    .is_some_and(|i| i >= 1)
            });
        ok.then_some(0)
    }

    /// Appended versions plus the initial one.
    fn version_count(&self, memory: &BTreeMap<BaseObjectId, Value>, x: TObjectId) -> Option<usize> {
        let appended = memory.get(&Self::len(x)).copied().unwrap_or(0);
        Some(appended as usize + 1)
    }
}
