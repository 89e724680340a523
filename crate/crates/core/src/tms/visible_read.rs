//! Single-version TM with visible reads and per-object metadata only.
//!
//! Per t-object `X`: `X.val`, a version counter `X.ver`, a commit lock
//! `X.lock` and one announcement counter `X.ann.pN` per process. A read
//! announces itself with a fetch-and-add on its process's counter (odd means
//! a reader of that process is active), then reads the version and value.
//! Counters only grow: the transaction's `tryC` adds one more to every
//! counter it raised, restoring even parity.
//!
//! An updating transaction locks its write set in ascending order, aborts
//! if another process has an active reader on any of those objects or if
//! anything it read changed, then installs, bumps versions and unlocks.
//! Every base object a transaction touches belongs to an object in its data
//! set.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{BaseObjectId, OpResponse, Primitive, ProcessId, TObjectId, TOp, TxnId, Value};

use super::{owner_word, Action, Plan, Tm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisibleReadTm {
    processes: u32,
}

impl VisibleReadTm {
    pub fn new(processes: u32) -> Self {
        VisibleReadTm { processes }
    }

    pub fn processes(&self) -> u32 {
        self.processes
    }

    fn ann(x: TObjectId, p: ProcessId) -> BaseObjectId {
        BaseObjectId::field(x, format_args!("ann.{p}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Announce(TObjectId),
    ReadVer(TObjectId),
    ReadVal(TObjectId),
    Lock(TObjectId),
    CheckAnn(TObjectId, ProcessId),
    CheckLock(TObjectId),
    CheckVer(TObjectId),
    InstallVal(TObjectId, Value),
    BumpVer(TObjectId),
    Unlock(TObjectId),
    Retract(TObjectId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisibleReadTxn {
    txn: TxnId,
    process: ProcessId,
    announced: BTreeSet<TObjectId>,
    read_versions: BTreeMap<TObjectId, Value>,
    writes: BTreeMap<TObjectId, Value>,
    locked: BTreeSet<TObjectId>,
    plan: Plan<Step>,
}

impl VisibleReadTxn {
    fn abort(&mut self) {
        let steps = self
            .locked
            .iter()
            .map(|&x| Step::Unlock(x))
            .chain(self.announced.iter().map(|&x| Step::Retract(x)));
        self.plan = Plan::then(steps.collect::<Vec<_>>(), OpResponse::Abort);
    }
}

impl Tm for VisibleReadTm {
    type TxnState = VisibleReadTxn;

    fn name(&self) -> &'static str {
        "visible-read"
    }

    fn begin(&self, txn: TxnId, process: ProcessId) -> VisibleReadTxn {
        VisibleReadTxn {
            txn,
            process,
            announced: BTreeSet::new(),
            read_versions: BTreeMap::new(),
            writes: BTreeMap::new(),
            locked: BTreeSet::new(),
            plan: Plan::default(),
        }
    }

    fn invoke(&self, st: &mut VisibleReadTxn, op: TOp) {
        st.plan = match op {
            TOp::Read(x) => match st.writes.get(&x) {
                Some(&v) => Plan::respond(OpResponse::Value(v)),
                None => {
                    let mut plan = Plan::default();
                    if !st.announced.contains(&x) {
                        plan.steps.push_back(Step::Announce(x));
                    }
                    plan.steps.extend([Step::ReadVer(x), Step::ReadVal(x)]);
                    plan
                }
            },
            TOp::Write(x, v) => {
                st.writes.insert(x, v);
                Plan::respond(OpResponse::Ok)
            }
            TOp::TryCommit => {
                let mut steps = Vec::new();
                if !st.writes.is_empty() {
                    steps.extend(st.writes.keys().map(|&x| Step::Lock(x)));
                    for &x in st.writes.keys() {
                        steps.extend(
                            (1..=self.processes)
                                .map(ProcessId)
                                .filter(|&p| p != st.process)
                                .map(|p| Step::CheckAnn(x, p)),
                        );
                    }
                    for &x in st.read_versions.keys() {
                        if !st.writes.contains_key(&x) {
                            steps.push(Step::CheckLock(x));
                        }
                        steps.push(Step::CheckVer(x));
                    }
                    for (&x, &v) in &st.writes {
                        steps.extend([Step::InstallVal(x, v), Step::BumpVer(x), Step::Unlock(x)]);
                    }
                }
                steps.extend(st.announced.iter().map(|&x| Step::Retract(x)));
                Plan::then(steps, OpResponse::Commit)
            }
        };
    }

    fn next_action(&self, st: &VisibleReadTxn) -> Action {
        st.plan.action(|step| match *step {
            Step::Announce(x) | Step::Retract(x) => {
                (Self::ann(x, st.process), Primitive::FetchAdd(1))
            }
            Step::ReadVer(x) | Step::CheckVer(x) => {
                (BaseObjectId::field(x, "ver"), Primitive::Read)
            }
            Step::ReadVal(x) => (BaseObjectId::field(x, "val"), Primitive::Read),
            Step::Lock(x) => (
                BaseObjectId::field(x, "lock"),
                Primitive::Cas {
                    expected: 0,
                    new: owner_word(st.txn),
                },
            ),
            Step::CheckAnn(x, p) => (Self::ann(x, p), Primitive::Read),
            Step::CheckLock(x) => (BaseObjectId::field(x, "lock"), Primitive::Read),
            Step::InstallVal(x, v) => (BaseObjectId::field(x, "val"), Primitive::Write(v)),
            Step::BumpVer(x) => (BaseObjectId::field(x, "ver"), Primitive::FetchInc),
            Step::Unlock(x) => (BaseObjectId::field(x, "lock"), Primitive::Write(0)),
        })
    }

    fn on_applied(&self, st: &mut VisibleReadTxn, r: Value) {
        match st.plan.pop() {
            Step::Announce(x) => {
                st.announced.insert(x);
            }
            Step::ReadVer(x) => {
                st.read_versions.entry(x).or_insert(r);
            }
            Step::ReadVal(_) => st.plan.outcome = Some(OpResponse::Value(r)),
            Step::Lock(x) => {
                if r == 1 {
                    st.locked.insert(x);
                } else {
                    st.abort();
                }
            }
            Step::CheckAnn(..) => {
                if r % 2 != 0 {
                    st.abort();
                }
            }
            Step::CheckLock(_) => {
                if r != 0 {
                    st.abort();
                }
            }
            Step::CheckVer(x) => {
                if st.read_versions.get(&x) != Some(&r) {
                    st.abort();
                }
            }
            Step::Unlock(x) => {
                st.locked.remove(&x);
            }
            Step::InstallVal(..) | Step::BumpVer(_) | Step::Retract(_) => {}
        }
    }

    fn on_responded(&self, st: &mut VisibleReadTxn) {
        st.plan = Plan::default();
    }

    fn initial_value(&self, base: &BaseObjectId) -> Option<Value> {
        base.owner()?;
        let (_, field) = base.as_str().split_once('.')?;
        let ok = matches!(field, "val" | "ver" | "lock")
            || field
                .strip_prefix("ann.")
                .and_then(|p| p.parse::<ProcessId>().ok())
                .is_some_and(|p| (1..=self.processes).contains(&p.0));
        ok.then_some(0)
    }
}
