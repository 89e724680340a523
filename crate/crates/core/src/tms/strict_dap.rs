//! A strictly disjoint-access-parallel candidate with wait-free read-only
//! transactions.
//!
//! Per t-object `X`: `X.val`, `X.ver` and `X.lock`, nothing else. Reads
//! return whatever `X.val` holds; read-only transactions commit without a
//! step. Updating transactions lock their write set, validate what they
//! read, then install object by object. No TM of this kind can also be
//! strictly serializable, and the adversarial schedule exploits the window
//! between the first and the last install.

use std::collections::BTreeMap;

use crate::model::{BaseObjectId, OpResponse, Primitive, ProcessId, TObjectId, TOp, TxnId, Value};

use super::{owner_word, Action, Plan, Tm};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrictDapTm;

impl StrictDapTm {
    pub fn new() -> Self {
        StrictDapTm
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    ReadVer(TObjectId),
    ReadVal(TObjectId),
    Lock(TObjectId),
    CheckLock(TObjectId),
    CheckVer(TObjectId),
    InstallVal(TObjectId, Value),
    BumpVer(TObjectId),
    Unlock(TObjectId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictDapTxn {
    txn: TxnId,
    read_versions: BTreeMap<TObjectId, Value>,
    writes: BTreeMap<TObjectId, Value>,
    locked: Vec<TObjectId>,
    plan: Plan<Step>,
}

impl StrictDapTxn {
    fn abort(&mut self) {
        let unlock: Vec<Step> = self.locked.iter().map(|&x| Step::Unlock(x)).collect();
        self.plan = Plan::then(unlock, OpResponse::Abort);
    }
}

impl Tm for StrictDapTm {
    type TxnState = StrictDapTxn;

    fn name(&self) -> &'static str {
        "strict-dap-attempt"
    }

    fn begin(&self, txn: TxnId, _process: ProcessId) -> StrictDapTxn {
        StrictDapTxn {
            txn,
            read_versions: BTreeMap::new(),
            writes: BTreeMap::new(),
            locked: Vec::new(),
            plan: Plan::default(),
        }
    }

    fn invoke(&self, st: &mut StrictDapTxn, op: TOp) {
        st.plan = match op {
            TOp::Read(x) => match st.writes.get(&x) {
                Some(&v) => Plan::respond(OpResponse::Value(v)),
                None => Plan {
                    steps: [Step::ReadVer(x), Step::ReadVal(x)].into(),
                    outcome: None,
                },
            },
            TOp::Write(x, v) => {
                st.writes.insert(x, v);
                Plan::respond(OpResponse::Ok)
            }
            TOp::TryCommit if st.writes.is_empty() => Plan::respond(OpResponse::Commit),
            TOp::TryCommit => {
                let mut steps: Vec<Step> = st.writes.keys().map(|&x| Step::Lock(x)).collect();
                for &x in st.read_versions.keys() {
                    if !st.writes.contains_key(&x) {
                        steps.push(Step::CheckLock(x));
                    }
                    steps.push(Step::CheckVer(x));
                }
                for (&x, &v) in &st.writes {
                    steps.extend([Step::InstallVal(x, v), Step::BumpVer(x), Step::Unlock(x)]);
                }
                Plan::then(steps, OpResponse::Commit)
            }
        };
    }

    fn next_action(&self, st: &StrictDapTxn) -> Action {
        st.plan.action(|step| match *step {
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
            Step::CheckLock(x) => (BaseObjectId::field(x, "lock"), Primitive::Read),
            Step::InstallVal(x, v) => (BaseObjectId::field(x, "val"), Primitive::Write(v)),
            Step::BumpVer(x) => (BaseObjectId::field(x, "ver"), Primitive::FetchInc),
            Step::Unlock(x) => (BaseObjectId::field(x, "lock"), Primitive::Write(0)),
        })
    }

    fn on_applied(&self, st: &mut StrictDapTxn, r: Value) {
        match st.plan.pop() {
            Step::ReadVer(x) => {
                st.read_versions.entry(x).or_insert(r);
            }
            Step::ReadVal(_) => st.plan.outcome = Some(OpResponse::Value(r)),
            Step::Lock(x) => {
                if r == 1 {
                    st.locked.push(x);
                } else {
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
            Step::Unlock(x) => st.locked.retain(|&y| y != x),
            Step::InstallVal(..) | Step::BumpVer(_) => {}
        }
    }

    fn on_responded(&self, st: &mut StrictDapTxn) {
        st.plan = Plan::default();
    }

    fn initial_value(&self, base: &BaseObjectId) -> Option<Value> {
        base.owner()?;
        let (_, field) = base.as_str().split_once('.')?;
        matches!(field, "val" | "ver" | "lock").then_some(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tms::testing::Solo;

    const X: TObjectId = TObjectId(1);
    const Y: TObjectId = TObjectId(2);

    #[test]
    fn solo_transactions_commit() {
        let mut s = Solo::new(StrictDapTm::new());
        let w = s.run_all(1, 1, &[TOp::Read(X), TOp::Write(X, 2), TOp::TryCommit]);
        assert_eq!(w[2], OpResponse::Commit);
        let r = s.run_all(2, 2, &[TOp::Read(X), TOp::TryCommit]);
        assert_eq!(r, vec![OpResponse::Value(2), OpResponse::Commit]);
        assert!(s.events_of(2).iter().all(|e| e.is_trivial()));
    }

    #[test]
    fn read_only_transactions_never_step_at_commit() {
        let mut s = Solo::new(StrictDapTm::new());
        s.run_all(1, 1, &[TOp::Read(X), TOp::Read(Y), TOp::TryCommit]);
        assert_eq!(s.events_of(1).len(), 4);
    }

    #[test]
    fn updater_aborts_on_changed_read() {
        let mut s = Solo::new(StrictDapTm::new());
        s.begin(1, 1);
        s.run(1, TOp::Read(X));
        s.run_all(2, 2, &[TOp::Write(X, 1), TOp::TryCommit]);
        s.run(1, TOp::Write(Y, 1));
        assert_eq!(s.run(1, TOp::TryCommit), OpResponse::Abort);
        assert_eq!(s.memory[&BaseObjectId::new("X2.lock")], 0);
    }
}
