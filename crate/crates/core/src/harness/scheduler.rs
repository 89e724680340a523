use std::collections::BTreeMap;

use crate::model::{
    apply_primitive, BaseObjectId, Configuration, Event, Execution, OpResponse, Primitive,
    ProcessId, RmwEvent, TOp, TOpEvent, TxnId, Value,
};
use crate::tms::{Action, Tm};

use super::run::{AnnotatedRun, Fragment, LabeledSnapshot, Poised};
use super::HarnessError;

/// Steps a single t-operation may take before the run is declared stuck.
pub const DEFAULT_STEP_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fate {
    Running,
    Committed,
    Aborted,
}

#[derive(Clone, Debug)]
struct Slot {
    process: ProcessId,
    pending: Option<(TOp, usize)>,
    fate: Fate,
}

/// What a single [`Scheduler::step`] did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Applied(RmwEvent),
    Responded(OpResponse),
}

/// Drives one TM through a scripted interleaving, one event at a time.
///
/// Cloning a scheduler forks the whole run (memory, TM-private states,
/// annotations), which is how probes are run without touching the main
/// execution.
#[derive(Clone, Debug)]
pub struct Scheduler<T: Tm> {
    tm: T,
    config: Configuration<T::TxnState>,
    exec: Execution,
    slots: BTreeMap<TxnId, Slot>,
    live_on: BTreeMap<ProcessId, TxnId>,
    poised: Option<Vec<Poised>>,
    fragments: Vec<Fragment>,
    open: Vec<(usize, String)>,
    snapshots: Vec<LabeledSnapshot>,
    budget: usize,
}

impl<T: Tm> Scheduler<T> {
    pub fn new(tm: T) -> Self {
        Scheduler {
            tm,
            config: Configuration::new(),
            exec: Execution::new(),
            slots: BTreeMap::new(),
            live_on: BTreeMap::new(),
            poised: None,
            fragments: Vec::new(),
            open: Vec::new(),
            snapshots: Vec::new(),
            budget: DEFAULT_STEP_BUDGET,
        }
    }

    /// Records, after every event, the next base-object step of each
    /// transaction with a pending operation.
    pub fn track_poised(mut self) -> Self {
        self.poised = Some(Vec::new());
        self
    }

    pub fn with_step_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn tm(&self) -> &T {
        &self.tm
    }

    pub fn execution(&self) -> &Execution {
        &self.exec
    }

    pub fn config(&self) -> &Configuration<T::TxnState> {
        &self.config
    }

    pub fn fate(&self, txn: TxnId) -> Option<Fate> {
        self.slots.get(&txn).map(|s| s.fate)
    }

    pub fn process_of(&self, txn: TxnId) -> Option<ProcessId> {
        self.slots.get(&txn).map(|s| s.process)
    }

    pub fn has_pending(&self, txn: TxnId) -> bool {
        self.slots.get(&txn).is_some_and(|s| s.pending.is_some())
    }

    pub fn start(&mut self, txn: TxnId, process: ProcessId) -> Result<(), HarnessError> {
        if self.slots.contains_key(&txn) {
            return Err(HarnessError::AlreadyStarted(txn));
        }
        if let Some(&live) = self.live_on.get(&process) {
            return Err(HarnessError::ProcessBusy { process, live });
        }
        let state = self.tm.begin(txn, process);
        self.config.set_private(txn, state);
        self.live_on.insert(process, txn);
        self.slots.insert(
            txn,
            Slot {
                process,
                pending: None,
                fate: Fate::Running,
            },
        );
        Ok(())
    }

    pub fn invoke(&mut self, txn: TxnId, op: TOp) -> Result<(), HarnessError> {
        let slot = self
            .slots
            .get_mut(&txn)
            .ok_or(HarnessError::NotStarted(txn))?;
        if slot.fate != Fate::Running {
            return Err(HarnessError::Finished(txn));
        }
        if slot.pending.is_some() {
            return Err(HarnessError::OpPending(txn));
        }
        slot.pending = Some((op, 0));
        let state = self
            .config
            .private_mut(txn)
            .expect("started transaction has state");
        self.tm.invoke(state, op);
        self.push(TOpEvent::invoke(txn, op).into())
    }

    /// The base-object step `txn` would take next, if it has a pending
    /// operation that is not ready to respond.
    pub fn poised(&self, txn: TxnId) -> Option<(BaseObjectId, Primitive)> {
        if !self.has_pending(txn) {
            return None;
        }
        match self.tm.next_action(self.config.private(txn)?) {
            Action::Apply { base, prim } => Some((base, prim)),
            Action::Respond(_) => None,
        }
    }

    /// Emits the next event of `txn`'s pending operation.
    pub fn step(&mut self, txn: TxnId) -> Result<StepOutcome, HarnessError> {
        let slot = self.slots.get(&txn).ok_or(HarnessError::NotStarted(txn))?;
        let Some((op, taken)) = slot.pending else {
            return Err(HarnessError::NoPendingOp(txn));
        };
        let state = self
            .config
            .private(txn)
            .expect("started transaction has state");
        match self.tm.next_action(state) {
            Action::Apply { base, prim } => {
                if taken >= self.budget {
                    return Err(HarnessError::StepBudget {
                        txn,
                        op,
                        budget: self.budget,
                    });
                }
                if !self.config.contains(&base) {
                    let init =
                        self.tm
                            .initial_value(&base)
                            .ok_or_else(|| HarnessError::UnknownBase {
                                txn,
                                base: base.clone(),
                            })?;
                    self.config.declare(base.clone(), init);
                }
                let ev = apply_primitive(&mut self.config, &base, prim, txn)?;
                let state = self
                    .config
                    .private_mut(txn)
                    .expect("started transaction has state");
                self.tm.on_applied(state, ev.response);
                if let Some(slot) = self.slots.get_mut(&txn) {
                    slot.pending = Some((op, taken + 1));
                }
                self.push(ev.clone().into())?;
                Ok(StepOutcome::Applied(ev))
            }
            Action::Respond(r) => {
                let state = self
                    .config
                    .private_mut(txn)
                    .expect("started transaction has state");
                self.tm.on_responded(state);
                let slot = self.slots.get_mut(&txn).expect("checked above");
                slot.pending = None;
                match r {
                    OpResponse::Commit => slot.fate = Fate::Committed,
                    OpResponse::Abort => slot.fate = Fate::Aborted,
                    _ => {}
                }
                if slot.fate != Fate::Running {
                    self.live_on.remove(&slot.process);
                }
                self.push(TOpEvent::respond(txn, op, r).into())?;
                Ok(StepOutcome::Responded(r))
            }
        }
    }

    /// Steps `txn` until its pending operation responds.
    pub fn finish_op(&mut self, txn: TxnId) -> Result<OpResponse, HarnessError> {
        loop {
            if let StepOutcome::Responded(r) = self.step(txn)? {
                return Ok(r);
            }
        }
    }

    pub fn run_op(&mut self, txn: TxnId, op: TOp) -> Result<OpResponse, HarnessError> {
        self.invoke(txn, op)?;
        self.finish_op(txn)
    }

    /// Starts `txn` and runs `ops` back to back, stopping at the first abort.
    pub fn run_solo(
        &mut self,
        txn: TxnId,
        process: ProcessId,
        ops: &[TOp],
    ) -> Result<Vec<OpResponse>, HarnessError> {
        self.start(txn, process)?;
        self.run_ops(txn, ops)
    }

    /// Runs `ops` on an already started transaction, stopping at the first
    /// abort.
    pub fn run_ops(&mut self, txn: TxnId, ops: &[TOp]) -> Result<Vec<OpResponse>, HarnessError> {
        let mut out = Vec::with_capacity(ops.len());
        for &op in ops {
            let r = self.run_op(txn, op)?;
            out.push(r);
            if r == OpResponse::Abort {
                break;
            }
        }
        Ok(out)
    }

    /// Emits exactly one event of the script `ops` for `txn`: a step of the
    /// pending operation, or the invocation of the next one. `cursor` counts
    /// invoked operations. Returns `None` when the script is exhausted or
    /// the transaction has finished.
    pub fn advance_script(
        &mut self,
        txn: TxnId,
        ops: &[TOp],
        cursor: &mut usize,
    ) -> Result<Option<Event>, HarnessError> {
        if self.has_pending(txn) {
            self.step(txn)?;
        } else if *cursor < ops.len() && self.fate(txn) == Some(Fate::Running) {
            self.invoke(txn, ops[*cursor])?;
            *cursor += 1;
        } else {
            return Ok(None);
        }
        Ok(self.exec.events().last().cloned())
    }

    /// Runs `f` on a fork of this scheduler and returns its result; the fork
    /// is discarded.
    pub fn probe<R>(&self, f: impl FnOnce(&mut Scheduler<T>) -> R) -> R {
        let mut fork = self.clone();
        f(&mut fork)
    }

    /// Solo read-only probe on a fork: reads `xs` and commits.
    pub fn probe_reads(
        &self,
        txn: TxnId,
        process: ProcessId,
        xs: &[crate::model::TObjectId],
    ) -> Result<Vec<Value>, HarnessError> {
        self.probe(|s| {
            s.start(txn, process)?;
            let mut out = Vec::with_capacity(xs.len());
            for &x in xs {
                match s.run_op(txn, TOp::Read(x))? {
                    OpResponse::Value(v) => out.push(v),
                    _ => return Err(HarnessError::ProbeAborted(txn)),
                }
            }
            match s.run_op(txn, TOp::TryCommit)? {
                OpResponse::Commit => Ok(out),
                _ => Err(HarnessError::ProbeAborted(txn)),
            }
        })
    }

    pub fn begin_fragment(&mut self, label: impl Into<String>) {
        self.open.push((self.exec.len(), label.into()));
    }

    pub fn end_fragment(&mut self) {
        if let Some((from, label)) = self.open.pop() {
            self.fragments.push(Fragment {
                from,
                to: self.exec.len(),
                label,
            });
        }
    }

    /// Runs `f` inside a labelled fragment.
    pub fn fragment<R>(
        &mut self,
        label: impl Into<String>,
        f: impl FnOnce(&mut Self) -> Result<R, HarnessError>,
    ) -> Result<R, HarnessError> {
        self.begin_fragment(label);
        let r = f(self);
        self.end_fragment();
        r
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn snapshot(&mut self, label: impl Into<String>) {
        self.snapshots.push(LabeledSnapshot {
            label: label.into(),
            prefix: self.exec.len(),
            memory: self.config.memory().clone(),
        });
    }

    pub fn into_run(mut self, name: impl Into<String>) -> AnnotatedRun {
        while !self.open.is_empty() {
            self.end_fragment();
        }
        AnnotatedRun {
            name: name.into(),
            execution: self.exec,
            poised: self.poised,
            fragments: self.fragments,
            snapshots: self.snapshots,
        }
    }

    pub fn to_run(&self, name: impl Into<String>) -> AnnotatedRun {
        self.clone().into_run(name)
    }

    fn push(&mut self, event: Event) -> Result<(), HarnessError> {
        self.exec.push(event)?;
        if self.poised.is_none() {
            return Ok(());
        }
        let prefix = self.exec.len();
        let found: Vec<Poised> = self
            .slots
            .keys()
            .filter_map(|&txn| {
                self.poised(txn).map(|(base, prim)| Poised {
                    prefix,
                    txn,
                    base,
                    prim,
                })
            })
            .collect();
        if let Some(p) = &mut self.poised {
            p.extend(found);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TObjectId;
    use crate::tms::{ReferenceTm, TmKind};

    const X: TObjectId = TObjectId(1);
    const Y: TObjectId = TObjectId(2);

    fn sched(kind: TmKind) -> Scheduler<ReferenceTm> {
        Scheduler::new(ReferenceTm::new(kind, 4))
    }

    #[test]
    fn empty_run() {
        let run = sched(TmKind::MvInvisible).into_run("empty");
        assert!(run.execution.is_empty());
        assert!(run.fragments.is_empty());
    }

    #[test]
    fn solo_writer_is_t_sequential_and_commits() {
        let mut s = sched(TmKind::VisibleRead);
        let r = s
            .run_solo(TxnId(1), ProcessId(1), &[TOp::Write(X, 3), TOp::TryCommit])
            .unwrap();
        assert_eq!(r, vec![OpResponse::Ok, OpResponse::Commit]);
        assert_eq!(s.fate(TxnId(1)), Some(Fate::Committed));
        assert!(s.execution().history().is_t_sequential());
    }

    #[test]
    fn alternating_steps_interleave_as_commanded() {
        let mut s = sched(TmKind::StrictDapAttempt);
        s.start(TxnId(1), ProcessId(1)).unwrap();
        s.start(TxnId(2), ProcessId(2)).unwrap();
        s.invoke(TxnId(1), TOp::Read(X)).unwrap();
        s.invoke(TxnId(2), TOp::Read(Y)).unwrap();
        for _ in 0..3 {
            s.step(TxnId(1)).unwrap();
            s.step(TxnId(2)).unwrap();
        }
        let order: Vec<u32> = s.execution().events().iter().map(|e| e.txn().0).collect();
        assert_eq!(order, vec![1, 2, 1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn process_sequentiality() {
        let mut s = sched(TmKind::MvInvisible);
        s.start(TxnId(1), ProcessId(1)).unwrap();
        assert!(matches!(
            s.start(TxnId(2), ProcessId(1)),
            Err(HarnessError::ProcessBusy { .. })
        ));
        s.run_ops(TxnId(1), &[TOp::TryCommit]).unwrap();
        s.start(TxnId(2), ProcessId(1)).unwrap();
        assert!(matches!(
            s.start(TxnId(2), ProcessId(2)),
            Err(HarnessError::AlreadyStarted(_))
        ));
    }

    #[test]
    fn probes_leave_the_run_untouched() {
        let mut s = sched(TmKind::MvInvisible);
        s.run_solo(TxnId(1), ProcessId(1), &[TOp::Write(X, 9), TOp::TryCommit])
            .unwrap();
        let before = s.execution().clone();
        assert_eq!(
            s.probe_reads(TxnId(50), ProcessId(2), &[X, Y]).unwrap(),
            vec![9, 0]
        );
        assert_eq!(s.execution(), &before);
    }

    #[test]
    fn step_budget() {
        let mut s = sched(TmKind::VisibleRead).with_step_budget(1);
        s.start(TxnId(1), ProcessId(1)).unwrap();
        s.invoke(TxnId(1), TOp::Read(X)).unwrap();
        s.step(TxnId(1)).unwrap();
        assert!(matches!(
            s.step(TxnId(1)),
            Err(HarnessError::StepBudget { .. })
        ));
    }

    #[test]
    fn poised_table_follows_next_actions() {
        let mut s = sched(TmKind::StrictDapAttempt).track_poised();
        s.start(TxnId(1), ProcessId(1)).unwrap();
        s.invoke(TxnId(1), TOp::Read(X)).unwrap();
        let run = s.to_run("p");
        let p = run.poised.unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].prefix, 1);
        assert_eq!(p[0].base.as_str(), "X1.ver");
    }
}
