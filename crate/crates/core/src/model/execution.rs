use std::collections::{BTreeMap, BTreeSet};

use super::history::{build_records, WellFormed};
use super::{
    apply_primitive, Configuration, Event, History, ModelError, OpResponse, TOp, TxnId, TxnRecord,
    TxnStatus,
};

/// A well-formed sequence of events. Use [`Execution::replay`] to also check
/// every base-object response against a starting configuration.
#[derive(Clone, Debug, Default)]
pub struct Execution {
    events: Vec<Event>,
    wf: WellFormed,
}

impl PartialEq for Execution {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events
    }
}

impl Eq for Execution {}

/// One t-operation of a transaction and where its events sit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpSpan {
    pub txn: TxnId,
    pub op: TOp,
    pub invoked_at: usize,
    pub response: Option<(usize, OpResponse)>,
    /// Positions of the base-object steps taken inside the operation.
    pub steps: Vec<usize>,
}

/// What [`Execution::is_step_contention_free`] looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Whole,
    Txn(TxnId),
    /// The `index`-th t-operation (0-based) of `txn`.
    Op {
        txn: TxnId,
        index: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContentionFlags {
    pub is_quiescent: bool,
    pub is_t_quiescent: bool,
    pub is_complete: bool,
    pub is_t_complete: bool,
    pub is_sequential: bool,
    pub is_t_sequential: bool,
}

impl Execution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_events(events: Vec<Event>) -> Result<Self, ModelError> {
        let mut e = Execution::new();
        for ev in events {
            e.push(ev)?;
        }
        Ok(e)
    }

    /// Re-applies `events` from `initial`, checking that each recorded RMW
    /// response equals the one the catalog semantics produce. Returns the
    /// execution and the final configuration.
    pub fn replay<S>(
        events: Vec<Event>,
        initial: &Configuration<S>,
    ) -> Result<(Self, Configuration<()>), ModelError> {
        let mut config = initial.memory_only();
        let mut exec = Execution::new();
        for (index, ev) in events.into_iter().enumerate() {
            if let Event::Rmw(r) = &ev {
                let got = apply_primitive(&mut config, &r.base, r.prim, r.txn)?;
                if got.response != r.response {
                    return Err(ModelError::ReplayMismatch {
                        index,
                        recorded: r.response,
                        expected: got.response,
                    });
                }
            }
            exec.push(ev)?;
        }
        Ok((exec, config))
    }

    /// Appends an event, enforcing per-transaction well-formedness.
    pub fn push(&mut self, event: Event) -> Result<(), ModelError> {
        let index = self.events.len();
        match &event {
            Event::Rmw(r) => self.wf.rmw(index, r.txn)?,
            Event::TOp(t) => self.wf.top(index, t)?,
        }
        self.events.push(event);
        Ok(())
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The first `len` events.
    pub fn prefix(&self, len: usize) -> Execution {
        Execution::from_events(self.events[..len.min(self.events.len())].to_vec())
            .expect("prefix of a well-formed execution is well-formed")
    }

    pub fn txns(&self) -> BTreeSet<TxnId> {
        self.events.iter().map(Event::txn).collect()
    }

    /// `E|k`, in order.
    pub fn project(&self, txn: TxnId) -> Vec<Event> {
        self.events
            .iter()
            .filter(|e| e.txn() == txn)
            .cloned()
            .collect()
    }

    /// Positions of `E|k` inside `E`.
    pub fn positions_of(&self, txn: TxnId) -> Vec<usize> {
        (0..self.events.len())
            .filter(|&i| self.events[i].txn() == txn)
            .collect()
    }

    /// The exported history: every t-operation event, in order.
    pub fn history(&self) -> History {
        History::new_unchecked(
            self.events
                .iter()
                .filter_map(Event::as_top)
                .copied()
                .collect(),
        )
    }

    pub fn records(&self) -> BTreeMap<TxnId, TxnRecord> {
        build_records(
            self.events
                .iter()
                .enumerate()
                .map(|(i, e)| (i, e.txn(), e.as_top())),
        )
    }

    /// The t-operations of `txn` in invocation order.
    pub fn op_spans(&self, txn: TxnId) -> Vec<OpSpan> {
        let mut spans: Vec<OpSpan> = Vec::new();
        for (i, ev) in self.events.iter().enumerate() {
            if ev.txn() != txn {
                continue;
            }
            match ev {
                Event::TOp(t) if t.is_invocation() => spans.push(OpSpan {
                    txn,
                    op: t.op,
                    invoked_at: i,
                    response: None,
                    steps: Vec::new(),
                }),
                Event::TOp(t) => {
                    if let (Some(span), Some(r)) = (spans.last_mut(), t.response) {
                        span.response = Some((i, r));
                    }
                }
                Event::Rmw(_) => {
                    if let Some(span) = spans.last_mut() {
                        span.steps.push(i);
                    }
                }
            }
        }
        spans
    }

    pub fn is_step_contention_free(&self, scope: Scope) -> bool {
        let contiguous = |pos: &[usize]| pos.windows(2).all(|w| w[1] == w[0] + 1);
        match scope {
            Scope::Whole => self
                .txns()
                .into_iter()
                .all(|k| contiguous(&self.positions_of(k))),
            Scope::Txn(k) => contiguous(&self.positions_of(k)),
            Scope::Op { txn, index } => match self.op_spans(txn).get(index) {
                None => true,
                Some(span) => {
                    let mut pos = vec![span.invoked_at];
                    pos.extend(&span.steps);
                    pos.extend(span.response.map(|(i, _)| i));
                    contiguous(&pos)
                }
            },
        }
    }

    pub fn contention_flags(&self) -> ContentionFlags {
        let recs = self.records();
        let complete = recs.values().all(|r| r.status != TxnStatus::Live);
        let t_complete = recs.values().all(TxnRecord::is_t_complete);
        let history = self.history();
        ContentionFlags {
            is_quiescent: complete,
            is_t_quiescent: t_complete,
            is_complete: complete,
            is_t_complete: t_complete,
            is_sequential: history.is_sequential(),
            is_t_sequential: history.is_t_sequential(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BaseObjectId, Primitive, RmwEvent, TObjectId, TOpEvent};

    const X: TObjectId = TObjectId(1);

    fn inv(k: u32, op: TOp) -> Event {
        TOpEvent::invoke(TxnId(k), op).into()
    }
    fn res(k: u32, op: TOp, r: OpResponse) -> Event {
        TOpEvent::respond(TxnId(k), op, r).into()
    }
    fn rmw(k: u32, base: &str, prim: Primitive, response: i64) -> Event {
        RmwEvent {
            txn: TxnId(k),
            base: BaseObjectId::new(base),
            prim,
            response,
        }
        .into()
    }

    fn interleaved() -> Execution {
        let r = TOp::Read(X);
        Execution::from_events(vec![
            inv(1, r),
            rmw(1, "b", Primitive::Read, 0),
            inv(2, r),
            rmw(2, "b", Primitive::Read, 0),
            res(2, r, OpResponse::Value(0)),
            res(1, r, OpResponse::Value(0)),
        ])
        .unwrap()
    }

    #[test]
    fn projection_and_history() {
        let e = interleaved();
        assert_eq!(e.project(TxnId(1)).len(), 3);
        assert!(e.project(TxnId(7)).is_empty());
        assert_eq!(e.history().len(), 4);
        let only_rmw_free = Execution::from_events(vec![inv(1, TOp::TryCommit)]).unwrap();
        assert_eq!(only_rmw_free.history().len(), 1);
        assert!(Execution::new().history().is_empty());
    }

    #[test]
    fn step_contention_scopes() {
        let e = interleaved();
        assert!(!e.is_step_contention_free(Scope::Txn(TxnId(1))));
        assert!(e.is_step_contention_free(Scope::Txn(TxnId(2))));
        assert!(!e.is_step_contention_free(Scope::Whole));
        assert!(!e.is_step_contention_free(Scope::Op {
            txn: TxnId(1),
            index: 0
        }));
        assert!(Execution::new().is_step_contention_free(Scope::Whole));
    }

    #[test]
    fn contention_predicates() {
        let c = TOp::TryCommit;
        let done = Execution::from_events(vec![inv(1, c), res(1, c, OpResponse::Commit)]).unwrap();
        let f = done.contention_flags();
        assert!(f.is_quiescent && f.is_t_quiescent && f.is_complete && f.is_t_complete);
        assert!(f.is_sequential && f.is_t_sequential);

        let pending = Execution::from_events(vec![inv(1, TOp::Read(X))]).unwrap();
        let f = pending.contention_flags();
        assert!(!f.is_complete && !f.is_t_complete);

        let r = TOp::Read(X);
        let not_t =
            Execution::from_events(vec![inv(1, r), res(1, r, OpResponse::Value(0))]).unwrap();
        let f = not_t.contention_flags();
        assert!(f.is_quiescent && !f.is_t_quiescent);
    }

    #[test]
    fn replay_detects_response_mismatch() {
        let w = TOp::Write(X, 1);
        let events = vec![
            inv(1, w),
            rmw(1, "b", Primitive::Write(4), 0),
            rmw(1, "b", Primitive::Read, 5),
        ];
        let init: Configuration = Configuration::with_bases([(BaseObjectId::new("b"), 0)]);
        assert_eq!(
            Execution::replay(events, &init),
            Err(ModelError::ReplayMismatch {
                index: 2,
                recorded: 5,
                expected: 4
            })
        );
    }

    #[test]
    fn rmw_outside_operation_is_malformed() {
        assert!(Execution::from_events(vec![rmw(1, "b", Primitive::Read, 0)]).is_err());
    }
}
