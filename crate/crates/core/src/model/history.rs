use std::collections::{BTreeMap, BTreeSet};

use super::{ModelError, OpResponse, TObjectId, TOp, TOpEvent, TxnId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TxnStatus {
    /// A t-operation is pending.
    Live,
    /// Every invoked t-operation has responded, but no `A_k`/`C_k` yet.
    Complete,
    Committed,
    Aborted,
}

/// Per-transaction summary of an execution or history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TxnRecord {
    pub id: TxnId,
    pub rset: BTreeSet<TObjectId>,
    pub wset: BTreeSet<TObjectId>,
    pub status: TxnStatus,
    /// Positions of the first and last event of the transaction.
    pub first: usize,
    pub last: usize,
}

impl TxnRecord {
    fn new(id: TxnId, at: usize) -> Self {
        TxnRecord {
            id,
            rset: BTreeSet::new(),
            wset: BTreeSet::new(),
            status: TxnStatus::Complete,
            first: at,
            last: at,
        }
    }

    pub fn dset(&self) -> BTreeSet<TObjectId> {
        self.rset.union(&self.wset).copied().collect()
    }

    pub fn is_read_only(&self) -> bool {
        self.wset.is_empty()
    }

    pub fn is_updating(&self) -> bool {
        !self.wset.is_empty()
    }

    pub fn is_write_only(&self) -> bool {
        self.rset.is_empty()
    }

    pub fn is_t_complete(&self) -> bool {
        matches!(self.status, TxnStatus::Committed | TxnStatus::Aborted)
    }

    pub fn is_committed(&self) -> bool {
        self.status == TxnStatus::Committed
    }

    /// `self` precedes `other` in real-time order.
    pub fn precedes(&self, other: &TxnRecord) -> bool {
        self.is_t_complete() && self.last < other.first
    }
}

/// Incremental per-transaction well-formedness: `E|k` is sequential and
/// has no events after `A_k` or `C_k`; base-object steps happen only inside
/// a pending t-operation.
#[derive(Clone, Debug, Default)]
pub(crate) struct WellFormed {
    pending: BTreeMap<TxnId, TOp>,
    done: BTreeSet<TxnId>,
}

impl WellFormed {
    fn malformed(index: usize, reason: String) -> ModelError {
        ModelError::Malformed { index, reason }
    }

    pub(crate) fn rmw(&mut self, index: usize, txn: TxnId) -> Result<(), ModelError> {
        if self.done.contains(&txn) {
            return Err(Self::malformed(
                index,
                format!("{txn} has already terminated"),
            ));
        }
        if !self.pending.contains_key(&txn) {
            return Err(Self::malformed(
                index,
                format!("{txn} steps on a base object outside a t-operation"),
            ));
        }
        Ok(())
    }

    pub(crate) fn top(&mut self, index: usize, e: &TOpEvent) -> Result<(), ModelError> {
        if self.done.contains(&e.txn) {
            return Err(Self::malformed(
                index,
                format!("{} has already terminated", e.txn),
            ));
        }
        match e.response {
            None => {
                if let Some(p) = self.pending.get(&e.txn) {
                    return Err(Self::malformed(
                        index,
                        format!("{} invokes {} while {p} is pending", e.txn, e.op),
                    ));
                }
                self.pending.insert(e.txn, e.op);
            }
            Some(r) => {
                match self.pending.remove(&e.txn) {
                    Some(op) if op == e.op => {}
                    Some(op) => {
                        return Err(Self::malformed(
                            index,
                            format!("{} responds to {} but {op} is pending", e.txn, e.op),
                        ))
                    }
                    None => {
                        return Err(Self::malformed(
                            index,
                            format!("{} responds to {} without an invocation", e.txn, e.op),
                        ))
                    }
                }
                if !e.op.admits(r) {
                    return Err(Self::malformed(
                        index,
                        format!("{} cannot return `{r}`", e.op),
                    ));
                }
                if e.is_terminal() {
                    self.done.insert(e.txn);
                }
            }
        }
        Ok(())
    }
}

/// Builds transaction records from positioned events; `None` marks a
/// base-object step.
pub(crate) fn build_records<'a>(
    items: impl IntoIterator<Item = (usize, TxnId, Option<&'a TOpEvent>)>,
) -> BTreeMap<TxnId, TxnRecord> {
    let mut out: BTreeMap<TxnId, TxnRecord> = BTreeMap::new();
    for (at, txn, top) in items {
        let rec = out.entry(txn).or_insert_with(|| TxnRecord::new(txn, at));
        rec.last = at;
        let Some(e) = top else { continue };
        match e.response {
            None => {
                match e.op {
                    TOp::Read(x) => {
                        rec.rset.insert(x);
                    }
                    TOp::Write(x, _) => {
                        rec.wset.insert(x);
                    }
                    TOp::TryCommit => {}
                }
                rec.status = TxnStatus::Live;
            }
            Some(OpResponse::Commit) => rec.status = TxnStatus::Committed,
            Some(OpResponse::Abort) => rec.status = TxnStatus::Aborted,
            Some(_) => rec.status = TxnStatus::Complete,
        }
    }
    out
}

/// The t-operation events of an execution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct History {
    events: Vec<TOpEvent>,
}

impl History {
    pub fn new(events: Vec<TOpEvent>) -> Result<Self, ModelError> {
        let mut wf = WellFormed::default();
        for (i, e) in events.iter().enumerate() {
            wf.top(i, e)?;
        }
        Ok(History { events })
    }

    pub(crate) fn new_unchecked(events: Vec<TOpEvent>) -> Self {
        History { events }
    }

    pub fn events(&self) -> &[TOpEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn txns(&self) -> BTreeSet<TxnId> {
        self.events.iter().map(|e| e.txn).collect()
    }

    /// `H|k`.
    pub fn project(&self, txn: TxnId) -> Vec<TOpEvent> {
        self.events
            .iter()
            .filter(|e| e.txn == txn)
            .copied()
            .collect()
    }

    pub fn records(&self) -> BTreeMap<TxnId, TxnRecord> {
        build_records(
            self.events
                .iter()
                .enumerate()
                .map(|(i, e)| (i, e.txn, Some(e))),
        )
    }

    /// `a` precedes `b` in the real-time order of this history.
    pub fn real_time_precedes(&self, a: TxnId, b: TxnId) -> Result<bool, ModelError> {
        let recs = self.records();
        let ra = recs.get(&a).ok_or(ModelError::UnknownTxn(a))?;
        let rb = recs.get(&b).ok_or(ModelError::UnknownTxn(b))?;
        Ok(ra.precedes(rb))
    }

    pub fn concurrent(&self, a: TxnId, b: TxnId) -> Result<bool, ModelError> {
        Ok(!self.real_time_precedes(a, b)? && !self.real_time_precedes(b, a)?)
    }

    /// The subsequence of events belonging to `keep`.
    pub fn restrict(&self, keep: &BTreeSet<TxnId>) -> History {
        History {
            events: self
                .events
                .iter()
                .filter(|e| keep.contains(&e.txn))
                .copied()
                .collect(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.records().values().all(|r| r.status != TxnStatus::Live)
    }

    pub fn is_t_complete(&self) -> bool {
        self.records().values().all(TxnRecord::is_t_complete)
    }

    /// Every invocation is either last or immediately followed by its response.
    pub fn is_sequential(&self) -> bool {
        self.events.iter().enumerate().all(|(i, e)| {
            !e.is_invocation()
                || match self.events.get(i + 1) {
                    None => true,
                    Some(n) => n.txn == e.txn && n.op == e.op && !n.is_invocation(),
                }
        })
    }

    /// No two transactions are concurrent.
    pub fn is_t_sequential(&self) -> bool {
        let recs: Vec<TxnRecord> = self.records().into_values().collect();
        recs.iter()
            .enumerate()
            .all(|(i, a)| recs[i + 1..].iter().all(|b| a.precedes(b) || b.precedes(a)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(k: u32, op: TOp) -> TOpEvent {
        TOpEvent::invoke(TxnId(k), op)
    }
    fn res(k: u32, op: TOp, r: OpResponse) -> TOpEvent {
        TOpEvent::respond(TxnId(k), op, r)
    }
    const X: TObjectId = TObjectId(1);

    #[test]
    fn real_time_order() {
        let c = TOp::TryCommit;
        let h = History::new(vec![
            inv(1, c),
            res(1, c, OpResponse::Commit),
            inv(2, TOp::Read(X)),
            res(2, TOp::Read(X), OpResponse::Value(0)),
        ])
        .unwrap();
        assert!(h.real_time_precedes(TxnId(1), TxnId(2)).unwrap());
        assert!(!h.real_time_precedes(TxnId(2), TxnId(1)).unwrap());
        assert_eq!(
            h.real_time_precedes(TxnId(1), TxnId(9)),
            Err(ModelError::UnknownTxn(TxnId(9)))
        );

        let overlap = History::new(vec![
            inv(1, TOp::Read(X)),
            inv(2, TOp::Read(X)),
            res(1, TOp::Read(X), OpResponse::Value(0)),
            res(2, TOp::Read(X), OpResponse::Value(0)),
        ])
        .unwrap();
        assert!(overlap.concurrent(TxnId(1), TxnId(2)).unwrap());

        // t-incomplete transactions never precede anything
        let incomplete = History::new(vec![
            inv(1, TOp::Read(X)),
            res(1, TOp::Read(X), OpResponse::Value(0)),
            inv(2, TOp::Read(X)),
        ])
        .unwrap();
        assert!(!incomplete.real_time_precedes(TxnId(1), TxnId(2)).unwrap());
    }

    #[test]
    fn malformed_histories_are_rejected() {
        let r = TOp::Read(X);
        assert!(History::new(vec![res(1, r, OpResponse::Value(0))]).is_err());
        assert!(History::new(vec![inv(1, r), inv(1, r)]).is_err());
        assert!(History::new(vec![inv(1, r), res(1, r, OpResponse::Ok)]).is_err());
        assert!(History::new(vec![inv(1, r), res(1, r, OpResponse::Abort), inv(1, r)]).is_err());
    }

    #[test]
    fn records_classify_transactions() {
        let w = TOp::Write(X, 3);
        let h = History::new(vec![
            inv(1, w),
            res(1, w, OpResponse::Ok),
            inv(2, TOp::Read(X)),
        ])
        .unwrap();
        let recs = h.records();
        assert!(recs[&TxnId(1)].is_updating() && recs[&TxnId(1)].is_write_only());
        assert_eq!(recs[&TxnId(1)].status, TxnStatus::Complete);
        assert!(recs[&TxnId(2)].is_read_only());
        assert_eq!(recs[&TxnId(2)].status, TxnStatus::Live);
        assert!(!h.is_complete() && !h.is_t_complete());
    }
}
