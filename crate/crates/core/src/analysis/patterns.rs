use std::collections::BTreeMap;

use crate::model::{BaseObjectId, Event, Execution, TOp, TxnId};

/// A write to `written` at `i` followed by a read of `read` at `j`, both by
/// `txn`, with no write to `read` by `txn` strictly in between.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawPair {
    pub txn: TxnId,
    pub i: usize,
    pub j: usize,
    pub written: BaseObjectId,
    pub read: BaseObjectId,
}

/// A nontrivial primitive whose response depends on the prior state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Awar {
    pub txn: TxnId,
    pub i: usize,
    pub base: BaseObjectId,
}

/// RAWs of `txn`, one per completing read: for every base-object read at
/// `j` that closes a RAW, the pair with the latest qualifying write.
///
/// Any nontrivial event writes its base object; any event whose primitive
/// observes the state reads it. Events of other transactions and
/// t-operation events are ignored, so the result only depends on `E|txn`.
pub fn find_raw(events: &[Event], txn: TxnId) -> Vec<RawPair> {
    let mut writes: Vec<(usize, &BaseObjectId)> = Vec::new();
    let mut out = Vec::new();
    for (j, e) in events.iter().enumerate() {
        let Some(r) = e.as_rmw().filter(|r| r.txn == txn) else {
            continue;
        };
        if r.prim.reads_base() {
            let found = writes
                .iter()
                .rev()
                .take_while(|(_, b)| **b != r.base)
                .next();
            if let Some(&(i, b)) = found {
                out.push(RawPair {
                    txn,
                    i,
                    j,
                    written: b.clone(),
                    read: r.base.clone(),
                });
            }
        }
        if !r.is_trivial() {
            writes.push((j, &r.base));
        }
    }
    out
}

pub fn find_awar(events: &[Event], txn: TxnId) -> Vec<Awar> {
    events
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let r = e.as_rmw().filter(|r| r.txn == txn && r.prim.is_awar())?;
            Some(Awar {
                txn,
                i,
                base: r.base.clone(),
            })
        })
        .collect()
}

/// Patterns attributed to one t-operation: those whose closing event lies
/// inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpPatterns {
    pub txn: TxnId,
    /// 0-based position of the operation within its transaction.
    pub index: usize,
    pub op: TOp,
    pub raws: Vec<RawPair>,
    pub awars: Vec<Awar>,
}

impl OpPatterns {
    pub fn count(&self) -> usize {
        self.raws.len() + self.awars.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternReport {
    pub ops: Vec<OpPatterns>,
}

impl PatternReport {
    /// `(raw, awar)` totals of `txn`.
    pub fn totals(&self, txn: TxnId) -> (usize, usize) {
        self.ops
            .iter()
            .filter(|o| o.txn == txn)
            .fold((0, 0), |(r, a), o| (r + o.raws.len(), a + o.awars.len()))
    }

    pub fn op(&self, txn: TxnId, index: usize) -> Option<&OpPatterns> {
        self.ops.iter().find(|o| o.txn == txn && o.index == index)
    }

    /// `RAW`/`AWAR` lines in event order, then one `PATTERNS` line per
    /// transaction that has any.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut per_txn: BTreeMap<TxnId, (usize, usize)> = BTreeMap::new();
        for o in &self.ops {
            for r in &o.raws {
                out.push(format!(
                    "RAW {} {} {} {} {} {}",
                    r.txn, o.op, r.i, r.j, r.written, r.read
                ));
            }
            for a in &o.awars {
                out.push(format!("AWAR {} {} {} {}", a.txn, o.op, a.i, a.base));
            }
            let t = per_txn.entry(o.txn).or_default();
            t.0 += o.raws.len();
            t.1 += o.awars.len();
        }
        for (txn, (r, a)) in per_txn {
            if r + a > 0 {
                out.push(format!("PATTERNS {txn} raw={r} awar={a}"));
            }
        }
        out
    }
}

pub fn pattern_report(exec: &Execution) -> PatternReport {
    let events = exec.events();
    let mut ops = Vec::new();
    for txn in exec.txns() {
        let raws = find_raw(events, txn);
        let awars = find_awar(events, txn);
        for (index, span) in exec.op_spans(txn).into_iter().enumerate() {
            let inside = |j: usize| span.steps.binary_search(&j).is_ok();
            ops.push((
                span.invoked_at,
                OpPatterns {
                    txn,
                    index,
                    op: span.op,
                    raws: raws.iter().filter(|r| inside(r.j)).cloned().collect(),
                    awars: awars.iter().filter(|a| inside(a.i)).cloned().collect(),
                },
            ));
        }
    }
    ops.sort_by_key(|(at, _)| *at);
    PatternReport {
        ops: ops.into_iter().map(|(_, o)| o).collect(),
    }
}
