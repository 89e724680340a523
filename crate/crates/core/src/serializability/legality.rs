use std::collections::BTreeMap;

use crate::model::{History, OpResponse, TOp, Value, INITIAL_VALUE};

use super::CheckError;

/// Latest written value for the read at position `index` of the
/// t-sequential history `s` (either its invocation or its response).
///
/// Own earlier writes win; otherwise the last write to the object by a
/// committed transaction that precedes the reader; otherwise the value the
/// initial transaction wrote.
pub fn latest_written_value(s: &History, index: usize) -> Result<Value, CheckError> {
    let ev = s.events().get(index).ok_or(CheckError::NotARead(index))?;
    let TOp::Read(x) = ev.op else {
        return Err(CheckError::NotARead(index));
    };
    let k = ev.txn;
    let events = s.events();

    let own = events[..index]
        .iter()
        .rev()
        .filter(|e| e.txn == k && e.is_invocation())
        .find_map(|e| match e.op {
            TOp::Write(y, v) if y == x => Some(v),
            _ => None,
        });
    if let Some(v) = own {
        return Ok(v);
    }

    let recs = s.records();
    let reader = &recs[&k];
    let committed_before = |m| {
        m != k
            && recs
                .get(&m)
                .is_some_and(|r| r.is_committed() && r.last < reader.first)
    };
    Ok(events
        .iter()
        .rev()
        .filter(|e| e.is_invocation() && committed_before(e.txn))
        .find_map(|e| match e.op {
            TOp::Write(y, v) if y == x => Some(v),
            _ => None,
        })
        .unwrap_or(INITIAL_VALUE))
}

/// Every read in `s` that does not return `A_k` returns its latest written
/// value.
pub fn is_legal_tsequential(s: &History) -> Result<bool, CheckError> {
    if !s.is_t_sequential() {
        return Err(CheckError::NotTSequential);
    }
    let mut committed: BTreeMap<_, Value> = BTreeMap::new();
    let mut local: BTreeMap<_, Value> = BTreeMap::new();
    let mut current = None;
    for e in s.events() {
        if current != Some(e.txn) {
            local.clear();
            current = Some(e.txn);
        }
        match (e.op, e.response) {
            (TOp::Write(x, v), None) => {
                local.insert(x, v);
            }
            (TOp::Read(x), Some(OpResponse::Value(got))) => {
                let expected = local
                    .get(&x)
                    .or_else(|| committed.get(&x))
                    .copied()
                    .unwrap_or(INITIAL_VALUE);
                if got != expected {
                    return Ok(false);
                }
            }
            (TOp::TryCommit, Some(OpResponse::Commit)) => {
                committed.extend(local.iter().map(|(x, v)| (*x, *v)));
            }
            _ => {}
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TObjectId, TOpEvent, TxnId};

    const X: TObjectId = TObjectId(1);

    fn inv(k: u32, op: TOp) -> TOpEvent {
        TOpEvent::invoke(TxnId(k), op)
    }
    fn res(k: u32, op: TOp, r: OpResponse) -> TOpEvent {
        TOpEvent::respond(TxnId(k), op, r)
    }
    fn txn(k: u32, ops: &[(TOp, OpResponse)]) -> Vec<TOpEvent> {
        ops.iter()
            .flat_map(|&(op, r)| [inv(k, op), res(k, op, r)])
            .collect()
    }
    fn read(v: Value) -> (TOp, OpResponse) {
        (TOp::Read(X), OpResponse::Value(v))
    }
    fn write(v: Value) -> (TOp, OpResponse) {
        (TOp::Write(X, v), OpResponse::Ok)
    }
    const COMMIT: (TOp, OpResponse) = (TOp::TryCommit, OpResponse::Commit);
    const ABORT: (TOp, OpResponse) = (TOp::TryCommit, OpResponse::Abort);

    #[test]
    fn own_write_is_latest() {
        let s = History::new(txn(1, &[write(9), read(9), COMMIT])).unwrap();
        assert_eq!(latest_written_value(&s, 2), Ok(9));
        assert_eq!(is_legal_tsequential(&s), Ok(true));
    }

    #[test]
    fn initial_transaction_supplies_value() {
        let s = History::new(txn(1, &[read(0)])).unwrap();
        assert_eq!(latest_written_value(&s, 1), Ok(0));
    }

    #[test]
    fn aborted_writes_are_invisible() {
        let mut ev = txn(1, &[write(3), COMMIT]);
        ev.extend(txn(2, &[write(5), ABORT]));
        ev.extend(txn(3, &[read(3)]));
        let s = History::new(ev).unwrap();
        assert_eq!(latest_written_value(&s, 8), Ok(3));
        assert_eq!(latest_written_value(&s, 9), Ok(3));
        assert_eq!(latest_written_value(&s, 0), Err(CheckError::NotARead(0)));
    }

    #[test]
    fn legality() {
        assert_eq!(is_legal_tsequential(&History::default()), Ok(true));
        let mut ev = txn(1, &[write(1), COMMIT]);
        ev.extend(txn(2, &[read(0)]));
        assert_eq!(is_legal_tsequential(&History::new(ev).unwrap()), Ok(false));

        let concurrent = History::new(vec![inv(1, TOp::Read(X)), inv(2, TOp::Read(X))]).unwrap();
        assert_eq!(
            is_legal_tsequential(&concurrent),
            Err(CheckError::NotTSequential)
        );
    }
}
