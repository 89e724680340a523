use std::collections::BTreeSet;

use crate::harness::Scheduler;
use crate::model::{OpResponse, ProcessId, TObjectId, TOp, TxnId, Value};
use crate::tms::Tm;

use super::AnalysisError;

/// Where a distinct-values probe reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbePoint {
    /// Extend a live transaction (with no pending operation) by one read.
    Extend(TxnId),
    /// A fresh read-only transaction that reads and commits.
    Fresh(TxnId, ProcessId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctValues {
    pub x: TObjectId,
    pub responses: Vec<Value>,
    pub distinct: usize,
}

/// Reads `x` at every probe point, in order, on one fork of `sched`.
pub fn distinct_values_probe<T: Tm>(
    sched: &Scheduler<T>,
    x: TObjectId,
    points: &[ProbePoint],
) -> Result<DistinctValues, AnalysisError> {
    sched.probe(|s| {
        let mut responses = Vec::with_capacity(points.len());
        for &p in points {
            let (txn, commit) = match p {
                ProbePoint::Extend(txn) => (txn, false),
                ProbePoint::Fresh(txn, process) => {
                    s.start(txn, process)?;
                    (txn, true)
                }
            };
            match s.run_op(txn, TOp::Read(x))? {
                OpResponse::Value(v) => responses.push(v),
                _ => return Err(AnalysisError::ProbeAborted(txn)),
            }
            if commit && s.run_op(txn, TOp::TryCommit)? != OpResponse::Commit {
                return Err(AnalysisError::ProbeAborted(txn));
            }
        }
        let distinct = responses.iter().collect::<BTreeSet<_>>().len();
        Ok(DistinctValues {
            x,
            responses,
            distinct,
        })
    })
}
