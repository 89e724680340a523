use crate::model::{History, OpResponse, TOp, TOpEvent, TxnId, TxnStatus};

use super::CheckError;

/// A decision taken while completing a history.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insertion {
    /// A pending read or write gets `A_k`.
    AbortPendingOp(TxnId),
    CommitPendingTryC(TxnId),
    AbortPendingTryC(TxnId),
    /// A complete but t-incomplete transaction gets `tryC_k · A_k`.
    AppendTryCAbort(TxnId),
}

impl Insertion {
    pub fn txn(&self) -> TxnId {
        match *self {
            Insertion::AbortPendingOp(k)
            | Insertion::CommitPendingTryC(k)
            | Insertion::AbortPendingTryC(k)
            | Insertion::AppendTryCAbort(k) => k,
        }
    }
}

/// A complete, t-complete history derived from `H` plus the insertions
/// that produced it. Insertions are placed at the end of the history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub history: History,
    pub insertions: Vec<Insertion>,
}

impl Completion {
    /// `C` or `A` for every transaction whose fate was decided here.
    pub fn describe(&self) -> String {
        self.insertions
            .iter()
            .map(|i| match i {
                Insertion::CommitPendingTryC(k) => format!("{k}=C"),
                other => format!("{}=A", other.txn()),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Enumerates every completion of `h`. Pending reads and writes always
/// abort; each pending `tryC` branches into commit and abort. Completions
/// come out in lexicographic order of (transaction id, commit before abort),
/// so the all-commit completion is first.
pub fn enumerate_completions(h: &History) -> impl Iterator<Item = Completion> + '_ {
    let mut fixed = Vec::new();
    let mut branching = Vec::new();
    for (k, rec) in h.records() {
        match rec.status {
            TxnStatus::Committed | TxnStatus::Aborted => {}
            TxnStatus::Complete => fixed.push(Insertion::AppendTryCAbort(k)),
            TxnStatus::Live => {
                let pending = h
                    .project(k)
                    .last()
                    .map(|e| e.op)
                    .expect("live transaction has a pending invocation");
                if pending == TOp::TryCommit {
                    branching.push(k);
                } else {
                    fixed.push(Insertion::AbortPendingOp(k));
                }
            }
        }
    }
    let n = branching.len();
    (0u64..(1u64 << n)).map(move |mask| {
        let mut insertions = fixed.clone();
        for (i, &k) in branching.iter().enumerate() {
            let abort = mask & (1 << (n - 1 - i)) != 0;
            insertions.push(if abort {
                Insertion::AbortPendingTryC(k)
            } else {
                Insertion::CommitPendingTryC(k)
            });
        }
        insertions.sort_by_key(Insertion::txn);
        let mut events = h.events().to_vec();
        for ins in &insertions {
            match *ins {
                Insertion::AbortPendingOp(k) => {
                    let op = h.project(k).last().expect("pending op").op;
                    events.push(TOpEvent::respond(k, op, OpResponse::Abort));
                }
                Insertion::CommitPendingTryC(k) => {
                    events.push(TOpEvent::respond(k, TOp::TryCommit, OpResponse::Commit))
                }
                Insertion::AbortPendingTryC(k) => {
                    events.push(TOpEvent::respond(k, TOp::TryCommit, OpResponse::Abort))
                }
                Insertion::AppendTryCAbort(k) => {
                    events.push(TOpEvent::invoke(k, TOp::TryCommit));
                    events.push(TOpEvent::respond(k, TOp::TryCommit, OpResponse::Abort));
                }
            }
        }
        Completion {
            history: History::new(events).expect("completion of a well-formed history"),
            insertions,
        }
    })
}

/// `cseq(H̄)`: the subsequence of committed transactions.
pub fn committed_projection(hbar: &History) -> Result<History, CheckError> {
    let recs = hbar.records();
    if !recs.values().all(|r| r.is_t_complete()) {
        return Err(CheckError::NotTComplete);
    }
    let keep = recs
        .values()
        .filter(|r| r.is_committed())
        .map(|r| r.id)
        .collect();
    Ok(hbar.restrict(&keep))
}
