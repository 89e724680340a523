use crate::model::{OpResponse, ProcessId, TObjectId, TOp, TxnId, Value};
use crate::tms::Tm;

use super::scheduler::Scheduler;
use super::HarnessError;

/// A single-read probe and the value that counts as observing the writer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrefixProbe {
    pub x: TObjectId,
    pub target: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnobservablePrefix {
    /// Events of the writer's solo run that no probe can observe.
    pub len: usize,
    /// Length of the full solo run.
    pub total: usize,
    /// Probes that observe the target once one more event is applied.
    pub observed_by: Vec<TObjectId>,
}

/// Runs `script` solo as `writer` from `base` and finds the longest prefix
/// of its events after which none of `probes`, run solo on a fork as
/// `probe_txn`, returns its target.
pub fn longest_unobservable_prefix<T: Tm>(
    base: &Scheduler<T>,
    writer: (TxnId, ProcessId),
    script: &[TOp],
    probes: &[PrefixProbe],
    probe: (TxnId, ProcessId),
) -> Result<UnobservablePrefix, HarnessError> {
    if script.is_empty() {
        return Ok(UnobservablePrefix {
            len: 0,
            total: 0,
            observed_by: Vec::new(),
        });
    }
    let mut s = base.clone();
    s.start(writer.0, writer.1)?;
    let observing = |s: &Scheduler<T>| -> Result<Vec<TObjectId>, HarnessError> {
        let mut seen = Vec::new();
        for p in probes {
            let got = s.probe_reads(probe.0, probe.1, &[p.x])?;
            if got == [p.target] {
                seen.push(p.x);
            }
        }
        Ok(seen)
    };

    let mut cursor = 0;
    let mut applied = 0;
    loop {
        let seen = observing(&s)?;
        if !seen.is_empty() {
            if applied == 0 {
                return Err(HarnessError::NoQualifyingPrefix(format!(
                    "probes observe their targets before {} takes a step",
                    writer.0
                )));
            }
            let total = applied + count_rest(&s, writer.0, script, cursor)?;
            return Ok(UnobservablePrefix {
                len: applied - 1,
                total,
                observed_by: seen,
            });
        }
        match s.advance_script(writer.0, script, &mut cursor)? {
            Some(_) => applied += 1,
            None => break,
        }
    }
    let committed =
        crate::harness::run::last_response(s.execution(), writer.0) == Some(OpResponse::Commit);
    Err(HarnessError::NoQualifyingPrefix(if committed {
        format!("no probe ever observes the writes of {}", writer.0)
    } else {
        format!("{} did not commit when run solo", writer.0)
    }))
}

fn count_rest<T: Tm>(
    s: &Scheduler<T>,
    txn: TxnId,
    script: &[TOp],
    cursor: usize,
) -> Result<usize, HarnessError> {
    let mut s = s.clone();
    let mut cursor = cursor;
    let mut n = 0;
    while s.advance_script(txn, script, &mut cursor)?.is_some() {
        n += 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Event, Primitive};
    use crate::tms::{ReferenceTm, TmKind};

    const X1: TObjectId = TObjectId(1);
    const X3: TObjectId = TObjectId(3);

    fn search(
        kind: TmKind,
        script: &[TOp],
        target: Value,
    ) -> Result<(UnobservablePrefix, Scheduler<ReferenceTm>), HarnessError> {
        let s = Scheduler::new(ReferenceTm::new(kind, 4));
        let probes = [PrefixProbe { x: X1, target }, PrefixProbe { x: X3, target }];
        let r = longest_unobservable_prefix(
            &s,
            (TxnId(1), ProcessId(1)),
            script,
            &probes,
            (TxnId(99), ProcessId(4)),
        )?;
        Ok((r, s))
    }

    const WRITER: [TOp; 3] = [TOp::Write(X1, 1), TOp::Write(X3, 1), TOp::TryCommit];

    #[test]
    fn mv_prefix_ends_before_the_clock_increment() {
        let (r, s) = search(TmKind::MvInvisible, &WRITER, 1).unwrap();
        let mut s = s;
        s.start(TxnId(1), ProcessId(1)).unwrap();
        let mut cursor = 0;
        for _ in 0..r.len {
            s.advance_script(TxnId(1), &WRITER, &mut cursor).unwrap();
        }
        let e = s
            .advance_script(TxnId(1), &WRITER, &mut cursor)
            .unwrap()
            .unwrap();
        let Event::Rmw(e) = e else {
            panic!("expected a step")
        };
        assert_eq!(e.base.as_str(), "clock");
        assert_eq!(e.prim, Primitive::FetchInc);
        assert_eq!(r.observed_by, vec![X1, X3]);
    }

    #[test]
    fn strict_dap_prefix_ends_before_the_first_install() {
        let (r, _) = search(TmKind::StrictDapAttempt, &WRITER, 1).unwrap();
        assert_eq!(r.observed_by, vec![X1]);
        assert!(r.len < r.total);
    }

    #[test]
    fn empty_writer() {
        let (r, _) = search(TmKind::MvInvisible, &[], 1).unwrap();
        assert_eq!(r.len, 0);
    }

    #[test]
    fn initial_value_target_is_degenerate() {
        assert!(matches!(
            search(TmKind::MvInvisible, &WRITER, 0),
            Err(HarnessError::NoQualifyingPrefix(_))
        ));
    }
}
