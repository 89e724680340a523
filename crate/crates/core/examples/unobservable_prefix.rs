//! How far a committing writer gets before any reader can see it.

use tmlab::harness::{longest_unobservable_prefix, PrefixProbe, Scheduler};
use tmlab::model::{ProcessId, TObjectId, TOp, TxnId};
use tmlab::tms::{ReferenceTm, TmKind};

fn main() {
    let (x1, x3) = (TObjectId(1), TObjectId(3));
    let script = [TOp::Write(x1, 1), TOp::Write(x3, 1), TOp::TryCommit];
    let probes = [
        PrefixProbe { x: x1, target: 1 },
        PrefixProbe { x: x3, target: 1 },
    ];
    for kind in TmKind::ALL {
        let s = Scheduler::new(ReferenceTm::new(kind, 4));
        let p = longest_unobservable_prefix(
            &s,
            (TxnId(1), ProcessId(1)),
            &script,
            &probes,
            (TxnId(9), ProcessId(2)),
        )
        .unwrap();
        let seen: Vec<String> = p.observed_by.iter().map(ToString::to_string).collect();
        println!(
            "{kind}: {} of {} events unobservable, the next one is visible through {}",
            p.len,
            p.total,
            seen.join(",")
        );
    }
}
