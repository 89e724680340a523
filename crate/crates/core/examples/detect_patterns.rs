//! RAW/AWAR patterns and invisible-read violations of each reference TM on
//! the same two-transaction workload.

use tmlab::analysis::{invisible_reads_violations, pattern_report};
use tmlab::harness::Scheduler;
use tmlab::model::{ProcessId, TObjectId, TOp, TxnId};
use tmlab::tms::{ReferenceTm, TmKind};

fn main() {
    let (x1, x2) = (TObjectId(1), TObjectId(2));
    for kind in TmKind::ALL {
        let mut s = Scheduler::new(ReferenceTm::new(kind, 4));
        s.run_solo(
            TxnId(1),
            ProcessId(1),
            &[TOp::Write(x1, 1), TOp::Write(x2, 1), TOp::TryCommit],
        )
        .unwrap();
        s.run_solo(
            TxnId(2),
            ProcessId(2),
            &[TOp::Read(x1), TOp::Read(x2), TOp::TryCommit],
        )
        .unwrap();
        let exec = s.execution();
        println!("== {kind}");
        for line in pattern_report(exec).lines() {
            println!("{line}");
        }
        println!(
            "invisible-read violations: {:?}",
            invisible_reads_violations(exec)
        );
    }
}
