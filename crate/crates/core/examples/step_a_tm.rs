//! Drive a reference TM one base-object step at a time.

use tmlab::harness::{Scheduler, StepOutcome};
use tmlab::model::{ProcessId, TObjectId, TOp, TxnId};
use tmlab::tms::{ReferenceTm, TmKind};

fn main() {
    let (t1, t2) = (TxnId(1), TxnId(2));
    let x1 = TObjectId(1);
    let mut s = Scheduler::new(ReferenceTm::new(TmKind::VisibleRead, 2)).track_poised();

    s.start(t1, ProcessId(1)).unwrap();
    s.run_op(t1, TOp::Write(x1, 7)).unwrap();
    s.invoke(t1, TOp::TryCommit).unwrap();
    // T1 takes the lock and stops
    while let Some((base, prim)) = s.poised(t1) {
        println!("T1 poised on {base} with {prim}");
        if let StepOutcome::Applied(e) = s.step(t1).unwrap() {
            if e.base.as_str().ends_with(".lock") {
                break;
            }
        }
    }

    // a fork sees what a reader would get now, without touching the run
    let seen = s.probe_reads(t2, ProcessId(2), &[x1]).unwrap();
    println!("probe reads X1 = {seen:?} while T1 holds the lock");

    println!("T1 commits: {}", s.finish_op(t1).unwrap());
    println!(
        "probe reads X1 = {:?}",
        s.probe_reads(t2, ProcessId(2), &[x1]).unwrap()
    );
    print!("{}", tmlab::model::trace::format_trace(s.execution()));
}
