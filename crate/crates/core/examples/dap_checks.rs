//! Contention between two writers of different objects: strict DAP, the
//! conflict graph, and weak DAP from poised annotations.

use tmlab::analysis::{analyze, check_strict_dap, conflict_graph, disjoint_access};
use tmlab::harness::Scheduler;
use tmlab::model::{ProcessId, TObjectId, TOp, TxnId};
use tmlab::tms::{ReferenceTm, TmKind};

fn main() {
    let (t1, t2) = (TxnId(1), TxnId(2));
    for kind in [TmKind::MvInvisible, TmKind::VisibleRead] {
        let mut s = Scheduler::new(ReferenceTm::new(kind, 4)).track_poised();
        // both writers reach tryC, then finish one after the other
        for (t, x) in [(t1, TObjectId(1)), (t2, TObjectId(2))] {
            s.start(t, ProcessId(t.0)).unwrap();
            s.run_op(t, TOp::Write(x, 1)).unwrap();
            s.invoke(t, TOp::TryCommit).unwrap();
        }
        s.finish_op(t1).unwrap();
        s.finish_op(t2).unwrap();
        let run = s.into_run("writers");

        println!("== {kind}");
        let g = conflict_graph(&run.execution, t1, t2).unwrap();
        let edges: Vec<String> = g.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        println!(
            "conflict graph: {} vertices, edges [{}]",
            g.vertices.len(),
            edges.join(" ")
        );
        println!(
            "disjoint-access: {}",
            disjoint_access(&run.execution, t1, t2).unwrap()
        );
        for v in check_strict_dap(&run.execution) {
            println!(
                "strict-DAP: {} and {} contend on {} at {} and {}",
                v.t1, v.t2, v.base, v.i, v.j
            );
        }
        for line in analyze(&run)
            .lines()
            .iter()
            .filter(|l| l.starts_with("WDAP") || l.starts_with("SUMMARY"))
        {
            println!("{line}");
        }
    }
}
