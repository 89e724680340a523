//! Build a run from a declarative command list, with fragments, probes
//! and response assertions, then print the trace sidecar.

use tmlab::harness::{run_schedule, Command, Schedule, StepCount};
use tmlab::model::{OpResponse, ProcessId, TObjectId, TOp, TxnId};
use tmlab::tms::{ReferenceTm, TmKind};

fn main() {
    let (t1, t2, probe) = (TxnId(1), TxnId(2), TxnId(9));
    let (x1, x2) = (TObjectId(1), TObjectId(2));
    let schedule = Schedule {
        track_poised: true,
        commands: vec![
            Command::BeginFragment("writer".into()),
            Command::RunSolo {
                txn: t1,
                process: ProcessId(1),
                ops: vec![TOp::Write(x1, 1), TOp::Write(x2, 2), TOp::TryCommit],
            },
            Command::EndFragment,
            Command::Probe {
                label: "after-writer".into(),
                txn: probe,
                process: ProcessId(3),
                reads: vec![x1, x2],
            },
            Command::Start {
                txn: t2,
                process: ProcessId(2),
            },
            Command::Invoke {
                txn: t2,
                op: TOp::Read(x2),
            },
            Command::Step {
                txn: t2,
                count: StepCount::Events(1),
            },
            Command::Step {
                txn: t2,
                count: StepCount::ToCompletion,
            },
            Command::ExpectResponse {
                txn: t2,
                expected: OpResponse::Value(2),
            },
        ],
    };
    let (run, probes) =
        run_schedule(ReferenceTm::new(TmKind::MvInvisible, 4), "demo", &schedule).unwrap();
    for p in &probes {
        println!("probe {}: {:?}", p.label, p.values);
    }
    println!("{} events", run.execution.len());
    print!("{}", run.format_sidecar());
}
