//! Two back-to-back transactions on disjoint objects: a weak-DAP TM keeps
//! their base objects apart, a TM with global metadata does not.

use tmlab::harness::scenarios::{disjoint_fragments, FragmentsSetup, ScenarioParams};
use tmlab::model::{TObjectId, TOp};
use tmlab::tms::TmKind;

fn main() {
    let setup = FragmentsSetup {
        background: vec![vec![TOp::Write(TObjectId(1), 4), TOp::TryCommit]],
        rho1: vec![
            TOp::Read(TObjectId(1)),
            TOp::Write(TObjectId(2), 5),
            TOp::TryCommit,
        ],
        rho2: vec![
            TOp::Read(TObjectId(3)),
            TOp::Write(TObjectId(4), 6),
            TOp::TryCommit,
        ],
    };
    for tm in TmKind::ALL {
        let r = disjoint_fragments(tm, &setup, &ScenarioParams::default()).unwrap();
        let cross = r.lines_with("CROSS-CONTENTION");
        println!("{tm}: {} cross-fragment contentions", cross.len());
        for l in cross.iter().take(3) {
            println!("  {l}");
        }
    }
}
