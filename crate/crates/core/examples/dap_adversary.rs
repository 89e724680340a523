//! The adversary schedule against each TM, and which guarantee gives way.

use tmlab::harness::scenarios::{run_scenario, ScenarioKind, ScenarioParams};
use tmlab::tms::TmKind;

fn main() {
    for tm in TmKind::ALL {
        let r = run_scenario(ScenarioKind::DapAdversary, tm, &ScenarioParams::default()).unwrap();
        println!("== {tm}");
        for l in r
            .lines_with("FRAGMENT")
            .into_iter()
            .chain(r.lines_with("DISJUNCT"))
        {
            println!("{l}");
        }
    }
}
