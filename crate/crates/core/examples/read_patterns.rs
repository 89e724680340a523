//! Every read of a long read-only transaction on visible-read pays a RAW
//! or AWAR. Usage: `read_patterns [m]`.

use tmlab::harness::scenarios::{run_scenario, ScenarioKind, ScenarioParams};
use tmlab::tms::TmKind;

fn main() {
    let reads = std::env::args()
        .nth(1)
        .map_or(8, |a| a.parse().expect("a number"));
    let params = ScenarioParams {
        reads,
        ..ScenarioParams::default()
    };
    let r = run_scenario(ScenarioKind::ReadPatterns, TmKind::VisibleRead, &params).unwrap();
    for run in &r.runs {
        let s = tmlab::analysis::analyze(run);
        let (raw, awar) = s.patterns.totals(tmlab::model::TxnId(0));
        println!("{}: T0 raw={raw} awar={awar}", run.name);
    }
    for l in r.lines_with("SWEPT") {
        println!("{l}");
    }
    println!("{}", if r.passed() { "pass" } else { "fail" });
}
