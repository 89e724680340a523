//! Pinned readers force an invisible-read TM to keep one version per
//! phase. Usage: `version_growth [phases] [objects]`.

use tmlab::harness::scenarios::{run_scenario, ScenarioKind, ScenarioParams};
use tmlab::tms::TmKind;

fn main() {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("a number"));
    let params = ScenarioParams {
        phases: args.next().unwrap_or(6),
        objects: args.next().unwrap_or(2),
        ..ScenarioParams::default()
    };
    for tm in [TmKind::MvInvisible, TmKind::VisibleRead] {
        let r = run_scenario(ScenarioKind::VersionGrowth, tm, &params).unwrap();
        println!("== {tm}: {}", if r.passed() { "pass" } else { "fail" });
        for l in r
            .lines_with("DISTINCT")
            .into_iter()
            .chain(r.lines_with("VERSIONS"))
        {
            println!("{l}");
        }
        for c in r.checks.iter().filter(|c| !c.passed) {
            println!("failed {}: {}", c.name, c.detail);
        }
    }
}
