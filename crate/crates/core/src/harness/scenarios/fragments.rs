//! Background writers, then two fresh transactions run one after the
//! other, each without step contention, on disjoint data. A TM that only
//! lets connected transactions contend must keep the two fragments apart.

use crate::analysis::{contentions, disjoint_access};
use crate::model::{ProcessId, TOp, TxnId};
use crate::tms::{ReferenceTm, TmKind, DEFAULT_PROCESSES};

use super::super::{HarnessError, Scheduler};
use super::{render_ops, x, ScenarioKind, ScenarioParams, ScenarioReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentsSetup {
    /// Scripts run solo, one after the other, before the fragments.
    pub background: Vec<Vec<TOp>>,
    pub rho1: Vec<TOp>,
    /// May be empty, in which case nothing can contend.
    pub rho2: Vec<TOp>,
}

impl Default for FragmentsSetup {
    fn default() -> Self {
        FragmentsSetup {
            background: vec![vec![
                TOp::Write(x(1), 1),
                TOp::Write(x(2), 1),
                TOp::TryCommit,
            ]],
            rho1: vec![TOp::Read(x(1)), TOp::Write(x(1), 2), TOp::TryCommit],
            rho2: vec![TOp::Read(x(2)), TOp::Write(x(2), 3), TOp::TryCommit],
        }
    }
}

pub(super) fn run(tm: TmKind, params: &ScenarioParams) -> Result<ScenarioReport, HarnessError> {
    disjoint_fragments(tm, &FragmentsSetup::default(), params)
}

/// Runs `setup` and checks that no event of the first fragment contends
/// with an event of the second.
pub fn disjoint_fragments(
    tm: TmKind,
    setup: &FragmentsSetup,
    params: &ScenarioParams,
) -> Result<ScenarioReport, HarnessError> {
    let mut report = ScenarioReport::new(ScenarioKind::DisjointFragments, tm, Vec::new());
    let mut s = Scheduler::new(ReferenceTm::new(tm, DEFAULT_PROCESSES)).track_poised();
    s.begin_fragment("alpha");
    for (k, ops) in setup.background.iter().enumerate() {
        let t = TxnId(k as u32 + 1);
        let rs = s.run_solo(t, ProcessId(1), ops)?;
        report.line(format!("BACKGROUND {t} {}", render_ops(ops, &rs)));
    }
    s.end_fragment();

    let base = setup.background.len() as u32;
    let (ta, tb) = (TxnId(base + 1), TxnId(base + 2));
    let mut spans = Vec::new();
    for (label, t, p, ops) in [
        ("rho1", ta, ProcessId(2), &setup.rho1),
        ("rho2", tb, ProcessId(3), &setup.rho2),
    ] {
        let from = s.execution().len();
        if !ops.is_empty() {
            let rs = s.fragment(label, |s| s.run_solo(t, p, ops))?;
            report.line(format!("FRAGMENT {label} {t} {}", render_ops(ops, &rs)));
        }
        spans.push(from..s.execution().len());
    }

    let run = s.into_run("main");
    let history = run.execution.history();
    let exec = run.execution.clone();
    report.add_run(run);
    report.add_verdict("main", &history, &params.bound);

    if spans[1].is_empty() || spans[0].is_empty() {
        report.check("no-cross-contention", true, "a fragment is empty");
        return Ok(report);
    }
    let recs = exec.records();
    let separate = recs[&ta].dset().is_disjoint(&recs[&tb].dset())
        && disjoint_access(&exec, ta, tb).map_err(|e| HarnessError::Assertion(e.to_string()))?;
    report.line(format!(
        "PREMISE disjoint-access {}",
        if separate { "holds" } else { "fails" }
    ));

    let cross: Vec<_> = contentions(exec.events())
        .into_iter()
        .filter(|c| {
            (spans[0].contains(&c.i) && spans[1].contains(&c.j))
                || (spans[1].contains(&c.i) && spans[0].contains(&c.j))
        })
        .collect();
    for c in &cross {
        report.line(format!("CROSS-CONTENTION {} {} {}", c.i, c.j, c.base));
    }
    report.check("premise", separate, "");
    report.check(
        "no-cross-contention",
        cross.is_empty(),
        format!("{} pairs", cross.len()),
    );
    Ok(report)
}
