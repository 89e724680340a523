//! T1 reads X; T2 reads Y, writes X and commits; T1 then writes Y and
//! tries to commit. If both commit, no serialization exists.

use crate::model::{OpResponse, ProcessId, TOp, TxnId};
use crate::tms::{ReferenceTm, TmKind, DEFAULT_PROCESSES};

use super::super::{HarnessError, Scheduler};
use super::{render_ops, x, ScenarioKind, ScenarioParams, ScenarioReport};

const NV: i64 = 1;

pub(super) fn run(tm: TmKind, params: &ScenarioParams) -> Result<ScenarioReport, HarnessError> {
    let mut report = ScenarioReport::new(
        ScenarioKind::Intro,
        tm,
        vec![("rounds", params.rounds.to_string())],
    );
    let (t1, t2) = (TxnId(1), TxnId(2));
    let (xo, yo) = (x(1), x(2));
    let mut outcomes = Vec::new();
    let mut all_serializable = true;

    for round in 1..=params.rounds {
        let mut s = Scheduler::new(ReferenceTm::new(tm, DEFAULT_PROCESSES)).track_poised();
        s.start(t1, ProcessId(1))?;
        let r1 = s.fragment("t1-read", |s| s.run_op(t1, TOp::Read(xo)))?;
        let t2_ops = [TOp::Read(yo), TOp::Write(xo, NV), TOp::TryCommit];
        let r2 = s.fragment("t2", |s| s.run_solo(t2, ProcessId(2), &t2_ops))?;
        let t1_ops = [TOp::Write(yo, NV), TOp::TryCommit];
        let r1b = if r1 == OpResponse::Abort {
            Vec::new()
        } else {
            s.fragment("t1-commit", |s| s.run_ops(t1, &t1_ops))?
        };

        let fate = |rs: &[OpResponse]| match rs.last() {
            Some(OpResponse::Commit) => "C",
            _ => "A",
        };
        let outcome = format!("T1={} T2={}", fate(&r1b), fate(&r2));
        let run = s.into_run(format!("round{round}"));
        let history = run.execution.history();
        report.add_run(run);
        report.line(format!(
            "OPS T1 read({xo})->{r1} {}",
            render_ops(&t1_ops, &r1b)
        ));
        report.line(format!("OPS T2 {}", render_ops(&t2_ops, &r2)));
        report.line(format!("OUTCOME {outcome}"));
        let verdict = report.add_verdict(&format!("round{round}"), &history, &params.bound);
        all_serializable &= verdict.is_serializable();
        outcomes.push(outcome);
    }

    report.check("serializable", all_serializable, "");
    let same = outcomes.windows(2).all(|w| w[0] == w[1]);
    report.check(
        "rounds-agree",
        same,
        outcomes.first().cloned().unwrap_or_default(),
    );
    Ok(report)
}
