//! T0 reads X1..Xm and commits. For a chosen read `j`, the read is split
//! before its first nontrivial step and a writer of Xj (T_j) runs solo in
//! the gap. A separate writer of Xm (T_{m+1}) runs either before T0 starts
//! (ordering `b`) or right after the split read (ordering `c`).

use crate::model::{OpResponse, ProcessId, TOp, TxnId, Value};
use crate::tms::{ReferenceTm, TmKind, DEFAULT_PROCESSES};

use super::super::{HarnessError, Scheduler};
use super::{x, ScenarioKind, ScenarioParams, ScenarioReport};

const NV: Value = 1;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ordering {
    /// Xm's writer runs before T0 starts.
    Before,
    /// Xm's writer runs right after the split read.
    After,
}

impl Ordering {
    fn tag(self) -> &'static str {
        match self {
            Ordering::Before => "b",
            Ordering::After => "c",
        }
    }
}

pub(super) fn run(
    tm_kind: TmKind,
    params: &ScenarioParams,
) -> Result<ScenarioReport, HarnessError> {
    let m = params.reads;
    let sweep: Vec<usize> = match params.split {
        Some(j) => vec![j],
        None => (1..m).collect(),
    };
    let mut report = ScenarioReport::new(
        ScenarioKind::ReadPatterns,
        tm_kind,
        vec![
            ("reads", m.to_string()),
            (
                "split",
                params.split.map_or("sweep".to_string(), |j| j.to_string()),
            ),
        ],
    );
    let t0 = TxnId(0);
    let last_writer = TxnId(m as u32 + 1);
    let mut failures: Vec<(&str, String)> = Vec::new();
    let mut min_total = usize::MAX;

    for &j in &sweep {
        for ordering in [Ordering::Before, Ordering::After] {
            let name = format!("j{j}-{}", ordering.tag());
            let mut s = Scheduler::new(ReferenceTm::new(tm_kind, DEFAULT_PROCESSES)).track_poised();
            let delta_m = [TOp::Write(x(m), NV), TOp::TryCommit];
            let mut writer_fates = Vec::new();
            if ordering == Ordering::Before {
                writer_fates.push(s.fragment("delta_m", |s| {
                    s.run_solo(last_writer, ProcessId(3), &delta_m)
                })?);
            }
            s.start(t0, ProcessId(1))?;
            let mut reads = Vec::new();
            for i in 1..j {
                reads.push(s.fragment(format!("alpha_{i}"), |s| s.run_op(t0, TOp::Read(x(i))))?);
            }
            s.invoke(t0, TOp::Read(x(j)))?;
            s.fragment(format!("alpha_{j}^1"), |s| {
                while let Some((_, prim)) = s.poised(t0) {
                    if !prim.is_trivial() {
                        break;
                    }
                    s.step(t0)?;
                }
                Ok(())
            })?;
            let tj = TxnId(j as u32);
            let delta_j = [TOp::Write(x(j), NV), TOp::TryCommit];
            writer_fates.push(s.fragment(format!("delta_{j}"), |s| {
                s.run_solo(tj, ProcessId(2), &delta_j)
            })?);
            reads.push(s.fragment(format!("alpha_{j}^2"), |s| s.finish_op(t0))?);
            if ordering == Ordering::After {
                writer_fates.push(s.fragment("delta_m", |s| {
                    s.run_solo(last_writer, ProcessId(3), &delta_m)
                })?);
            }
            s.begin_fragment("rest");
            for i in j + 1..=m {
                let r = s.run_op(t0, TOp::Read(x(i)))?;
                reads.push(r);
                if r == OpResponse::Abort {
                    break;
                }
            }
            let commit = if reads.last() == Some(&OpResponse::Abort) {
                OpResponse::Abort
            } else {
                s.run_op(t0, TOp::TryCommit)?
            };
            s.end_fragment();

            let run = s.into_run(name.clone());
            let history = run.execution.history();
            let summary = report.add_run(run);
            let rendered: Vec<String> = reads.iter().map(ToString::to_string).collect();
            report.line(format!("READS {t0} {} tryC->{commit}", rendered.join(" ")));
            let writers_ok = writer_fates
                .iter()
                .all(|f| f.last() == Some(&OpResponse::Commit));
            report.line(format!(
                "WRITERS {}",
                if writers_ok { "committed" } else { "aborted" }
            ));

            let swept = summary.patterns.op(t0, j - 1).map_or(0, |o| o.count());
            let (raw, awar) = summary.patterns.totals(t0);
            report.line(format!("SWEPT {t0} read({}) patterns={swept}", x(j)));
            min_total = min_total.min(raw + awar);

            if commit != OpResponse::Commit {
                failures.push(("t0-commits", name.clone()));
            }
            if ordering == Ordering::Before && reads.get(m - 1) != Some(&OpResponse::Value(NV)) {
                failures.push(("last-read-new-value", name.clone()));
            }
            if swept == 0 {
                failures.push(("pattern-per-swept-read", name.clone()));
            }
            let verdict = report.add_verdict(&name, &history, &params.bound);
            if history.txns().len() <= params.bound.max_txns && !verdict.is_serializable() {
                failures.push(("serializable", name.clone()));
            }
        }
    }

    for check in [
        "t0-commits",
        "last-read-new-value",
        "pattern-per-swept-read",
        "serializable",
    ] {
        let bad: Vec<&str> = failures
            .iter()
            .filter(|f| f.0 == check)
            .map(|f| f.1.as_str())
            .collect();
        report.check(check, bad.is_empty(), bad.join(","));
    }
    let want = m - 1;
    report.check(
        "total-patterns",
        min_total >= want,
        format!("min {min_total} >= {want}"),
    );
    Ok(report)
}
