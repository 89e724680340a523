//! T1 writes X1 and X3. Its solo run is cut at the longest prefix no
//! reader can observe; one reader (T0) runs there, T1 takes one more step,
//! then a reader of the now-visible object (T3), a writer of X2 (T2), and
//! finally T0 reads X2. A TM that keeps read-only transactions wait-free
//! and strictly serializable must have let two transactions with disjoint
//! data sets contend somewhere along the way.

use crate::analysis::check_strict_dap;
use crate::model::{OpResponse, ProcessId, TObjectId, TOp, TxnId, Value};
use crate::tms::{ReferenceTm, TmKind, DEFAULT_PROCESSES};

use super::super::{longest_unobservable_prefix, HarnessError, PrefixProbe, Scheduler};
use super::{render_ops, x, ScenarioKind, ScenarioParams, ScenarioReport};

const NV: Value = 1;

pub(super) fn run(
    tm_kind: TmKind,
    params: &ScenarioParams,
) -> Result<ScenarioReport, HarnessError> {
    let mut report = ScenarioReport::new(ScenarioKind::DapAdversary, tm_kind, Vec::new());
    let (t0, t1, t2, t3) = (TxnId(0), TxnId(1), TxnId(2), TxnId(3));
    let (p1, p2, p3, p4) = (ProcessId(1), ProcessId(2), ProcessId(3), ProcessId(4));
    let writer = [TOp::Write(x(1), NV), TOp::Write(x(3), NV), TOp::TryCommit];

    let mut s = Scheduler::new(ReferenceTm::new(tm_kind, DEFAULT_PROCESSES)).track_poised();
    let probes = [
        PrefixProbe {
            x: x(1),
            target: NV,
        },
        PrefixProbe {
            x: x(3),
            target: NV,
        },
    ];
    let prefix = match longest_unobservable_prefix(&s, (t1, p1), &writer, &probes, (TxnId(99), p4))
    {
        Ok(p) => p,
        Err(e) => {
            report.line(format!("PREMISE {e}"));
            report.check("exactly-one-disjunct", false, "no schedule could be built");
            return Ok(report);
        }
    };
    // the object a reader can see after one more step of T1
    let seen: TObjectId = if prefix.observed_by.contains(&x(3)) {
        x(3)
    } else {
        x(1)
    };
    let other = if seen == x(3) { x(1) } else { x(3) };
    report.line(format!(
        "PREFIX len={} total={} observed={}",
        prefix.len,
        prefix.total,
        prefix
            .observed_by
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    ));
    report.line(format!("BRANCH alpha1={other} beta={seen}"));

    s.start(t1, p1)?;
    let mut cursor = 0;
    s.fragment("pi'", |s| {
        for _ in 0..prefix.len {
            s.advance_script(t1, &writer, &mut cursor)?;
        }
        Ok(())
    })?;
    let a1 = s.fragment("alpha1", |s| {
        s.start(t0, p2)?;
        s.run_op(t0, TOp::Read(other))
    })?;
    s.fragment("e", |s| {
        s.advance_script(t1, &writer, &mut cursor).map(|_| ())
    })?;
    let beta = [TOp::Read(seen), TOp::TryCommit];
    let b = s.fragment("beta", |s| s.run_solo(t3, p4, &beta))?;
    let gamma = [TOp::Write(x(2), NV), TOp::TryCommit];
    let g = s.fragment("gamma", |s| s.run_solo(t2, p3, &gamma))?;
    let alpha2 = [TOp::Read(x(2)), TOp::TryCommit];
    let a2 = if a1 == OpResponse::Abort {
        Vec::new()
    } else {
        s.fragment("alpha2", |s| s.run_ops(t0, &alpha2))?
    };

    report.line(format!("FRAGMENT alpha1 {t0} read({other})->{a1}"));
    report.line(format!("FRAGMENT beta {t3} {}", render_ops(&beta, &b)));
    report.line(format!("FRAGMENT gamma {t2} {}", render_ops(&gamma, &g)));
    report.line(format!("FRAGMENT alpha2 {t0} {}", render_ops(&alpha2, &a2)));

    let run = s.into_run("main");
    let history = run.execution.history();
    let sdap = check_strict_dap(&run.execution);
    report.add_run(run);
    let verdict = report.add_verdict("final", &history, &params.bound);

    let read_only_abort = [a1]
        .iter()
        .chain(&a2)
        .chain(&b)
        .any(|&r| r == OpResponse::Abort);
    let disjuncts = [
        ("read-only-abort", read_only_abort),
        ("cross-dset-contention", !sdap.is_empty()),
        ("not-serializable", !verdict.is_serializable()),
    ];
    let fired: Vec<&str> = disjuncts.iter().filter(|d| d.1).map(|d| d.0).collect();
    for (name, on) in disjuncts {
        report.line(format!(
            "DISJUNCT {name} {}",
            if on { "fired" } else { "quiet" }
        ));
    }
    report.check("exactly-one-disjunct", fired.len() == 1, fired.join(","));
    Ok(report)
}
