//! Phase construction: reader `T(2i)` starts after writer `T(2i-1)` has
//! installed phase `i` on every object and stays live until all phases are
//! done. Each reader must later see its own phase, so a TM with invisible
//! reads has to keep one version per phase.
//!
//! A final pair of writers on the first and last object is invoked so that
//! both are poised on their first commit step at the same time.

use std::collections::BTreeSet;

use crate::analysis::{distinct_values_probe, ProbePoint};
use crate::model::{OpResponse, ProcessId, TOp, TxnId, Value, INITIAL_VALUE};
use crate::tms::{ReferenceTm, Tm, TmKind, DEFAULT_PROCESSES};

use super::super::{Fate, HarnessError, Scheduler};
use super::{x, ScenarioKind, ScenarioParams, ScenarioReport};

/// Value written to object `l` in phase `i`; phase 0 is the initial value.
pub(crate) fn phase_value(i: usize, l: usize) -> Value {
    if i == 0 {
        INITIAL_VALUE
    } else {
        (10 * i + l) as Value
    }
}

fn reader(i: usize) -> TxnId {
    TxnId(2 * i as u32)
}

fn writer(i: usize) -> TxnId {
    TxnId(2 * i as u32 - 1)
}

/// Phases packed into one serializability window.
const WINDOW_PHASES: usize = 5;

pub(super) fn run(
    tm_kind: TmKind,
    params: &ScenarioParams,
) -> Result<ScenarioReport, HarnessError> {
    let (c, l_count) = (params.phases, params.objects);
    let mut report = ScenarioReport::new(
        ScenarioKind::VersionGrowth,
        tm_kind,
        vec![("phases", c.to_string()), ("objects", l_count.to_string())],
    );
    let processes = DEFAULT_PROCESSES.max(c as u32 + 1);
    let writer_process = ProcessId(c as u32 + 1);
    let tm = ReferenceTm::new(tm_kind, processes);
    let mut s = Scheduler::new(tm.clone()).track_poised();
    let mut mismatches: Vec<String> = Vec::new();
    let mut expect = |what: String, got: OpResponse, want: OpResponse| {
        if got != want {
            mismatches.push(format!("{what}->{got}(want {want})"));
        }
    };

    for i in 0..c {
        if i > 0 {
            let ops: Vec<TOp> = (1..=l_count)
                .map(|l| TOp::Write(x(l), phase_value(i, l)))
                .chain([TOp::TryCommit])
                .collect();
            let rs = s.fragment(format!("rho{i}"), |s| {
                s.run_solo(writer(i), writer_process, &ops)
            })?;
            let last = rs.last().copied().unwrap_or(OpResponse::Abort);
            expect(format!("{}:tryC", writer(i)), last, OpResponse::Commit);
        }
        let r = s.fragment(format!("alpha{i}"), |s| {
            s.start(reader(i), ProcessId(i as u32 + 1))?;
            s.run_op(reader(i), TOp::Read(x(1)))
        })?;
        expect(
            format!("{}:read({})", reader(i), x(1)),
            r,
            OpResponse::Value(phase_value(i, 1)),
        );
    }

    // every reader, extended by one more read of each object
    for l in 1..=l_count {
        let points: Vec<ProbePoint> = (0..c)
            .map(reader)
            .filter(|&t| s.fate(t) == Some(Fate::Running))
            .map(ProbePoint::Extend)
            .collect();
        match distinct_values_probe(&s, x(l), &points) {
            Ok(d) => {
                report.line(format!("DISTINCT {} {}", x(l), d.distinct));
                report.check(
                    &format!("distinct-{}", x(l)),
                    d.distinct >= c,
                    format!("{} >= {c}", d.distinct),
                );
            }
            Err(e) => report.check(&format!("distinct-{}", x(l)), false, e.to_string()),
        }
        if let Some(n) = tm.version_count(s.config().memory(), x(l)) {
            report.line(format!("VERSIONS {} {n}", x(l)));
            report.check(&format!("versions-{}", x(l)), n >= c, format!("{n} >= {c}"));
        }
    }

    s.begin_fragment("extend");
    for i in 0..c {
        let t = reader(i);
        if s.fate(t) != Some(Fate::Running) {
            continue;
        }
        for l in 2..=l_count {
            let r = s.run_op(t, TOp::Read(x(l)))?;
            expect(
                format!("{t}:read({})", x(l)),
                r,
                OpResponse::Value(phase_value(i, l)),
            );
            if r == OpResponse::Abort {
                break;
            }
        }
        if s.fate(t) == Some(Fate::Running) {
            let r = s.run_op(t, TOp::TryCommit)?;
            expect(format!("{t}:tryC"), r, OpResponse::Commit);
        }
    }
    s.end_fragment();

    let mut coda = Vec::new();
    if l_count >= 2 {
        let a = (TxnId(2 * c as u32), ProcessId(1), x(1), phase_value(c, 1));
        let b = (
            TxnId(2 * c as u32 + 1),
            writer_process,
            x(l_count),
            phase_value(c, l_count),
        );
        s.begin_fragment("coda");
        for &(t, p, obj, v) in &[a, b] {
            s.start(t, p)?;
            s.run_op(t, TOp::Write(obj, v))?;
            s.invoke(t, TOp::TryCommit)?;
        }
        for &(t, ..) in &[a, b] {
            let r = s.finish_op(t)?;
            expect(format!("{t}:tryC"), r, OpResponse::Commit);
        }
        s.end_fragment();
        coda = vec![a.0, b.0];
    }

    let run = s.into_run("main");
    let history = run.execution.history();
    let summary = report.add_run(run);
    report.check(
        "invisible-reads",
        summary.invisible.is_empty(),
        format!(
            "{} nontrivial events in read-only transactions",
            summary.invisible.len()
        ),
    );
    report.check("responses", mismatches.is_empty(), mismatches.join(" "));

    let verdict = report.add_verdict("full", &history, &params.bound);
    let serializable = if history.txns().len() <= params.bound.max_txns {
        verdict.is_serializable()
    } else {
        // windows of whole phases; reader i only reads what writer i wrote
        let phase_txns = |i: usize| -> Vec<TxnId> {
            if i == 0 {
                vec![reader(0)]
            } else {
                vec![writer(i), reader(i)]
            }
        };
        let width = WINDOW_PHASES.min(params.bound.max_txns / 2).max(1);
        let mut ok = true;
        for start in 0..=c.saturating_sub(width) {
            let keep: BTreeSet<TxnId> = (start..(start + width).min(c))
                .flat_map(phase_txns)
                .collect();
            let label = format!("phases{}-{}", start, (start + width).min(c) - 1);
            ok &= report
                .add_verdict(&label, &history.restrict(&keep), &params.bound)
                .is_serializable();
        }
        if !coda.is_empty() {
            let room = params.bound.max_txns.saturating_sub(coda.len()) / 2;
            let first = c.saturating_sub(room.max(1));
            let keep: BTreeSet<TxnId> = (first..c)
                .flat_map(phase_txns)
                .chain(coda.iter().copied())
                .collect();
            ok &= report
                .add_verdict(
                    &format!("phases{first}-{}+coda", c - 1),
                    &history.restrict(&keep),
                    &params.bound,
                )
                .is_serializable();
        }
        ok
    };
    report.check("serializable", serializable, "");
    Ok(report)
}
