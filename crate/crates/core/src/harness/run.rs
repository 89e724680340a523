use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{
    BaseObjectId, Event, Execution, OpResponse, Primitive, ProcessId, TObjectId, TOp, TxnId, Value,
};
use crate::tms::Tm;

use super::scheduler::{Fate, Scheduler};
use super::HarnessError;

/// `txn` would apply `prim` to `base` as its next event after the first
/// `prefix` events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poised {
    pub prefix: usize,
    pub txn: TxnId,
    pub base: BaseObjectId,
    pub prim: Primitive,
}

/// Events `from..to` belong to the fragment `label`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSnapshot {
    pub label: String,
    pub prefix: usize,
    pub memory: BTreeMap<BaseObjectId, Value>,
}

/// An execution plus what the scheduler knew while producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedRun {
    pub name: String,
    pub execution: Execution,
    /// `None` when poised tracking was off.
    pub poised: Option<Vec<Poised>>,
    pub fragments: Vec<Fragment>,
    pub snapshots: Vec<LabeledSnapshot>,
}

impl AnnotatedRun {
    /// Builds a run from a replayed trace and an optional sidecar.
    pub fn from_parts(
        name: impl Into<String>,
        execution: Execution,
        sidecar: Option<Sidecar>,
    ) -> Self {
        let (poised, fragments) = match sidecar {
            Some(s) => (Some(s.poised), s.fragments),
            None => (None, Vec::new()),
        };
        AnnotatedRun {
            name: name.into(),
            execution,
            poised,
            fragments,
            snapshots: Vec::new(),
        }
    }

    pub fn fragment(&self, label: &str) -> Option<&Fragment> {
        self.fragments.iter().find(|f| f.label == label)
    }

    /// The annotation sidecar: `POISED` lines, then `FRAG` lines.
    pub fn format_sidecar(&self) -> String {
        let mut out = String::new();
        for p in self.poised.iter().flatten() {
            let _ = writeln!(out, "POISED {} {} {} {}", p.prefix, p.txn, p.base, p.prim);
        }
        for f in &self.fragments {
            let _ = writeln!(out, "FRAG {} {} {}", f.from, f.to, f.label);
        }
        out
    }
}

/// Parsed annotation sidecar.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sidecar {
    pub poised: Vec<Poised>,
    pub fragments: Vec<Fragment>,
}

pub fn parse_sidecar(text: &str) -> Result<Sidecar, crate::model::trace::TraceError> {
    use crate::model::trace::TraceError;
    let mut out = Sidecar::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| TraceError { line, message };
        let fields: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(format!("bad index `{s}`")))
        };
        match fields.as_slice() {
            ["POISED", prefix, txn, base, prim] => out.poised.push(Poised {
                prefix: num(prefix)?,
                txn: txn.parse().map_err(|e| err(format!("{e}")))?,
                base: base.parse().map_err(|e| err(format!("{e}")))?,
                prim: prim.parse().map_err(|e| err(format!("{e}")))?,
            }),
            ["FRAG", from, to, label @ ..] if !label.is_empty() => out.fragments.push(Fragment {
                from: num(from)?,
                to: num(to)?,
                label: label.join(" "),
            }),
            _ => return Err(err(format!("unrecognized annotation `{body}`"))),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepCount {
    Events(usize),
    ToCompletion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Start {
        txn: TxnId,
        process: ProcessId,
    },
    Invoke {
        txn: TxnId,
        op: TOp,
    },
    Step {
        txn: TxnId,
        count: StepCount,
    },
    /// Start `txn` and run `ops` to completion; an abort is an error.
    RunSolo {
        txn: TxnId,
        process: ProcessId,
        ops: Vec<TOp>,
    },
    /// Read `reads` with a fresh transaction on a fork of the run.
    Probe {
        label: String,
        txn: TxnId,
        process: ProcessId,
        reads: Vec<TObjectId>,
    },
    Snapshot(String),
    BeginFragment(String),
    EndFragment,
    /// The most recent response of `txn` must be `expected`.
    ExpectResponse {
        txn: TxnId,
        expected: OpResponse,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    pub commands: Vec<Command>,
    pub track_poised: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeResult {
    pub label: String,
    pub values: Vec<Value>,
}

/// Executes `schedule` command by command.
pub fn run_schedule<T: Tm>(
    tm: T,
    name: &str,
    schedule: &Schedule,
) -> Result<(AnnotatedRun, Vec<ProbeResult>), HarnessError> {
    let mut s = Scheduler::new(tm);
    if schedule.track_poised {
        s = s.track_poised();
    }
    let mut probes = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for cmd in &schedule.commands {
        match cmd {
            Command::Start { txn, process } => s.start(*txn, *process)?,
            Command::Invoke { txn, op } => s.invoke(*txn, *op)?,
            Command::Step { txn, count } => match count {
                StepCount::Events(n) => {
                    for _ in 0..*n {
                        s.step(*txn)?;
                    }
                }
                StepCount::ToCompletion => {
                    s.finish_op(*txn)?;
                }
            },
            Command::RunSolo { txn, process, ops } => {
                s.run_solo(*txn, *process, ops)?;
                if s.fate(*txn) == Some(Fate::Aborted) {
                    return Err(HarnessError::UnexpectedAbort {
                        txn: *txn,
                        fragment: current.last().cloned().unwrap_or_default(),
                    });
                }
            }
            Command::Probe {
                label,
                txn,
                process,
                reads,
            } => probes.push(ProbeResult {
                label: label.clone(),
                values: s.probe_reads(*txn, *process, reads)?,
            }),
            Command::Snapshot(label) => s.snapshot(label.clone()),
            Command::BeginFragment(label) => {
                current.push(label.clone());
                s.begin_fragment(label.clone());
            }
            Command::EndFragment => {
                current.pop();
                s.end_fragment();
            }
            Command::ExpectResponse { txn, expected } => {
                let got = last_response(s.execution(), *txn);
                if got != Some(*expected) {
                    return Err(HarnessError::Assertion(format!(
                        "{txn}: expected response {expected}, got {}",
                        got.map_or("none".to_string(), |r| r.to_string())
                    )));
                }
            }
        }
    }
    Ok((s.into_run(name), probes))
}

/// The response of `txn`'s latest completed t-operation.
pub fn last_response(exec: &Execution, txn: TxnId) -> Option<OpResponse> {
    exec.events().iter().rev().find_map(|e| match e {
        Event::TOp(t) if t.txn == txn => t.response,
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tms::{ReferenceTm, TmKind};

    const X: TObjectId = TObjectId(1);

    fn tm() -> ReferenceTm {
        ReferenceTm::new(TmKind::VisibleRead, 4)
    }

    fn writer_then_probe() -> Schedule {
        Schedule {
            track_poised: true,
            commands: vec![
                Command::BeginFragment("writer".into()),
                Command::RunSolo {
                    txn: TxnId(1),
                    process: ProcessId(1),
                    ops: vec![TOp::Write(X, 4), TOp::TryCommit],
                },
                Command::EndFragment,
                Command::Probe {
                    label: "after".into(),
                    txn: TxnId(9),
                    process: ProcessId(2),
                    reads: vec![X],
                },
                Command::Start {
                    txn: TxnId(2),
                    process: ProcessId(2),
                },
                Command::Invoke {
                    txn: TxnId(2),
                    op: TOp::Read(X),
                },
                Command::Step {
                    txn: TxnId(2),
                    count: StepCount::ToCompletion,
                },
                Command::ExpectResponse {
                    txn: TxnId(2),
                    expected: OpResponse::Value(4),
                },
            ],
        }
    }

    #[test]
    fn schedule_runs_and_replays_identically() {
        let (a, pa) = run_schedule(tm(), "s", &writer_then_probe()).unwrap();
        let (b, pb) = run_schedule(tm(), "s", &writer_then_probe()).unwrap();
        assert_eq!(a, b);
        assert_eq!(pa, pb);
        assert_eq!(pa[0].values, vec![4]);
        assert_eq!(a.fragment("writer").map(|f| f.from), Some(0));
    }

    #[test]
    fn sidecar_round_trip() {
        let (run, _) = run_schedule(tm(), "s", &writer_then_probe()).unwrap();
        let text = run.format_sidecar();
        assert!(text.contains("FRAG 0 "));
        let parsed = parse_sidecar(&text).unwrap();
        assert_eq!(Some(parsed.poised), run.poised);
        assert_eq!(parsed.fragments, run.fragments);
        assert!(parse_sidecar("POISED x T1 b read()").is_err());
    }

    #[test]
    fn failed_expectation() {
        let mut s = writer_then_probe();
        s.commands.push(Command::ExpectResponse {
            txn: TxnId(2),
            expected: OpResponse::Value(5),
        });
        assert!(matches!(
            run_schedule(tm(), "s", &s),
            Err(HarnessError::Assertion(_))
        ));
    }
}
