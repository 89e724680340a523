//! Line-oriented text format for executions and histories.
//!
//! ```text
//! INV T1 read(X1)
//! RMW T1 X1.val read() -> 0
//! RES T1 read(X1) -> 0
//! ```
//!
//! Histories use only `INV`/`RES` lines. Blank lines and lines starting with
//! `#` are ignored. Every base object named in a trace starts at 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::{
    BaseObjectId, Configuration, Event, Execution, History, ModelError, OpResponse, RmwEvent, TOp,
    TOpEvent, TxnId, Value,
};

/// Initial value of every base object and every t-object.
pub const INITIAL_VALUE: Value = 0;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TraceError {
    pub line: usize,
    pub message: String,
}

impl TraceError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        TraceError {
            line,
            message: message.into(),
        }
    }
}

pub fn format_event(e: &Event) -> String {
    match e {
        Event::Rmw(r) => format!("RMW {} {} {} -> {}", r.txn, r.base, r.prim, r.response),
        Event::TOp(t) => match t.response {
            None => format!("INV {} {}", t.txn, t.op),
            Some(r) => format!("RES {} {} -> {}", t.txn, t.op, r),
        },
    }
}

pub fn format_trace(exec: &Execution) -> String {
    let mut out = String::new();
    for e in exec.events() {
        let _ = writeln!(out, "{}", format_event(e));
    }
    out
}

pub fn format_history(h: &History) -> String {
    let mut out = String::new();
    for e in h.events() {
        let _ = writeln!(out, "{}", format_event(&Event::TOp(*e)));
    }
    out
}

/// Parses events with their 1-based line numbers. Checks syntax only.
pub fn parse_events(text: &str) -> Result<Vec<(usize, Event)>, TraceError> {
    let mut out = Vec::new();
    let mut pending: BTreeMap<TxnId, TOp> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let err = |e: ModelError| TraceError::new(line, e.to_string());
        let (head, resp) = match s.split_once("->") {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (s, None),
        };
        let toks: Vec<&str> = head.split_whitespace().collect();
        let event = match (toks.as_slice(), resp) {
            (["RMW", txn, base, prim], Some(r)) => Event::Rmw(RmwEvent {
                txn: txn.parse().map_err(err)?,
                base: base.parse().map_err(err)?,
                prim: prim.parse().map_err(err)?,
                response: r
                    .parse()
                    .map_err(|_| TraceError::new(line, format!("invalid response `{r}`")))?,
            }),
            (["INV", txn, op], None) => {
                let txn: TxnId = txn.parse().map_err(err)?;
                let op: TOp = op.parse().map_err(err)?;
                pending.insert(txn, op);
                Event::TOp(TOpEvent::invoke(txn, op))
            }
            (["RES", txn, op], Some(r)) => {
                let txn: TxnId = txn.parse().map_err(err)?;
                let op: TOp = if op.contains('(') {
                    op.parse().map_err(err)?
                } else {
                    // bare operation name: resolve against the pending invocation
                    let p = pending.get(&txn).copied().ok_or_else(|| {
                        TraceError::new(line, format!("{txn} has no pending `{op}`"))
                    })?;
                    let name = p.to_string();
                    if !name.starts_with(&format!("{op}(")) {
                        return Err(TraceError::new(
                            line,
                            format!("{txn} has no pending `{op}`"),
                        ));
                    }
                    p
                };
                pending.remove(&txn);
                let r: OpResponse = r.parse().map_err(err)?;
                Event::TOp(TOpEvent::respond(txn, op, r))
            }
            _ => return Err(TraceError::new(line, format!("unrecognized line `{s}`"))),
        };
        out.push((line, event));
    }
    Ok(out)
}

/// Parses a trace and replays it from the all-zero configuration over the
/// base objects it names, validating well-formedness and every RMW response.
pub fn parse_trace(text: &str) -> Result<Execution, TraceError> {
    let parsed = parse_events(text)?;
    let bases: BTreeSet<BaseObjectId> = parsed
        .iter()
        .filter_map(|(_, e)| e.as_rmw().map(|r| r.base.clone()))
        .collect();
    let initial: Configuration =
        Configuration::with_bases(bases.into_iter().map(|b| (b, INITIAL_VALUE)));
    let lines: Vec<usize> = parsed.iter().map(|(l, _)| *l).collect();
    let events = parsed.into_iter().map(|(_, e)| e).collect();
    Execution::replay(events, &initial)
        .map(|(exec, _)| exec)
        .map_err(|e| {
            let line = match &e {
                ModelError::ReplayMismatch { index, .. } | ModelError::Malformed { index, .. } => {
                    lines[*index]
                }
                _ => 0,
            };
            TraceError::new(line, e.to_string())
        })
}

/// Parses a history file. `RMW` lines are rejected.
pub fn parse_history(text: &str) -> Result<History, TraceError> {
    let parsed = parse_events(text)?;
    let mut lines = Vec::new();
    let mut events = Vec::new();
    for (line, e) in parsed {
        match e {
            Event::TOp(t) => {
                lines.push(line);
                events.push(t);
            }
            Event::Rmw(_) => {
                return Err(TraceError::new(line, "history files carry no RMW events"))
            }
        }
    }
    History::new(events).map_err(|e| {
        let line = match &e {
            ModelError::Malformed { index, .. } => lines[*index],
            _ => 0,
        };
        TraceError::new(line, e.to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRACE: &str = "\
# comment
INV T1 write(X1,5)
RES T1 write(X1,5) -> ok
INV T1 tryC()
RMW T1 X1.val write(5) -> 0
RMW T1 X1.val read() -> 5
RES T1 tryC -> C
";

    #[test]
    fn trace_round_trip() {
        let exec = parse_trace(TRACE).unwrap();
        assert_eq!(exec.len(), 6);
        let text = format_trace(&exec);
        assert_eq!(parse_trace(&text).unwrap(), exec);
        assert!(text.contains("RES T1 tryC() -> C"));
    }

    #[test]
    fn replay_mismatch_names_the_line() {
        let bad = TRACE.replace("read() -> 5", "read() -> 6");
        let err = parse_trace(&bad).unwrap_err();
        assert_eq!(err.line, 6);
    }

    #[test]
    fn history_files_reject_rmw() {
        assert_eq!(parse_history(TRACE).unwrap_err().line, 5);
        let h = parse_history("INV T0 read(X1)\nRES T0 read(X1) -> 0\n").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(parse_history("").unwrap(), History::default());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert_eq!(
            parse_events("INV T1 read(X1)\nBOGUS\n").unwrap_err().line,
            2
        );
        assert_eq!(parse_events("RES T1 read -> 0\n").unwrap_err().line, 1);
    }
}
