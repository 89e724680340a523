//! Detectors over executions: RAW/AWAR patterns, invisible reads,
//! contention, strict and weak disjoint-access parallelism, and the
//! distinct-values probe.

mod dap;
mod patterns;
mod probe;

use thiserror::Error;

use crate::harness::{AnnotatedRun, HarnessError};
use crate::model::{Execution, TxnId};

pub use dap::{
    check_strict_dap, check_weak_dap, conflict_graph, contentions, disjoint_access, ConflictGraph,
    Contention, StrictDapViolation, WeakDapViolation,
};
pub use patterns::{find_awar, find_raw, pattern_report, Awar, OpPatterns, PatternReport, RawPair};
pub use probe::{distinct_values_probe, DistinctValues, ProbePoint};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("unknown transaction {0}")]
    UnknownTxn(TxnId),
    #[error("run carries no poised-event annotations")]
    NoPoisedAnnotations,
    #[error("probe transaction {0} aborted")]
    ProbeAborted(TxnId),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

/// Every nontrivial event applied by a transaction that has not written.
pub fn invisible_reads_violations(exec: &Execution) -> Vec<(TxnId, usize)> {
    let recs = exec.records();
    exec.events()
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let r = e.as_rmw()?;
            (!r.is_trivial() && recs[&r.txn].is_read_only()).then_some((r.txn, i))
        })
        .collect()
}

/// All detector findings for one run, rendered the same way whether the
/// run was just produced or read back from trace files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisSummary {
    pub patterns: PatternReport,
    pub invisible: Vec<(TxnId, usize)>,
    pub strict_dap: Vec<StrictDapViolation>,
    /// `None` without poised annotations.
    pub weak_dap: Option<Vec<WeakDapViolation>>,
}

pub fn analyze(run: &AnnotatedRun) -> AnalysisSummary {
    AnalysisSummary {
        patterns: pattern_report(&run.execution),
        invisible: invisible_reads_violations(&run.execution),
        strict_dap: check_strict_dap(&run.execution),
        weak_dap: check_weak_dap(run).ok(),
    }
}

impl AnalysisSummary {
    pub fn lines(&self) -> Vec<String> {
        let mut out = self.patterns.lines();
        out.extend(
            self.invisible
                .iter()
                .map(|(t, i)| format!("INVIS-VIOLATION {t} {i}")),
        );
        out.extend(self.strict_dap.iter().map(|v| {
            format!(
                "SDAP-VIOLATION {} {} {} {} {}",
                v.t1, v.t2, v.base, v.i, v.j
            )
        }));
        for v in self.weak_dap.iter().flatten() {
            out.push(format!(
                "WDAP-VIOLATION {} {} {} {}",
                v.prefix, v.t1, v.t2, v.base
            ));
        }
        let (raw, awar) = self
            .patterns
            .ops
            .iter()
            .fold((0, 0), |(r, a), o| (r + o.raws.len(), a + o.awars.len()));
        out.push(format!(
            "SUMMARY raw={raw} awar={awar} invis-violations={} sdap-violations={} wdap-violations={}",
            self.invisible.len(),
            self.strict_dap.len(),
            self.weak_dap.as_ref().map_or("n/a".to_string(), |w| w.len().to_string()),
        ));
        out
    }
}
