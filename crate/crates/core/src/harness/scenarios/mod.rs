//! Adversarial schedules, each producing one or more annotated runs and a
//! line-oriented report.

mod adversary;
mod crossed;
mod fragments;
mod read_patterns;
mod version_growth;

use std::fmt;
use std::str::FromStr;

use crate::analysis::{analyze, AnalysisSummary};
use crate::model::{History, OpResponse, TObjectId, TOp};
use crate::serializability::{check_strict_serializability, SearchBound, SerializationVerdict};
use crate::tms::TmKind;

use super::{AnnotatedRun, HarnessError};

pub use fragments::{disjoint_fragments, FragmentsSetup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioKind {
    /// Two transactions that each read what the other writes.
    Intro,
    /// Readers pinned across write phases; counts retained versions.
    VersionGrowth,
    /// Splits a writer's commit to expose a strict-DAP TM.
    DapAdversary,
    /// Interleaves writers into a long read-only transaction.
    ReadPatterns,
    /// Two step-contention-free fragments on disjoint data.
    DisjointFragments,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Intro,
        ScenarioKind::VersionGrowth,
        ScenarioKind::DapAdversary,
        ScenarioKind::ReadPatterns,
        ScenarioKind::DisjointFragments,
    ];

    /// The name accepted on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Intro => "intro",
            ScenarioKind::VersionGrowth => "theorem1",
            ScenarioKind::DapAdversary => "theorem2",
            ScenarioKind::ReadPatterns => "theorem3",
            ScenarioKind::DisjointFragments => "lemma1",
        }
    }

    /// The TM the scenario targets when none is given.
    pub fn default_tm(&self) -> TmKind {
        match self {
            ScenarioKind::Intro | ScenarioKind::VersionGrowth => TmKind::MvInvisible,
            ScenarioKind::DapAdversary => TmKind::StrictDapAttempt,
            ScenarioKind::ReadPatterns | ScenarioKind::DisjointFragments => TmKind::VisibleRead,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}` (expected intro, theorem1, theorem2, theorem3 or lemma1)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioParams {
    /// Number of write phases (`c`).
    pub phases: usize,
    /// Number of t-objects (`L`).
    pub objects: usize,
    /// Read-set size of the long reader (`m`).
    pub reads: usize,
    /// Which read to split; `None` sweeps all of them.
    pub split: Option<usize>,
    pub rounds: usize,
    pub bound: SearchBound,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            phases: 4,
            objects: 2,
            reads: 4,
            split: None,
            rounds: 1,
            bound: SearchBound::default(),
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.phases < 1 {
            return Err("--phases must be at least 1".into());
        }
        if self.objects < 1 {
            return Err("--objects must be at least 1".into());
        }
        if self.reads < 2 {
            return Err("--reads must be at least 2".into());
        }
        if let Some(j) = self.split {
            if j < 1 || j >= self.reads {
                return Err(format!("--split must lie in 1..={}", self.reads - 1));
            }
        }
        if self.rounds < 1 {
            return Err("rounds must be at least 1".into());
        }
        if self.bound.max_txns < 1 {
            return Err("--bound must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioReport {
    pub scenario: ScenarioKind,
    pub tm: TmKind,
    pub params: Vec<(&'static str, String)>,
    pub runs: Vec<AnnotatedRun>,
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
}

impl ScenarioReport {
    fn new(scenario: ScenarioKind, tm: TmKind, params: Vec<(&'static str, String)>) -> Self {
        ScenarioReport {
            scenario,
            tm,
            params,
            runs: Vec::new(),
            lines: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Lines starting with `prefix`.
    pub fn lines_with(&self, prefix: &str) -> Vec<&str> {
        self.lines
            .iter()
            .filter(|l| l.split_whitespace().next() == Some(prefix))
            .map(String::as_str)
            .collect()
    }

    pub fn run(&self, name: &str) -> Option<&AnnotatedRun> {
        self.runs.iter().find(|r| r.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = format!("SCENARIO {} tm={}", self.scenario, self.tm);
        for (k, v) in &self.params {
            out.push_str(&format!(" {k}={v}"));
        }
        out.push('\n');
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "fail" };
            if c.detail.is_empty() {
                out.push_str(&format!("CHECK {} {verdict}\n", c.name));
            } else {
                out.push_str(&format!("CHECK {} {verdict} {}\n", c.name, c.detail));
            }
        }
        out.push_str(if self.passed() {
            "RESULT pass\n"
        } else {
            "RESULT fail\n"
        });
        out
    }

    fn line(&mut self, l: impl Into<String>) {
        self.lines.push(l.into());
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    /// Adds a `RUN` section with the detector findings and keeps the run.
    fn add_run(&mut self, run: AnnotatedRun) -> AnalysisSummary {
        let summary = analyze(&run);
        self.line(format!(
            "RUN {} events={} txns={}",
            run.name,
            run.execution.len(),
            run.execution.txns().len()
        ));
        self.lines.extend(summary.lines());
        self.runs.push(run);
        summary
    }

    /// Checks `h` and adds a `HISTORY` header plus the verdict lines.
    fn add_verdict(
        &mut self,
        label: &str,
        h: &History,
        bound: &SearchBound,
    ) -> SerializationVerdict {
        let verdict = check_strict_serializability(h, bound);
        self.line(format!("HISTORY {label} txns={}", h.txns().len()));
        self.lines
            .extend(verdict.render().lines().map(str::to_string));
        verdict
    }
}

pub fn run_scenario(
    kind: ScenarioKind,
    tm: TmKind,
    params: &ScenarioParams,
) -> Result<ScenarioReport, HarnessError> {
    params.validate().map_err(HarnessError::InvalidParameter)?;
    match kind {
        ScenarioKind::Intro => crossed::run(tm, params),
        ScenarioKind::VersionGrowth => version_growth::run(tm, params),
        ScenarioKind::DapAdversary => adversary::run(tm, params),
        ScenarioKind::ReadPatterns => read_patterns::run(tm, params),
        ScenarioKind::DisjointFragments => fragments::run(tm, params),
    }
}

pub(crate) fn x(i: usize) -> TObjectId {
    TObjectId(i as u32)
}

/// `read(X1)->3 tryC()->C` style rendering of an operation script.
pub(crate) fn render_ops(ops: &[TOp], responses: &[OpResponse]) -> String {
    ops.iter()
        .zip(responses)
        .map(|(op, r)| format!("{op}->{r}"))
        .collect::<Vec<_>>()
        .join(" ")
}
