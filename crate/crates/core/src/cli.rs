//! Command-line front end.
//!
//! `run` executes a scenario and writes its artifacts, `check` decides a
//! history file, `analyze` runs the detectors over a trace file (plus its
//! `.ann` sidecar when one sits next to it).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::analyze;
use crate::harness::scenarios::{run_scenario, ScenarioKind, ScenarioParams};
use crate::harness::{parse_sidecar, AnnotatedRun, HarnessError};
use crate::model::trace::{format_history, format_trace, parse_history, parse_trace};
use crate::model::History;
use crate::serializability::{check_strict_serializability, SearchBound, SerializationVerdict};
use crate::tms::TmKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SCENARIO_FAILED: i32 = 2;
pub const EXIT_NOT_SERIALIZABLE: i32 = 3;
pub const EXIT_BOUND_EXCEEDED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "tmlab",
    version,
    about = "Run, check and analyze transactional-memory executions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario against a TM and write its artifacts.
    Run(RunArgs),
    /// Decide strict serializability of a history (or trace) file.
    Check(CheckArgs),
    /// Report RAW/AWAR patterns, invisibility and DAP findings for a trace.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// mv-invisible, visible-read or strict-dap-attempt; defaults per scenario.
    #[arg(long)]
    tm: Option<TmKind>,
    /// intro, theorem1, theorem2, theorem3 or lemma1.
    #[arg(long)]
    scenario: ScenarioKind,
    #[arg(long, default_value_t = 4)]
    phases: usize,
    #[arg(long, default_value_t = 2)]
    objects: usize,
    #[arg(long, default_value_t = 4)]
    reads: usize,
    /// Split only this read instead of sweeping all of them.
    #[arg(long)]
    split: Option<usize>,
    /// Largest history the serializability checker searches.
    #[arg(long, default_value_t = 10)]
    bound: usize,
    /// Trace output; the sidecar goes to `<path>.ann`.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// History output.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Report output, in addition to stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, conflicts_with = "trace", required_unless_present = "trace")]
    history: Option<PathBuf>,
    /// Check the history of a trace file instead.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    bound: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Check(a) => cmd_check(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match result {
        Ok((code, text)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

type Outcome = Result<(i32, String), String>;

fn bound(max_txns: usize) -> SearchBound {
    SearchBound {
        max_txns,
        ..SearchBound::default()
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// `out.trace` with tag `j1-b` becomes `out.j1-b.trace`.
pub fn tagged_path(path: &Path, tag: Option<&str>) -> PathBuf {
    let Some(tag) = tag else {
        return path.to_path_buf();
    };
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

/// Where the annotation sidecar of a trace lives.
pub fn sidecar_path(trace: &Path) -> PathBuf {
    let mut s = trace.as_os_str().to_owned();
    s.push(".ann");
    PathBuf::from(s)
}

fn cmd_run(a: RunArgs) -> Outcome {
    let params = ScenarioParams {
        phases: a.phases,
        objects: a.objects,
        reads: a.reads,
        split: a.split,
        rounds: 1,
        bound: bound(a.bound),
    };
    params.validate()?;
    let tm = a.tm.unwrap_or(a.scenario.default_tm());
    let report = match run_scenario(a.scenario, tm, &params) {
        Ok(r) => r,
        Err(HarnessError::InvalidParameter(m)) => return Err(m),
        Err(e) => {
            let text = format!("SCENARIO {} tm={tm}\nERROR {e}\nRESULT fail\n", a.scenario);
            if let Some(p) = &a.report {
                write_file(p, &text)?;
            }
            return Ok((EXIT_SCENARIO_FAILED, text));
        }
    };
    let several = report.runs.len() > 1;
    for run in &report.runs {
        let tag = several.then_some(run.name.as_str());
        if let Some(p) = &a.trace_out {
            let path = tagged_path(p, tag);
            write_file(&path, &format_trace(&run.execution))?;
            write_file(&sidecar_path(&path), &run.format_sidecar())?;
        }
        if let Some(p) = &a.history {
            write_file(
                &tagged_path(p, tag),
                &format_history(&run.execution.history()),
            )?;
        }
    }
    let text = report.render();
    if let Some(p) = &a.report {
        write_file(p, &text)?;
    }
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_SCENARIO_FAILED
    };
    Ok((code, text))
}

pub fn verdict_exit_code(v: &SerializationVerdict) -> i32 {
    match v {
        SerializationVerdict::Serializable(_) => EXIT_OK,
        SerializationVerdict::NotSerializable { .. } => EXIT_NOT_SERIALIZABLE,
        SerializationVerdict::BoundExceeded { .. } => EXIT_BOUND_EXCEEDED,
    }
}

fn cmd_check(a: CheckArgs) -> Outcome {
    if a.bound < 1 {
        return Err("--bound must be at least 1".into());
    }
    let h: History = match (&a.history, &a.trace) {
        (Some(p), _) => {
            parse_history(&read_file(p)?).map_err(|e| format!("{}: {e}", p.display()))?
        }
        (None, Some(p)) => parse_trace(&read_file(p)?)
            .map_err(|e| format!("{}: {e}", p.display()))?
            .history(),
        (None, None) => return Err("one of --history or --trace is required".into()),
    };
    let verdict = check_strict_serializability(&h, &bound(a.bound));
    let text = format!("HISTORY txns={}\n{}", h.txns().len(), verdict.render());
    if let Some(p) = &a.report {
        write_file(p, &text)?;
    }
    Ok((verdict_exit_code(&verdict), text))
}

fn cmd_analyze(a: AnalyzeArgs) -> Outcome {
    let exec =
        parse_trace(&read_file(&a.trace)?).map_err(|e| format!("{}: {e}", a.trace.display()))?;
    let ann = sidecar_path(&a.trace);
    let sidecar = if ann.exists() {
        Some(parse_sidecar(&read_file(&ann)?).map_err(|e| format!("{}: {e}", ann.display()))?)
    } else {
        None
    };
    let name = a
        .trace
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let run = AnnotatedRun::from_parts(name, exec, sidecar);
    let mut text = String::new();
    for l in analyze(&run).lines() {
        text.push_str(&l);
        text.push('\n');
    }
    if let Some(p) = &a.report {
        write_file(p, &text)?;
    }
    Ok((EXIT_OK, text))
}
